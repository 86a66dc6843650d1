#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "confloc/anomaly.hpp"
#include "confloc/config_model.hpp"
#include "confloc/direct_inference.hpp"

namespace confloc {

inline constexpr std::string_view kDefaultModel = "gpt-4-0613";

struct CompletionRequest {
  std::string task;  // "verify" or "indirect"; the mock backend keys fixtures on it
  std::string system_prompt;
  std::string user_prompt;
  double temperature = 0.0;
  std::string model_id{kDefaultModel};
  int max_retries = 3;

  // Only temperature 0 is accepted. Throws InvalidRequest.
  void validate() const;
};

enum class BackendKind { Mock, Remote, Heuristic };

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual BackendKind kind() const = 0;
  // Validates the request before dispatching it.
  std::string complete(const CompletionRequest& request);

 protected:
  virtual std::string dispatch(const CompletionRequest& request) = 0;
};

// Replays scripted responses keyed by "<case>-<task>" (or "<task>" when no
// case name is set). Read-only after construction.
class MockBackend final : public LlmBackend {
 public:
  explicit MockBackend(std::map<std::string, std::string> scripts, std::string case_name = {});

  // Loads every "<key>.txt" in the directory.
  static MockBackend from_directory(const std::filesystem::path& dir, std::string case_name = {});

  BackendKind kind() const override { return BackendKind::Mock; }
  std::string key_for(std::string_view task) const;

 protected:
  std::string dispatch(const CompletionRequest& request) override;

 private:
  std::map<std::string, std::string> scripts_;
  std::string case_name_;
};

struct RetryPolicy {
  std::chrono::milliseconds initial_delay{500};
  double backoff_factor = 2.0;
  std::chrono::milliseconds max_delay{30'000};
};

struct RemoteConfig {
  std::string base_url;  // e.g. https://api.openai.com/v1
  std::string api_key;
  std::chrono::seconds timeout{120};
  RetryPolicy retry;

  // LLM_API_BASE (default https://api.openai.com/v1), LLM_API_KEY.
  static RemoteConfig from_environment();
};

// HTTP chat-completion client: POST <base>/chat/completions with
// {model, temperature, messages:[{role, content}]} and a bearer key.
// Retries connection failures, 429 and 5xx with exponential backoff.
class RemoteBackend final : public LlmBackend {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  explicit RemoteBackend(RemoteConfig config, Sleeper sleeper = {});

  BackendKind kind() const override { return BackendKind::Remote; }
  std::size_t attempts() const { return attempts_; }

 protected:
  std::string dispatch(const CompletionRequest& request) override;

 private:
  RemoteConfig config_;
  Sleeper sleeper_;
  std::size_t attempts_ = 0;
};

// Stand-in for the no-LLM variant: the pipeline uses heuristic_verify and
// skips indirect inference. complete() returns an empty response.
class HeuristicBackend final : public LlmBackend {
 public:
  BackendKind kind() const override { return BackendKind::Heuristic; }

 protected:
  std::string dispatch(const CompletionRequest&) override { return {}; }
};

// --- Verification --------------------------------------------------------

struct EntryScore {
  std::size_t index = 0;  // position in MatchSet::matches
  int score = 0;
  bool plausible = false;
};

struct VerificationVerdict {
  std::vector<EntryScore> per_entry;
  bool passed = false;
  bool malformed = false;  // no line of the response could be parsed
  std::vector<std::string> warnings;
};

struct LlmOptions {
  std::string model_id{kDefaultModel};
  int max_retries = 3;
  int verify_threshold = 50;
  std::size_t max_suspects = 3;
  std::size_t prompt_char_cap = 60'000;
};

std::string build_verify_prompt(const MatchSet& matches, const PropertyCatalog& catalog);

// Parses "ENTRY <i>: SCORE=<n>" lines; i is 1-based in the prompt.
VerificationVerdict parse_verification(std::string_view response, std::size_t entry_count, int threshold);

// Requires a non-empty MatchSet.
VerificationVerdict verify(const MatchSet& matches, const PropertyCatalog& catalog, LlmBackend& backend,
                           const LlmOptions& options = {});

// --- Suspects ----------------------------------------------------------------

enum class SuspectOrigin { Verification, DirectInference, IndirectInference };

std::string_view to_string(SuspectOrigin origin);

struct Suspect {
  std::string property;
  std::optional<std::string> value;
  std::string explanation;
  std::size_t rank = 0;  // 1-based, dense

  bool operator==(const Suspect&) const = default;
};

struct SuspectSet {
  std::vector<Suspect> suspects;
  SuspectOrigin origin_phase = SuspectOrigin::IndirectInference;

  bool empty() const { return suspects.empty(); }
  bool contains(std::string_view property) const;
  bool operator==(const SuspectSet&) const = default;
};

// "name hits", "value hits" or "name hits; value hits".
std::string hit_explanation(bool name_hit, bool value_hit);

// Properties of plausible entries, by best score then first appearance.
SuspectSet suspects_from_verification(const MatchSet& matches, const VerificationVerdict& verdict,
                                      std::size_t max_suspects);

// Every matched property, ranked like heuristic_verify; used when
// verification is disabled.
SuspectSet suspects_from_matches(const MatchSet& matches, std::size_t max_suspects);

// The property matched by the most distinct key messages; ties go to more
// name hits, then the lexicographically smaller name.
SuspectSet heuristic_verify(const MatchSet& matches);

// --- Indirect inference --------------------------------------------------

struct IndirectResult {
  SuspectSet suspects;
  bool inconclusive = false;
  std::vector<std::string> warnings;
};

// Drops the oldest key messages while the prompt exceeds the cap (keeping at
// least one); evictions are reported through `warnings`.
std::string build_indirect_prompt(const std::vector<KeyLogMessage>& messages, const ConfigSettings& settings,
                                  const PropertyCatalog& catalog, std::size_t prompt_char_cap,
                                  std::vector<std::string>* warnings = nullptr);

std::string indirect_system_prompt(std::size_t max_suspects);

IndirectResult parse_indirect(std::string_view response, const ConfigSettings& settings, std::size_t max_suspects);

IndirectResult infer_indirect(const std::vector<KeyLogMessage>& messages, const ConfigSettings& settings,
                              const PropertyCatalog& catalog, LlmBackend& backend, const LlmOptions& options = {});

}  // namespace confloc
