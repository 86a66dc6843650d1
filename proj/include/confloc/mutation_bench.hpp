#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "confloc/config_model.hpp"
#include "confloc/llm_gateway.hpp"
#include "confloc/report.hpp"

namespace confloc {

// Seeded generator with portable output: every draw is derived from raw
// mt19937_64 words, never from the implementation-defined std distributions.
class BenchRng {
 public:
  explicit BenchRng(std::uint64_t seed);

  std::uint64_t next();
  // Uniform in [0, n); n must be positive.
  std::size_t below(std::size_t n);
  // Uniform in [0, 1).
  double unit();

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

enum class MutateType { Compliance, Violation };
enum class ValueType { Positive, Negative, Zero, StringViolation, Empty };

std::string_view to_string(MutateType type);
std::string_view to_string(ValueType type);
ValueType value_type_from_string(std::string_view text);

inline constexpr std::array<ValueType, 5> kAllValueTypes{ValueType::Positive, ValueType::Negative, ValueType::Zero,
                                                          ValueType::StringViolation, ValueType::Empty};

// Numeric values are bounded by single-precision extremes.
inline constexpr double kFloatBound = 3.4e38;
inline constexpr std::size_t kDecoyCount = 9;

struct MutationStrategy {
  ValueType value_type = ValueType::Zero;

  static MutationStrategy of(ValueType value_type) { return MutationStrategy{value_type}; }
  // Throws InvalidArgument when the pair contradicts the strategy table.
  static MutationStrategy make(MutateType mutate_type, ValueType value_type);

  std::string_view datatype() const { return "Numeric"; }
  MutateType mutate_type() const;

  bool operator==(const MutationStrategy&) const = default;
};

std::string mutate_value(const MutationStrategy& strategy, BenchRng& rng);

struct GroundTruth {
  ConfigEntry trigger;
  MutationStrategy strategy;
  std::vector<ConfigEntry> decoys;  // exactly kDecoyCount

  bool operator==(const GroundTruth&) const = default;
};

struct MutatedCase {
  ConfigSettings mutated;
  ConfigSettings decoys;
  GroundTruth truth;
};

// Picks the trigger uniformly from the universe and nine distinct decoys,
// preferring properties absent from the base settings. Every mutation draws
// its own strategy unless `strategy` pins the trigger's.
MutatedCase make_mutated_case(const ConfigSettings& base, const PropertyCatalog& universe, BenchRng& rng,
                              std::optional<ValueType> strategy = std::nullopt);

// --- Synthetic logs ----------------------------------------------------------

// A fault-free line pattern. Message slots: {n} small integer, {id} job id,
// {host} host name, {path} local path, {ms} duration.
struct PoolPattern {
  std::string level;
  std::string component;
  std::string message;
};

struct TemplatePool {
  std::vector<PoolPattern> patterns;
  std::size_t repeats = 3;  // emissions per pattern and log

  // Hadoop-flavoured lines with no anomaly tokens. Patterns differ in first
  // word or word count so each one mines to its own template.
  static TemplatePool hadoop_default();
};

enum class SymptomProfile { Clean, DirectSymptom, IndirectSymptom };

std::string_view to_string(SymptomProfile profile);
SymptomProfile profile_from_string(std::string_view text);

// Baseline run under known-good settings.
std::string gen_fault_free_logs(const TemplatePool& pool, std::uint64_t seed);

std::string gen_synthetic_logs(const GroundTruth& truth, SymptomProfile profile, const TemplatePool& pool,
                               std::uint64_t seed);

// --- Case directories ----------------------------------------------------------

struct BenchCase {
  std::string case_id;
  std::uint64_t seed = 0;
  SymptomProfile profile = SymptomProfile::Clean;
  MutatedCase mutation;
  std::string logs;
  std::string baseline_logs;
  PropertyCatalog catalog;
};

BenchCase make_bench_case(std::string case_id, const ConfigSettings& base, const PropertyCatalog& catalog,
                          std::uint64_t seed, SymptomProfile profile, std::optional<ValueType> strategy = std::nullopt);

// Writes logs.txt, baseline.log, mutated.xml, decoys.xml, catalog.json,
// truth.json and, for anomalous profiles, fixtures/{verify,indirect}.txt
// scripted to score the trigger high and name it in indirect inference.
void write_bench_case(const BenchCase& bench_case, const std::filesystem::path& dir);

std::string truth_json(const BenchCase& bench_case);

// --- Evaluation ----------------------------------------------------------------

struct EvalResult {
  std::string case_id;
  std::string variant;  // "o", "nv" or "nl"
  bool stage1_correct = false;
  bool entered_stage2 = false;
  bool stage2_correct = false;
  bool direct_correct = false;  // trigger among the direct matches
  bool entered_indirect = false;
  bool indirect_correct = false;
  std::size_t direct_property_count = 0;
  std::size_t suspect_count = 0;
  Flow flow = Flow::None;
};

enum class Phase { Stage1, DirectInference, IndirectInference, Stage2 };

std::string_view to_string(Phase phase);

struct Ratio {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 1;

  double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
  bool operator==(const Ratio&) const = default;
};

// Correct cases over cases that entered the phase. Throws EmptyDenominator.
Ratio accuracy(const std::vector<EvalResult>& results, Phase phase);

// (n - 1) / n for n suspects that include the truth. Throws NotApplicable
// when the truth is absent or n is zero.
Ratio fp_rate(std::size_t suspect_count, bool truth_among_suspects = true);

// Mean FP ratio over cases whose set contains the truth; nullopt when none.
std::optional<double> mean_fp(const std::vector<EvalResult>& results, bool direct);

struct EvalOptions {
  BackendKind backend = BackendKind::Mock;  // for the "o" and "nv" variants
};

// Runs the o, nv and nl variants on one case directory.
std::vector<EvalResult> evaluate_case(const std::filesystem::path& dir, const EvalOptions& options = {});

// Every subdirectory holding truth.json (or `dir` itself), in case_id order.
std::vector<EvalResult> evaluate_cases(const std::filesystem::path& dir, const EvalOptions& options = {});

std::string metrics_json(const std::vector<EvalResult>& results);

}  // namespace confloc
