#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "confloc/anomaly.hpp"
#include "confloc/config_model.hpp"
#include "confloc/direct_inference.hpp"
#include "confloc/llm_gateway.hpp"
#include "confloc/log_parser.hpp"
#include "confloc/report.hpp"
#include "confloc/template_store.hpp"

namespace confloc {

std::string_view library_version();

inline constexpr int kExitFaultFree = 0;
inline constexpr int kExitSuspectsFound = 10;
inline constexpr int kExitInconclusive = 11;

// Trace markers written to phase_notes as "trace: <phase>".
inline constexpr std::string_view kTraceIdentification = "anomaly-identification";
inline constexpr std::string_view kTraceDirect = "direct-inference";
inline constexpr std::string_view kTraceVerification = "verification";
inline constexpr std::string_view kTraceHeuristicVerification = "heuristic-verification";
inline constexpr std::string_view kTraceVerificationSkipped = "verification-skipped";
inline constexpr std::string_view kTraceIndirect = "indirect-inference";

struct AnalysisInputs {
  ParsedLog parsed;
  TemplateStore store{0};
  ConfigSettings settings;
  PropertyCatalog catalog;
  WeightedTokenSet tokens = WeightedTokenSet::defaults();
};

struct AnalysisOptions {
  bool no_verify = false;  // accept direct-inference matches without verification
  std::size_t hot_k = 20;
  DirectOptions direct;
  LlmOptions llm;
};

struct AnalysisOutcome {
  int exit_code = kExitFaultFree;
  DiagnosisReport report;
  AnalysisState state;
};

// Runs both stages. Backend errors do not escape: they end the run with the
// partial state in the report and an exit code >= 64.
AnalysisOutcome analyze(const AnalysisInputs& inputs, const AnalysisOptions& options, LlmBackend& backend);

bool trace_contains(const DiagnosisReport& report, std::string_view phase);

// File-level flags of `confloc analyze`.
struct PipelineFlags {
  std::vector<std::filesystem::path> logs;
  std::vector<std::filesystem::path> configs;
  std::vector<std::filesystem::path> decoys;
  std::optional<std::filesystem::path> descriptions;
  std::filesystem::path store;
  std::optional<std::filesystem::path> tokens;
  std::optional<std::filesystem::path> parser_config;
  BackendKind backend = BackendKind::Mock;
  std::optional<std::filesystem::path> fixtures;
  std::string fixture_case;
  bool no_verify = false;
  bool no_name_match = false;
  bool no_value_match = false;
  int verify_threshold = 50;
  std::size_t max_suspects = 3;
  std::size_t hot_k = 20;
  std::optional<std::string> model;  // overrides LLM_MODEL
};

AnalysisInputs load_inputs(const PipelineFlags& flags, std::vector<std::string>* warnings = nullptr);
AnalysisOptions options_from(const PipelineFlags& flags);
std::unique_ptr<LlmBackend> make_backend(const PipelineFlags& flags);

// Loads everything named by the flags and analyzes. Loading errors throw.
AnalysisOutcome run_analyze(const PipelineFlags& flags);

}  // namespace confloc
