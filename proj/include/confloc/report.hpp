#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "confloc/anomaly.hpp"
#include "confloc/direct_inference.hpp"
#include "confloc/llm_gateway.hpp"

namespace confloc {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr std::size_t kEvidenceExcerptLimit = 500;
inline constexpr std::string_view kTruncationMarker = " [...]";

enum class Verdict { FaultFree, ConfigurationError };
enum class Flow { None, Fast, Direct, Complete };

std::string_view to_string(Verdict verdict);
std::string_view to_string(Flow flow);

struct Evidence {
  std::string file;
  std::size_t line = 0;
  std::string excerpt;  // message plus stack lines, capped at kEvidenceExcerptLimit

  bool operator==(const Evidence&) const = default;
};

struct ReportSuspect {
  std::size_t rank = 0;
  std::string property;
  std::optional<std::string> value;
  std::string explanation;
  std::vector<Evidence> evidence;

  bool operator==(const ReportSuspect&) const = default;
};

struct ToolMeta {
  std::string version;
  std::string model;
  std::uint64_t store_fingerprint = 0;
  std::int64_t store_created_at = 0;

  bool operator==(const ToolMeta&) const = default;
};

struct DiagnosisReport {
  Verdict verdict = Verdict::FaultFree;
  bool inconclusive = false;
  Flow flow = Flow::None;
  std::optional<SuspectOrigin> suspect_origin;
  std::optional<std::vector<ReportSuspect>> suspects;  // absent iff fault-free
  std::vector<Evidence> context;                       // all key messages when inconclusive
  std::size_t specific_templates = 0;
  std::size_t key_messages = 0;
  std::vector<std::string> phase_notes;
  ToolMeta tool_meta;

  bool operator==(const DiagnosisReport&) const = default;
};

// Everything the pipeline learned; fields stay empty for phases not run.
struct AnalysisState {
  IdentificationVerdict identification;
  std::optional<MatchSet> matches;
  std::optional<VerificationVerdict> verification;
  std::optional<SuspectSet> accepted;  // verified, heuristic or unverified direct suspects
  std::optional<IndirectResult> indirect;
  std::vector<std::string> notes;
  ToolMeta meta;
};

Evidence make_evidence(const LogRecord& record);

DiagnosisReport build_report(const AnalysisState& state);

enum class ReportFormat { Text, Json };

std::string render(const DiagnosisReport& report, ReportFormat format);

// Inverse of render(..., Json). Throws InvalidArgument on schema errors.
DiagnosisReport parse_report_json(std::string_view json);

}  // namespace confloc
