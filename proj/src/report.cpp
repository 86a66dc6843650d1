#include "confloc/report.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>

#include <nlohmann/json.hpp>

#include "confloc/error.hpp"

namespace confloc {

namespace {

using nlohmann::ordered_json;

std::string truncate_utf8(std::string text, std::size_t limit) {
  if (text.size() <= limit) return text;
  std::size_t cut = limit;
  while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) --cut;
  text.resize(cut);
  text += kTruncationMarker;
  return text;
}

std::vector<Evidence> evidence_for(const std::string& property, const AnalysisState& state) {
  std::map<Origin, const LogRecord*> records;
  if (state.matches) {
    for (const auto& m : state.matches->matches) {
      if (m.entry.property == property) records.emplace(m.key_message.record.origin, &m.key_message.record);
    }
  }
  std::vector<Evidence> out;
  if (records.empty()) {
    for (const auto& k : state.identification.key_messages) out.push_back(make_evidence(k.record));
    return out;
  }
  for (const auto& [origin, record] : records) out.push_back(make_evidence(*record));
  return out;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

ordered_json evidence_json(const Evidence& e) {
  return ordered_json{{"file", e.file}, {"line", e.line}, {"excerpt", e.excerpt}};
}

Evidence evidence_from_json(const nlohmann::json& j) {
  return Evidence{j.at("file").get<std::string>(), j.at("line").get<std::size_t>(), j.at("excerpt").get<std::string>()};
}

template <typename Enum, std::size_t N>
Enum parse_enum(const std::string& text, const std::array<Enum, N>& options, const char* field) {
  for (Enum e : options) {
    if (to_string(e) == text) return e;
  }
  throw Error(ErrorKind::InvalidArgument, std::string("report: unknown ") + field + " '" + text + "'");
}

void render_evidence(std::string& out, const Evidence& e, const char* indent) {
  std::string excerpt = e.excerpt;
  std::string body;
  std::size_t start = 0;
  bool first = true;
  while (start <= excerpt.size()) {
    std::size_t end = excerpt.find('\n', start);
    if (end == std::string::npos) end = excerpt.size();
    body += first ? "" : std::string(indent) + "    ";
    body += excerpt.substr(start, end - start) + "\n";
    first = false;
    start = end + 1;
  }
  out += std::string(indent) + e.file + ":" + std::to_string(e.line) + "  " + body;
}

}  // namespace

std::string_view to_string(Verdict verdict) {
  return verdict == Verdict::FaultFree ? "configuration-fault-free" : "configuration-error";
}

std::string_view to_string(Flow flow) {
  switch (flow) {
    case Flow::None: return "none";
    case Flow::Fast: return "fast";
    case Flow::Direct: return "direct";
    case Flow::Complete: return "complete";
  }
  return "none";
}

Evidence make_evidence(const LogRecord& record) {
  std::string text = record.message;
  for (const auto& s : record.stack_lines) text += "\n" + s;
  return Evidence{record.origin.file_id, record.origin.line_no, truncate_utf8(std::move(text), kEvidenceExcerptLimit)};
}

DiagnosisReport build_report(const AnalysisState& state) {
  DiagnosisReport report;
  report.tool_meta = state.meta;
  report.phase_notes = state.notes;
  report.specific_templates = state.identification.specific_template_count;
  report.key_messages = state.identification.key_messages.size();
  if (state.identification.kind == IdentificationKind::FaultFree) return report;

  report.verdict = Verdict::ConfigurationError;
  const SuspectSet* chosen = nullptr;
  if (state.accepted && !state.accepted->empty()) {
    report.flow = Flow::Fast;
    chosen = &*state.accepted;
  } else if (state.indirect) {
    report.flow = state.matches && !state.matches->empty() ? Flow::Complete : Flow::Direct;
    chosen = &state.indirect->suspects;
  }

  report.suspects.emplace();
  if (chosen && !chosen->empty()) {
    report.suspect_origin = chosen->origin_phase;
    for (const auto& s : chosen->suspects) {
      report.suspects->push_back(ReportSuspect{s.rank, s.property, s.value, s.explanation, evidence_for(s.property, state)});
    }
  } else {
    report.inconclusive = true;
    for (const auto& k : state.identification.key_messages) report.context.push_back(make_evidence(k.record));
  }
  return report;
}

std::string render(const DiagnosisReport& report, ReportFormat format) {
  if (format == ReportFormat::Json) {
    ordered_json j;
    j["schema_version"] = kReportSchemaVersion;
    j["verdict"] = to_string(report.verdict);
    j["inconclusive"] = report.inconclusive;
    j["flow"] = to_string(report.flow);
    j["suspect_origin"] = report.suspect_origin ? ordered_json(to_string(*report.suspect_origin)) : ordered_json(nullptr);
    if (report.suspects) {
      ordered_json arr = ordered_json::array();
      for (const auto& s : *report.suspects) {
        ordered_json ev = ordered_json::array();
        for (const auto& e : s.evidence) ev.push_back(evidence_json(e));
        arr.push_back(ordered_json{{"rank", s.rank},
                                   {"property", s.property},
                                   {"value", s.value ? ordered_json(*s.value) : ordered_json(nullptr)},
                                   {"explanation", s.explanation},
                                   {"evidence", ev}});
      }
      j["suspects"] = arr;
    } else {
      j["suspects"] = nullptr;
    }
    ordered_json context = ordered_json::array();
    for (const auto& e : report.context) context.push_back(evidence_json(e));
    j["context"] = context;
    j["stage1"] = ordered_json{{"specific_templates", report.specific_templates}, {"key_messages", report.key_messages}};
    j["phase_notes"] = report.phase_notes;
    j["tool_meta"] = ordered_json{{"version", report.tool_meta.version},
                                  {"model", report.tool_meta.model},
                                  {"store_fingerprint", hex64(report.tool_meta.store_fingerprint)},
                                  {"store_created_at", report.tool_meta.store_created_at}};
    return j.dump(2) + "\n";
  }

  std::string out = "VERDICT: " + std::string(to_string(report.verdict)) + "\n";
  if (report.verdict == Verdict::FaultFree) {
    out += "No configuration error occurs.\n";
  } else {
    out += "FLOW: " + std::string(to_string(report.flow)) + "\n";
    if (report.inconclusive) {
      out += "No configuration error trigger found (inconclusive).\n";
    } else {
      out += "SUSPECTS (" + std::string(to_string(*report.suspect_origin)) + "):\n";
      for (const auto& s : *report.suspects) {
        out += "  " + std::to_string(s.rank) + ". " + s.property + " = " + (s.value ? *s.value : std::string("(unset)")) +
               "\n";
        out += "     explanation: " + s.explanation + "\n";
        out += "     evidence:\n";
        for (const auto& e : s.evidence) render_evidence(out, e, "       ");
      }
    }
    if (!report.context.empty()) {
      out += "KEY LOG MESSAGES:\n";
      for (const auto& e : report.context) render_evidence(out, e, "  ");
    }
  }
  out += "STAGE 1: " + std::to_string(report.specific_templates) + " specific template(s), " +
         std::to_string(report.key_messages) + " key message(s)\n";
  if (!report.phase_notes.empty()) {
    out += "NOTES:\n";
    for (const auto& n : report.phase_notes) out += "  - " + n + "\n";
  }
  out += "TOOL: confloc " + report.tool_meta.version + ", model " + report.tool_meta.model + ", store " +
         hex64(report.tool_meta.store_fingerprint) + "\n";
  return out;
}

DiagnosisReport parse_report_json(std::string_view text) {
  DiagnosisReport r;
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("schema_version").get<int>() != kReportSchemaVersion) {
      throw Error(ErrorKind::InvalidArgument, "report: unsupported schema_version");
    }
    r.verdict = parse_enum(j.at("verdict").get<std::string>(),
                           std::array{Verdict::FaultFree, Verdict::ConfigurationError}, "verdict");
    r.inconclusive = j.at("inconclusive").get<bool>();
    r.flow = parse_enum(j.at("flow").get<std::string>(), std::array{Flow::None, Flow::Fast, Flow::Direct, Flow::Complete},
                        "flow");
    if (!j.at("suspect_origin").is_null()) {
      r.suspect_origin = parse_enum(
          j.at("suspect_origin").get<std::string>(),
          std::array{SuspectOrigin::Verification, SuspectOrigin::DirectInference, SuspectOrigin::IndirectInference},
          "suspect_origin");
    }
    if (!j.at("suspects").is_null()) {
      r.suspects.emplace();
      for (const auto& s : j.at("suspects")) {
        ReportSuspect rs;
        rs.rank = s.at("rank").get<std::size_t>();
        rs.property = s.at("property").get<std::string>();
        if (!s.at("value").is_null()) rs.value = s.at("value").get<std::string>();
        rs.explanation = s.at("explanation").get<std::string>();
        for (const auto& e : s.at("evidence")) rs.evidence.push_back(evidence_from_json(e));
        r.suspects->push_back(std::move(rs));
      }
    }
    for (const auto& e : j.at("context")) r.context.push_back(evidence_from_json(e));
    r.specific_templates = j.at("stage1").at("specific_templates").get<std::size_t>();
    r.key_messages = j.at("stage1").at("key_messages").get<std::size_t>();
    r.phase_notes = j.at("phase_notes").get<std::vector<std::string>>();
    const auto& meta = j.at("tool_meta");
    r.tool_meta.version = meta.at("version").get<std::string>();
    r.tool_meta.model = meta.at("model").get<std::string>();
    r.tool_meta.store_fingerprint = std::stoull(meta.at("store_fingerprint").get<std::string>(), nullptr, 16);
    r.tool_meta.store_created_at = meta.at("store_created_at").get<std::int64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("report: ") + e.what());
  }
  return r;
}

}  // namespace confloc
