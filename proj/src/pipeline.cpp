#include "confloc/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <utility>

#include "confloc/error.hpp"

#ifndef CONFLOC_VERSION
#define CONFLOC_VERSION "0.0.0"
#endif

namespace confloc {

namespace {

void trace(AnalysisState& state, std::string_view phase) { state.notes.push_back("trace: " + std::string(phase)); }

void note_all(AnalysisState& state, const std::vector<std::string>& lines) {
  state.notes.insert(state.notes.end(), lines.begin(), lines.end());
}

int exit_code_of(const DiagnosisReport& report) {
  if (report.verdict == Verdict::FaultFree) return kExitFaultFree;
  return report.inconclusive ? kExitInconclusive : kExitSuspectsFound;
}

AnalysisOutcome finish(AnalysisState state, std::optional<ErrorKind> failure = std::nullopt) {
  AnalysisOutcome out;
  out.report = build_report(state);
  out.exit_code = failure ? exit_code_for(*failure) : exit_code_of(out.report);
  out.state = std::move(state);
  return out;
}

void run_indirect(AnalysisState& state, const AnalysisInputs& inputs, const AnalysisOptions& options,
                  LlmBackend& backend) {
  if (backend.kind() == BackendKind::Heuristic) {
    state.notes.push_back("indirect inference needs an LLM; skipped with the heuristic backend");
    return;
  }
  trace(state, kTraceIndirect);
  state.indirect = infer_indirect(state.identification.key_messages, inputs.settings, inputs.catalog, backend,
                                  options.llm);
  note_all(state, state.indirect->warnings);
}

void run_stage2(AnalysisState& state, const AnalysisInputs& inputs, const AnalysisOptions& options,
                LlmBackend& backend) {
  trace(state, kTraceDirect);
  const PropertyCatalog& universe_source =
      inputs.catalog.universe.empty() ? PropertyCatalog::from_settings(inputs.settings) : inputs.catalog;
  const HotTermFilter filter = build_hot_filter(universe_source, options.hot_k);
  state.matches = run_direct(state.identification.key_messages, inputs.settings, filter, options.direct);

  if (state.matches->empty()) {
    run_indirect(state, inputs, options, backend);
    return;
  }
  if (options.no_verify) {
    trace(state, kTraceVerificationSkipped);
    state.accepted = suspects_from_matches(*state.matches, options.llm.max_suspects);
    return;
  }
  if (backend.kind() == BackendKind::Heuristic) {
    trace(state, kTraceHeuristicVerification);
    state.accepted = heuristic_verify(*state.matches);
    return;
  }
  trace(state, kTraceVerification);
  state.verification = verify(*state.matches, inputs.catalog, backend, options.llm);
  note_all(state, state.verification->warnings);
  if (state.verification->passed) {
    state.accepted = suspects_from_verification(*state.matches, *state.verification, options.llm.max_suspects);
    return;
  }
  run_indirect(state, inputs, options, backend);
}

const char* env_or_null(const char* name) {
  const char* v = std::getenv(name);
  return v && *v ? v : nullptr;
}

}  // namespace

std::string_view library_version() { return CONFLOC_VERSION; }

AnalysisOutcome analyze(const AnalysisInputs& inputs, const AnalysisOptions& options, LlmBackend& backend) {
  inputs.store.require_fingerprint(inputs.parsed.config_fingerprint);

  AnalysisState state;
  state.meta = ToolMeta{std::string(library_version()),
                        backend.kind() == BackendKind::Heuristic ? std::string("none") : options.llm.model_id,
                        inputs.store.fingerprint(), inputs.store.created_at()};
  trace(state, kTraceIdentification);
  state.identification = classify(inputs.parsed, inputs.store, inputs.tokens);
  if (state.identification.kind == IdentificationKind::FaultFree) return finish(std::move(state));

  try {
    run_stage2(state, inputs, options, backend);
  } catch (const Error& e) {
    // Keep whatever the earlier phases produced.
    state.notes.push_back(std::string("error: ") + e.what());
    return finish(std::move(state), e.kind());
  }
  return finish(std::move(state));
}

bool trace_contains(const DiagnosisReport& report, std::string_view phase) {
  const std::string wanted = "trace: " + std::string(phase);
  return std::find(report.phase_notes.begin(), report.phase_notes.end(), wanted) != report.phase_notes.end();
}

AnalysisInputs load_inputs(const PipelineFlags& flags, std::vector<std::string>* warnings) {
  if (flags.logs.empty()) throw Error(ErrorKind::InvalidArgument, "no log files given");
  if (flags.configs.empty()) throw Error(ErrorKind::InvalidArgument, "no configuration files given");

  const ParserConfig parser = flags.parser_config ? ParserConfig::from_json_file(*flags.parser_config) : ParserConfig{};
  AnalysisInputs in;
  in.store = TemplateStore::load(flags.store);
  in.store.require_fingerprint(parser.fingerprint());
  in.parsed = parse_log_files(flags.logs, parser);

  std::vector<ConfigSettings> user;
  for (const auto& p : flags.configs) user.push_back(load_settings(p, EntrySource::UserDefined));
  std::vector<ConfigSettings> fabricated;
  for (const auto& p : flags.decoys) fabricated.push_back(load_settings(p, EntrySource::Fabricated));
  MergedSettings merged = merge_settings(user, fabricated);
  in.settings = std::move(merged.settings);
  if (warnings) warnings->insert(warnings->end(), merged.warnings.begin(), merged.warnings.end());

  in.catalog = flags.descriptions ? PropertyCatalog::load_json(*flags.descriptions) : PropertyCatalog{};
  if (flags.tokens) in.tokens = WeightedTokenSet::from_json_file(*flags.tokens);
  return in;
}

AnalysisOptions options_from(const PipelineFlags& flags) {
  if (flags.verify_threshold < 0 || flags.verify_threshold > 100) {
    throw Error(ErrorKind::InvalidArgument, "verify threshold must be within [0, 100]");
  }
  if (flags.max_suspects == 0) throw Error(ErrorKind::InvalidArgument, "max suspects must be at least 1");
  AnalysisOptions o;
  o.no_verify = flags.no_verify;
  o.hot_k = flags.hot_k;
  o.direct.match_names = !flags.no_name_match;
  o.direct.match_values = !flags.no_value_match;
  o.llm.verify_threshold = flags.verify_threshold;
  o.llm.max_suspects = flags.max_suspects;
  if (flags.model) {
    o.llm.model_id = *flags.model;
  } else if (const char* m = env_or_null("LLM_MODEL")) {
    o.llm.model_id = m;
  }
  return o;
}

std::unique_ptr<LlmBackend> make_backend(const PipelineFlags& flags) {
  switch (flags.backend) {
    case BackendKind::Mock:
      if (!flags.fixtures) throw Error(ErrorKind::InvalidArgument, "--llm mock needs --fixtures");
      return std::make_unique<MockBackend>(MockBackend::from_directory(*flags.fixtures, flags.fixture_case));
    case BackendKind::Remote:
      return std::make_unique<RemoteBackend>(RemoteConfig::from_environment());
    case BackendKind::Heuristic:
      return std::make_unique<HeuristicBackend>();
  }
  throw Error(ErrorKind::InvalidArgument, "unknown backend");
}

AnalysisOutcome run_analyze(const PipelineFlags& flags) {
  std::vector<std::string> warnings;
  const AnalysisInputs inputs = load_inputs(flags, &warnings);
  const AnalysisOptions options = options_from(flags);
  auto backend = make_backend(flags);
  AnalysisOutcome out = analyze(inputs, options, *backend);
  if (!warnings.empty()) {
    out.state.notes.insert(out.state.notes.begin(), warnings.begin(), warnings.end());
    out.report.phase_notes = out.state.notes;
  }
  return out;
}

}  // namespace confloc
