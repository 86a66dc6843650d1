// confloc: localize configuration errors from logs.
//
//   confloc ingest  --logs <files...> --store <file>
//   confloc analyze --logs <files...> --config <files...> --store <file> ...
//   confloc bench gen  --config <file> --catalog <file> --seed <n> --profile <p> --out <dir>
//   confloc bench eval --cases <dir> --llm mock --out metrics.json

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "confloc/error.hpp"
#include "confloc/mutation_bench.hpp"
#include "confloc/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

const std::map<std::string, confloc::BackendKind> kBackends{{"mock", confloc::BackendKind::Mock},
                                                            {"remote", confloc::BackendKind::Remote},
                                                            {"heuristic", confloc::BackendKind::Heuristic}};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw confloc::Error(confloc::ErrorKind::IoFailure, "cannot write " + path.string());
  out << text;
  if (!out) throw confloc::Error(confloc::ErrorKind::IoFailure, "short write to " + path.string());
}

// Explicit flag, then SOURCE_DATE_EPOCH, then the wall clock.
std::int64_t creation_time(std::optional<std::int64_t> flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH"); env && *env) return std::stoll(env);
  return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

struct IngestArgs {
  std::vector<fs::path> logs;
  fs::path store;
  std::optional<fs::path> parser_config;
  std::optional<std::int64_t> created_at;
};

int run_ingest(const IngestArgs& a) {
  const confloc::ParserConfig parser =
      a.parser_config ? confloc::ParserConfig::from_json_file(*a.parser_config) : confloc::ParserConfig{};
  const auto parsed = confloc::parse_log_files(a.logs, parser);
  confloc::TemplateStore store = fs::exists(a.store) ? confloc::TemplateStore::load(a.store)
                                                     : confloc::TemplateStore::for_config(parser, creation_time(a.created_at));
  const std::size_t added = store.ingest(parsed);
  store.persist(a.store);
  std::cout << "ingested " << parsed.records.size() << " records, " << parsed.templates.size() << " templates ("
            << added << " new); store now holds " << store.size() << " templates\n";
  return 0;
}

struct AnalyzeArgs {
  confloc::PipelineFlags flags;
  std::string llm = "mock";
  std::optional<fs::path> report;
  std::string format = "text";
  std::uint64_t seed = 0;
};

int run_analyze(AnalyzeArgs a) {
  a.flags.backend = kBackends.at(a.llm);
  const auto outcome = confloc::run_analyze(a.flags);
  const auto text = confloc::render(outcome.report, a.format == "json" ? confloc::ReportFormat::Json
                                                                       : confloc::ReportFormat::Text);
  if (a.report) {
    write_file(*a.report, text);
  } else {
    std::cout << text;
  }
  return outcome.exit_code;
}

struct GenArgs {
  fs::path config;
  fs::path catalog;
  std::uint64_t seed = 0;
  std::string profile = "direct";
  std::optional<std::string> strategy;
  fs::path out;
};

int run_gen(const GenArgs& a) {
  const auto base = confloc::load_settings(a.config);
  const auto catalog = confloc::PropertyCatalog::load_json(a.catalog);
  std::optional<confloc::ValueType> strategy;
  if (a.strategy) strategy = confloc::value_type_from_string(*a.strategy);
  const auto bench_case = confloc::make_bench_case(a.out.filename().string(), base, catalog, a.seed,
                                                   confloc::profile_from_string(a.profile), strategy);
  confloc::write_bench_case(bench_case, a.out);
  std::cout << "wrote case " << bench_case.case_id << " (trigger " << bench_case.mutation.truth.trigger.property
            << ") to " << a.out.string() << "\n";
  return 0;
}

struct EvalArgs {
  fs::path cases;
  std::string llm = "mock";
  fs::path out = "metrics.json";
};

int run_eval(const EvalArgs& a) {
  confloc::EvalOptions options;
  options.backend = kBackends.at(a.llm);
  const auto results = confloc::evaluate_cases(a.cases, options);
  const std::string metrics = confloc::metrics_json(results);
  write_file(a.out, metrics);
  std::cout << "evaluated " << results.size() / 3 << " cases; metrics in " << a.out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Localize configuration errors from logs"};
  app.set_version_flag("--version", std::string(confloc::library_version()));
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Mine fault-free logs into a template store");
  ingest_cmd->add_option("--logs", ingest.logs, "Fault-free log files")->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("--store", ingest.store, "Template store to create or extend")->required();
  ingest_cmd->add_option("--parser-config", ingest.parser_config, "Parser settings (JSON)")->check(CLI::ExistingFile);
  ingest_cmd->add_option("--created-at", ingest.created_at, "Creation time of a new store, seconds since epoch");

  AnalyzeArgs analyze;
  auto& f = analyze.flags;
  auto* analyze_cmd = app.add_subcommand("analyze", "Diagnose may-fault logs");
  analyze_cmd->add_option("--logs", f.logs, "May-fault log files")->required()->check(CLI::ExistingFile);
  analyze_cmd->add_option("--config", f.configs, "Configuration files (XML or key=value)")->required();
  analyze_cmd->add_option("--decoys", f.decoys, "Fabricated configuration files");
  analyze_cmd->add_option("--descriptions", f.descriptions, "Property catalog (JSON)");
  analyze_cmd->add_option("--store", f.store, "Fault-free template store")->required();
  analyze_cmd->add_option("--tokens", f.tokens, "Weighted anomaly tokens (JSON)");
  analyze_cmd->add_option("--parser-config", f.parser_config, "Parser settings (JSON)");
  analyze_cmd->add_option("--llm", analyze.llm, "LLM backend")->check(CLI::IsMember({"mock", "remote", "heuristic"}));
  analyze_cmd->add_option("--fixtures", f.fixtures, "Scripted responses for --llm mock");
  analyze_cmd->add_option("--fixture-case", f.fixture_case, "Fixture key prefix for --llm mock");
  analyze_cmd->add_flag("--no-verify", f.no_verify, "Accept direct-inference matches without verification");
  analyze_cmd->add_flag("--no-name-match", f.no_name_match, "Disable property-name matching");
  analyze_cmd->add_flag("--no-value-match", f.no_value_match, "Disable value matching");
  analyze_cmd->add_option("--verify-threshold", f.verify_threshold, "Plausibility score cut-off")
      ->check(CLI::Range(0, 100));
  analyze_cmd->add_option("--max-suspects", f.max_suspects, "Suspect limit")->check(CLI::PositiveNumber);
  analyze_cmd->add_option("--hot-k", f.hot_k, "Size of the hot-term filter");
  analyze_cmd->add_option("--report", analyze.report, "Write the report here instead of stdout");
  analyze_cmd->add_option("--format", analyze.format, "Report format")->check(CLI::IsMember({"text", "json"}));
  analyze_cmd->add_option("--seed", analyze.seed, "Accepted for symmetry with bench; analysis draws no randomness");

  auto* bench_cmd = app.add_subcommand("bench", "Mutation benchmark");
  bench_cmd->require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = bench_cmd->add_subcommand("gen", "Generate one mutated case");
  gen_cmd->add_option("--config", gen.config, "Base configuration")->required()->check(CLI::ExistingFile);
  gen_cmd->add_option("--catalog", gen.catalog, "Property catalog (JSON)")->required()->check(CLI::ExistingFile);
  gen_cmd->add_option("--seed", gen.seed, "Generator seed")->required();
  gen_cmd->add_option("--profile", gen.profile, "Symptom profile")
      ->check(CLI::IsMember({"direct", "indirect", "clean"}));
  gen_cmd->add_option("--strategy", gen.strategy, "Pin the trigger's value type")
      ->check(CLI::IsMember({"Positive", "Negative", "Zero", "StringViolation", "Empty"}));
  gen_cmd->add_option("--out", gen.out, "Case directory")->required();

  EvalArgs eval;
  auto* eval_cmd = bench_cmd->add_subcommand("eval", "Evaluate generated cases");
  eval_cmd->add_option("--cases", eval.cases, "Case directory or parent of case directories")
      ->required()
      ->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--llm", eval.llm, "LLM backend")->check(CLI::IsMember({"mock", "remote", "heuristic"}));
  eval_cmd->add_option("--out", eval.out, "Metrics output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : confloc::exit_code_for(confloc::ErrorKind::InvalidArgument);
  }

  try {
    if (ingest_cmd->parsed()) return run_ingest(ingest);
    if (analyze_cmd->parsed()) return run_analyze(analyze);
    if (gen_cmd->parsed()) return run_gen(gen);
    if (eval_cmd->parsed()) return run_eval(eval);
  } catch (const confloc::Error& e) {
    std::cerr << "confloc: " << e.what() << "\n";
    return confloc::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "confloc: internal error: " << e.what() << "\n";
    return confloc::exit_code_for(confloc::ErrorKind::InvalidArgument);
  }
  return 0;
}
