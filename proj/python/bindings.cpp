// Python bindings: the ingest / analyze / bench lifecycle plus a few pure
// helpers. Library errors surface as confloc.ConflocError with a `kind`.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "confloc/error.hpp"
#include "confloc/mutation_bench.hpp"
#include "confloc/pipeline.hpp"

namespace py = pybind11;
using namespace confloc;

namespace {

BackendKind backend_of(const std::string& name) {
  if (name == "mock") return BackendKind::Mock;
  if (name == "remote") return BackendKind::Remote;
  if (name == "heuristic") return BackendKind::Heuristic;
  throw Error(ErrorKind::InvalidArgument, "unknown backend '" + name + "'");
}

py::dict parsed_to_dict(const ParsedLog& p) {
  py::list records;
  for (const auto& r : p.records) {
    py::dict d;
    d["file"] = r.origin.file_id;
    d["line"] = r.origin.line_no;
    d["message"] = r.message;
    d["template"] = p.template_of(r).pattern;
    d["variables"] = r.variables;
    d["stack_lines"] = r.stack_lines;
    records.append(d);
  }
  py::dict templates;
  for (const auto& [hash, t] : p.templates) templates[py::str(t.pattern)] = t.support;
  py::dict out;
  out["records"] = records;
  out["templates"] = templates;
  return out;
}

}  // namespace

PYBIND11_MODULE(_confloc, m) {
  m.doc() = "Configuration-error localization from logs";

  py::exception<Error>(m, "ConflocError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object type = py::module_::import("confloc._confloc").attr("ConflocError");
      py::object instance = type(py::str(e.what()));
      instance.attr("kind") = py::str(std::string(to_string(e.kind())));
      PyErr_SetObject(type.ptr(), instance.ptr());
    }
  });

  m.attr("__version__") = std::string(library_version());

  m.def("parse_log", [](const std::string& text, const std::string& file_id) {
    return parsed_to_dict(parse_log_text(text, file_id));
  }, py::arg("text"), py::arg("file_id") = "<text>", "Mine templates from log text.");

  m.def("template_hash", &template_hash, py::arg("pattern"));

  m.def("anomaly_degree", [](const std::string& text) {
    return anomaly_degree(text, WeightedTokenSet::defaults()).value();
  }, py::arg("text"), "Anomaly degree of a text under the default token weights.");

  m.def("ingest", [](const std::vector<std::filesystem::path>& logs, const std::filesystem::path& store_path,
                     std::int64_t created_at) {
    const auto parsed = parse_log_files(logs);
    TemplateStore store = std::filesystem::exists(store_path) ? TemplateStore::load(store_path)
                                                              : TemplateStore::for_config(ParserConfig{}, created_at);
    const std::size_t added = store.ingest(parsed);
    store.persist(store_path);
    return added;
  }, py::arg("logs"), py::arg("store"), py::arg("created_at") = 0,
     "Add the templates of fault-free logs to a store file; returns the number of new templates.");

  m.def("store_size", [](const std::filesystem::path& path) { return TemplateStore::load(path).size(); },
        py::arg("store"));

  m.def("analyze", [](const std::vector<std::filesystem::path>& logs, const std::vector<std::filesystem::path>& configs,
                      const std::filesystem::path& store, std::optional<std::filesystem::path> descriptions,
                      const std::string& llm, std::optional<std::filesystem::path> fixtures,
                      const std::string& fixture_case, bool no_verify, int verify_threshold, std::size_t max_suspects,
                      const std::vector<std::filesystem::path>& decoys) {
    PipelineFlags f;
    f.logs = logs;
    f.configs = configs;
    f.decoys = decoys;
    f.store = store;
    f.descriptions = std::move(descriptions);
    f.backend = backend_of(llm);
    f.fixtures = std::move(fixtures);
    f.fixture_case = fixture_case;
    f.no_verify = no_verify;
    f.verify_threshold = verify_threshold;
    f.max_suspects = max_suspects;
    const auto outcome = run_analyze(f);
    return py::make_tuple(outcome.exit_code, render(outcome.report, ReportFormat::Json));
  }, py::arg("logs"), py::arg("configs"), py::arg("store"), py::arg("descriptions") = std::nullopt,
     py::arg("llm") = "mock", py::arg("fixtures") = std::nullopt, py::arg("fixture_case") = "",
     py::arg("no_verify") = false, py::arg("verify_threshold") = 50, py::arg("max_suspects") = 3,
     py::arg("decoys") = std::vector<std::filesystem::path>{},
     "Run both stages; returns (exit_code, report_json).");

  m.def("mutate_value", [](const std::string& value_type, std::uint64_t seed) {
    BenchRng rng(seed);
    return mutate_value(MutationStrategy::of(value_type_from_string(value_type)), rng);
  }, py::arg("value_type"), py::arg("seed"));

  m.def("bench_gen", [](const std::filesystem::path& config, const std::filesystem::path& catalog, std::uint64_t seed,
                        const std::string& profile, const std::filesystem::path& out) {
    const auto c = make_bench_case(out.filename().string(), load_settings(config), PropertyCatalog::load_json(catalog),
                                   seed, profile_from_string(profile));
    write_bench_case(c, out);
    return truth_json(c);
  }, py::arg("config"), py::arg("catalog"), py::arg("seed"), py::arg("profile"), py::arg("out"),
     "Write one mutated case directory; returns its truth.json text.");

  m.def("bench_eval", [](const std::filesystem::path& cases, const std::string& llm) {
    return metrics_json(evaluate_cases(cases, EvalOptions{backend_of(llm)}));
  }, py::arg("cases"), py::arg("llm") = "mock", "Evaluate case directories; returns metrics JSON text.");

  m.def("accuracy", [](std::uint64_t correct, std::uint64_t entered) {
    if (correct > entered) throw Error(ErrorKind::InvalidArgument, "more correct cases than entered");
    std::vector<EvalResult> rs(entered);
    for (std::uint64_t i = 0; i < entered; ++i) {
      rs[i].entered_stage2 = true;
      rs[i].stage2_correct = i < correct;
    }
    return accuracy(rs, Phase::Stage2).value();
  }, py::arg("correct"), py::arg("entered"));

  m.def("fp_rate", [](std::size_t n) { return fp_rate(n).value(); }, py::arg("suspect_count"));
}
