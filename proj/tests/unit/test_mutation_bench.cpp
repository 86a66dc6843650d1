#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <functional>
#include <set>

#include "confloc/error.hpp"
#include "confloc/mutation_bench.hpp"
#include "confloc/pipeline.hpp"
#include "oracles.hpp"

using namespace confloc;

namespace {

const std::filesystem::path kBench = std::filesystem::path(CONFLOC_FIXTURES) / "bench";

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::InvalidArgument;
}

const ConfigSettings& base() {
  static const ConfigSettings s = load_settings(kBench / "base.xml");
  return s;
}

const PropertyCatalog& catalog() {
  static const PropertyCatalog c = PropertyCatalog::load_json(kBench / "catalog.json");
  return c;
}

bool all_letters(const std::string& s) {
  for (char c : s) {
    if (!((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'))) return false;
  }
  return true;
}

// strtod over the whole string; nullopt when it is not a number.
std::optional<double> as_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return std::nullopt;
  return v;
}

EvalResult result(bool entered, bool correct) {
  EvalResult r;
  r.entered_stage2 = entered;
  r.stage2_correct = correct;
  r.stage1_correct = true;
  return r;
}

}  // namespace

TEST_CASE("value mutation shapes") {
  BenchRng rng(1);
  CHECK(mutate_value(MutationStrategy::of(ValueType::Zero), rng) == "0");
  CHECK(mutate_value(MutationStrategy::of(ValueType::Empty), rng).empty());
  const auto s = mutate_value(MutationStrategy::of(ValueType::StringViolation), rng);
  CHECK(s.size() == 5);
  CHECK(all_letters(s));

  BenchRng a(77), b(77);
  CHECK(mutate_value(MutationStrategy::of(ValueType::Positive), a) ==
        mutate_value(MutationStrategy::of(ValueType::Positive), b));
}

TEST_CASE("compliance values parse in range and violations never parse") {
  BenchRng rng(2);
  for (int i = 0; i < 500; ++i) {
    const auto pos = as_number(mutate_value(MutationStrategy::of(ValueType::Positive), rng));
    REQUIRE(pos.has_value());
    CHECK(std::isfinite(*pos));
    CHECK(*pos > 0);
    CHECK(*pos < kFloatBound);
    const auto neg = as_number(mutate_value(MutationStrategy::of(ValueType::Negative), rng));
    REQUIRE(neg.has_value());
    CHECK(*neg < 0);
    CHECK(*neg > -kFloatBound);
    CHECK_FALSE(as_number(mutate_value(MutationStrategy::of(ValueType::StringViolation), rng)).has_value());
  }
}

TEST_CASE("strategy table pairs") {
  for (ValueType v : kAllValueTypes) {
    const auto s = MutationStrategy::of(v);
    CHECK(MutationStrategy::make(s.mutate_type(), v) == s);
    const MutateType other = s.mutate_type() == MutateType::Compliance ? MutateType::Violation : MutateType::Compliance;
    CHECK(kind_of([&] { MutationStrategy::make(other, v); }) == ErrorKind::InvalidArgument);
    CHECK(value_type_from_string(to_string(v)) == v);
  }
  CHECK(MutationStrategy::of(ValueType::Zero).mutate_type() == MutateType::Compliance);
  CHECK(MutationStrategy::of(ValueType::Empty).mutate_type() == MutateType::Violation);
}

TEST_CASE("a universe of ten forces every other property into the decoys") {
  PropertyCatalog ten;
  for (int i = 0; i < 10; ++i) ten.universe.push_back("p.q" + std::to_string(i));
  BenchRng rng(3);
  const auto c = make_mutated_case(ConfigSettings{}, ten, rng);
  std::set<std::string> seen{c.truth.trigger.property};
  for (const auto& d : c.truth.decoys) seen.insert(d.property);
  CHECK(seen.size() == 10);
  CHECK(c.decoys.size() == kDecoyCount);
  for (const auto& d : c.decoys.entries) CHECK(d.source == EntrySource::Fabricated);
  CHECK(c.mutated.find(c.truth.trigger.property)->value == c.truth.trigger.value);

  PropertyCatalog nine;
  nine.universe.assign(ten.universe.begin(), ten.universe.begin() + 9);
  CHECK(kind_of([&] { make_mutated_case(ConfigSettings{}, nine, rng); }) == ErrorKind::UniverseTooSmall);
}

TEST_CASE("the trigger is never a decoy") {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    BenchRng rng(seed);
    const auto c = make_mutated_case(base(), catalog(), rng);
    std::set<std::string> decoys;
    for (const auto& d : c.truth.decoys) decoys.insert(d.property);
    CHECK(decoys.size() == kDecoyCount);
    CHECK(decoys.count(c.truth.trigger.property) == 0);
    // Every base property other than the trigger keeps its value.
    for (const auto& e : base().entries) {
      if (e.property != c.truth.trigger.property) CHECK(c.mutated.find(e.property)->value == e.value);
    }
  }
}

TEST_CASE("cases are reproducible under a seed") {
  const auto a = make_bench_case("x", base(), catalog(), 42, SymptomProfile::IndirectSymptom);
  const auto b = make_bench_case("x", base(), catalog(), 42, SymptomProfile::IndirectSymptom);
  CHECK(a.logs == b.logs);
  CHECK(a.mutation.truth == b.mutation.truth);
  CHECK(truth_json(a) == truth_json(b));
  const auto c = make_bench_case("x", base(), catalog(), 43, SymptomProfile::IndirectSymptom);
  CHECK(c.logs != a.logs);
}

TEST_CASE("direct symptoms name the trigger next to an error token") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto c = make_bench_case("d", base(), catalog(), seed, SymptomProfile::DirectSymptom);
    const std::string name = c.mutation.truth.trigger.property;
    bool found = false;
    for (const auto& r : parse_log_text(c.logs, "f").records) {
      const auto w = oracle::words(r.message);
      bool error = false;
      for (const auto& word : w) error = error || oracle::lower(word) == "error";
      found = found || (error && r.message.find(name) != std::string::npos);
    }
    CHECK(found);
  }
}

TEST_CASE("indirect symptoms never mention the trigger") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto c = make_bench_case("i", base(), catalog(), seed, SymptomProfile::IndirectSymptom);
    const auto& trigger = c.mutation.truth.trigger;
    const auto segments = segment_name(trigger.property);
    TemplateStore store = TemplateStore::for_config(ParserConfig{});
    store.ingest(parse_log_text(c.baseline_logs, "b"));
    const ParsedLog parsed = parse_log_text(c.logs, "f");
    bool has_stack = false;
    for (const auto& r : parsed.records) {
      if (store.contains(r.template_id)) continue;
      if (!anomaly_degree(parsed.template_of(r).pattern, WeightedTokenSet::defaults()).positive()) continue;
      has_stack = has_stack || !r.stack_lines.empty();
      // Token boundaries here ignore camel humps, like the name matcher.
      std::string lowered = oracle::lower(r.message);
      for (const auto& s : segments) {
        const std::string seg = oracle::lower(s);
        for (std::size_t p = lowered.find(seg); p != std::string::npos; p = lowered.find(seg, p + 1)) {
          const bool left = p == 0 || !std::isalnum(static_cast<unsigned char>(lowered[p - 1]));
          const bool right = p + seg.size() == lowered.size() ||
                             !std::isalnum(static_cast<unsigned char>(lowered[p + seg.size()]));
          CHECK_FALSE((left && right));
        }
      }
      if (!trigger.value.empty()) CHECK(oracle::find_naive(r.message, trigger.value) == std::string::npos);
    }
    CHECK(has_stack);
  }
}

TEST_CASE("pool lines carry no anomaly tokens and clean logs are fault-free") {
  const auto pool = TemplatePool::hadoop_default();
  const auto tokens = WeightedTokenSet::defaults();
  for (const auto& p : pool.patterns) CHECK_FALSE(anomaly_degree(p.message, tokens).positive());
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto c = make_bench_case("c", base(), catalog(), seed, SymptomProfile::Clean);
    TemplateStore store = TemplateStore::for_config(ParserConfig{});
    store.ingest(parse_log_text(c.baseline_logs, "b"));
    CHECK(classify(parse_log_text(c.logs, "f"), store, tokens).kind == IdentificationKind::FaultFree);
  }
}

TEST_CASE("accuracy and false-positive ratios") {
  std::vector<EvalResult> rs;
  for (int i = 0; i < 12; ++i) rs.push_back(result(true, true));
  rs.push_back(result(true, false));
  rs.push_back(result(false, false));
  CHECK(accuracy(rs, Phase::Stage2) == Ratio{12, 13});
  CHECK(accuracy(rs, Phase::Stage2).value() == doctest::Approx(12.0 / 13.0).epsilon(1e-12));
  CHECK(accuracy({result(true, true)}, Phase::Stage2).value() == 1.0);
  CHECK(kind_of([] { accuracy({}, Phase::Stage2); }) == ErrorKind::EmptyDenominator);
  CHECK(kind_of([] { accuracy({result(false, false)}, Phase::IndirectInference); }) == ErrorKind::EmptyDenominator);

  CHECK(fp_rate(3) == Ratio{2, 3});
  CHECK(fp_rate(1).value() == 0.0);
  CHECK(fp_rate(12) == Ratio{11, 12});
  CHECK(kind_of([] { fp_rate(3, false); }) == ErrorKind::NotApplicable);
  CHECK(kind_of([] { fp_rate(0); }) == ErrorKind::NotApplicable);
  CHECK(to_string(Phase::DirectInference) == "S2-D-A");
}

TEST_CASE("evaluating written cases") {
  oracle::TempDir dir("bench");
  const std::vector<SymptomProfile> profiles{SymptomProfile::Clean, SymptomProfile::DirectSymptom,
                                             SymptomProfile::IndirectSymptom};
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const std::string id = "case-" + std::to_string(i);
    write_bench_case(make_bench_case(id, base(), catalog(), 100 + i, profiles[i]), dir / id);
  }
  const auto results = evaluate_cases(dir.path());
  REQUIRE(results.size() == 9);
  CHECK(results[0].case_id == "case-0");
  CHECK(accuracy(results, Phase::Stage1).value() == 1.0);
  for (const auto& r : results) {
    if (r.variant == "o" && r.entered_stage2) CHECK(r.stage2_correct);
  }
  const auto metrics = metrics_json(results);
  CHECK(metrics == metrics_json(evaluate_cases(dir.path())));
  CHECK(metrics.find("\"S2-A\"") != std::string::npos);
}
