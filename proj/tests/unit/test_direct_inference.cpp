#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "confloc/direct_inference.hpp"
#include "oracles.hpp"

using namespace confloc;

namespace {

KeyLogMessage key(std::string message, std::size_t line = 1, std::vector<std::string> stack = {}) {
  KeyLogMessage k;
  k.record.message = std::move(message);
  k.record.stack_lines = std::move(stack);
  k.record.origin = Origin{"f", line};
  k.template_degree = Degree::from_micros(100'000);
  return k;
}

ConfigEntry entry(std::string p, std::string v) { return ConfigEntry{std::move(p), std::move(v), EntrySource::UserDefined}; }

HotTermFilter hot(std::set<std::string> terms) {
  const std::size_t k = terms.size();
  return HotTermFilter{std::move(terms), k};
}

}  // namespace

TEST_CASE("a dotted name in the message is a full-name hit") {
  const auto m = match_names({key("Deleting mapred.local.dir because it is full")},
                             ConfigSettings{{entry("mapred.local.dir", "/tmp/x")}}, hot({}));
  REQUIRE(m.size() == 1);
  const auto& h = std::get<NameHit>(m[0].hit);
  CHECK(h.full_name_hit);
  CHECK(std::set<std::string>(h.matched_segments.begin(), h.matched_segments.end()) ==
        std::set<std::string>{"mapred", "local", "dir"});
}

TEST_CASE("partial fragments hit on non-hot segments") {
  const auto m = match_names({key("mount point name.key has no mount entry")},
                             ConfigSettings{{entry("fs.viewfs.mounttable.default.name.key", "/")}},
                             hot({"fs", "default"}));
  REQUIRE(m.size() == 1);
  const auto& h = std::get<NameHit>(m[0].hit);
  CHECK_FALSE(h.full_name_hit);
  CHECK(h.matched_segments == std::vector<std::string>{"name", "key"});
}

TEST_CASE("unrelated messages match nothing") {
  const ConfigSettings s{{entry("mapred.local.dir", "/x"), entry("dfs.replication", "3")}};
  CHECK(run_direct({key("job completed")}, s, hot({})).empty());
  CHECK(run_direct({}, s, hot({})).empty());
}

TEST_CASE("segments match as whole tokens only") {
  const ConfigSettings s{{entry("dfs.replication", "9")}};
  CHECK(match_names({key("Replication factor low")}, s, hot({"dfs"})).size() == 1);
  CHECK(match_names({key("replicationFactor low")}, s, hot({"dfs"})).empty());
  CHECK(match_names({key("dfsreplication")}, s, hot({})).empty());
  CHECK(contains_token("a.b-c", "b"));
  CHECK_FALSE(contains_token("abc", "b"));
}

TEST_CASE("value matching is a raw substring") {
  const auto zero = match_values({key("Lost heartbeat from [kry1040/72.30.116.100:50020], warn")},
                                 ConfigSettings{{entry("dfs.datanode.du.reserved.pct", "0")}});
  CHECK(zero.size() == 1);

  CHECK(match_values({key("anything at all")}, ConfigSettings{{entry("a", ""), entry("b", "   ")}}).empty());

  const std::string text = "buffer set to 8192 bytes";
  const auto m = match_values({key(text)}, ConfigSettings{{entry("yarn.nodemanager.resource.memory-mb", "8192")}});
  REQUIRE(m.size() == 1);
  const auto& span = std::get<ValueHit>(m[0].hit);
  CHECK(span.start == oracle::find_naive(text, "8192"));
  CHECK(span.end == span.start + 4);
  CHECK(text.substr(span.start, span.end - span.start) == "8192");
}

TEST_CASE("run_direct composes both strategies") {
  const ConfigSettings s{{entry("mapred.local.dir", "/data/local")}};
  const auto both = run_direct({key("mapred.local.dir=/data/local is invalid")}, s, hot({}));
  REQUIRE(both.size() == 2);
  CHECK(both.matches[0].kind() == MatchKind::NameHit);
  CHECK(both.matches[1].kind() == MatchKind::ValueHit);

  const ConfigSettings three{{entry("io.sort.mb", "100"), entry("a.timeout", "7"), entry("b.retries", "42")}};
  const auto m = run_direct({key("sort buffer full after 7 attempts, 42 left")}, three, hot({"io", "mb"}));
  // io.sort.mb by name ("sort"), a.timeout and b.retries by value.
  REQUIRE(m.size() == 3);
  CHECK(m.properties() == std::vector<std::string>{"a.timeout", "b.retries", "io.sort.mb"});
  CHECK(std::count_if(m.matches.begin(), m.matches.end(), [](const MatchedEntry& e) { return e.kind() == MatchKind::ValueHit; }) == 2);

  auto names_only = run_direct({key("mapred.local.dir=/data/local is invalid")}, s, hot({}), DirectOptions{true, false});
  CHECK(names_only.size() == 1);
}

TEST_CASE("ordering follows message origin then property then kind") {
  const ConfigSettings s{{entry("z.alpha", "1"), entry("a.beta", "1")}};
  const auto m = run_direct({key("beta alpha 1", 2), key("alpha 1", 1)}, s, hot({}));
  std::vector<std::tuple<std::size_t, std::string, MatchKind>> got;
  for (const auto& e : m.matches) got.emplace_back(e.key_message.record.origin.line_no, e.entry.property, e.kind());
  auto sorted = got;
  std::sort(sorted.begin(), sorted.end());
  CHECK(got == sorted);
  std::set<std::tuple<std::size_t, std::string, MatchKind>> unique(got.begin(), got.end());
  CHECK(unique.size() == got.size());
}

TEST_CASE("direct inference properties on random inputs") {
  std::mt19937_64 rng(21);
  const std::vector<std::string> words{"dir", "local", "mapred", "sort", "mb", "100", "0", "50020", "heap",
                                       "size", "error", "node", "dfs", "retry", "7"};
  auto phrase = [&](std::size_t n, const char* sep) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s += (s.empty() ? "" : sep) + words[rng() % words.size()];
    return s;
  };
  for (int round = 0; round < 200; ++round) {
    std::vector<KeyLogMessage> msgs;
    for (std::size_t i = 0; i < 1 + rng() % 3; ++i) {
      msgs.push_back(key(phrase(1 + rng() % 6, " "), i + 1, {"\tat " + phrase(3, ".") + "(X.java:1)"}));
    }
    ConfigSettings s;
    std::set<std::string> used;
    for (std::size_t i = 0; i < 1 + rng() % 5; ++i) {
      const std::string name = phrase(1 + rng() % 3, ".");
      if (!used.insert(name).second) continue;
      s.entries.push_back(entry(name, words[rng() % words.size()]));
    }
    const auto filter = hot({"dfs", "mb"});
    const MatchSet before = run_direct(msgs, s, filter);

    CHECK(run_direct(msgs, s, filter) == before);

    for (const auto& m : before.matches) {
      const std::string& text = m.key_message.record.message;
      if (const auto* v = std::get_if<ValueHit>(&m.hit)) {
        CHECK(text.substr(v->start, v->end - v->start) == m.entry.value);
      } else {
        const auto& h = std::get<NameHit>(m.hit);
        for (const auto& seg : h.matched_segments) {
          if (!h.full_name_hit) CHECK(contains_token(text, seg));
        }
        if (h.full_name_hit) {
          CHECK(oracle::find_naive(oracle::lower(text), oracle::lower(m.entry.property)) != std::string::npos);
          std::set<std::string> cold;
          for (const auto& seg : segment_name(m.entry.property)) {
            if (!filter.contains(seg)) cold.insert(seg);
          }
          if (!cold.empty()) CHECK(std::set<std::string>(h.matched_segments.begin(), h.matched_segments.end()) == cold);
        }
      }
    }

    // Adding a property never removes a match.
    ConfigSettings more = s;
    const std::string extra = phrase(2, ".") + ".extra";
    if (!more.contains(extra)) {
      more.entries.push_back(entry(extra, "100"));
      const MatchSet after = run_direct(msgs, more, filter);
      for (const auto& m : before.matches) CHECK(std::find(after.matches.begin(), after.matches.end(), m) != after.matches.end());
    }
  }
}

TEST_CASE("text found only in stack lines never matches") {
  const ConfigSettings s{{entry("mapred.local.dir", "4242")}};
  const auto m = run_direct({key("plain failure", 1, {"\tat mapred.local.dir.Check(4242)"})}, s, hot({}));
  CHECK(m.empty());
}
