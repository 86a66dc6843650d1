#include "confloc/direct_inference.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <tuple>

namespace confloc {

namespace {

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

std::size_t find_ci(std::string_view text, std::string_view needle, std::size_t from) {
  if (needle.empty() || needle.size() > text.size()) return std::string_view::npos;
  for (std::size_t i = from; i + needle.size() <= text.size(); ++i) {
    bool eq = true;
    for (std::size_t k = 0; k < needle.size(); ++k) {
      if (lower(text[i + k]) != lower(needle[k])) {
        eq = false;
        break;
      }
    }
    if (eq) return i;
  }
  return std::string_view::npos;
}

}  // namespace

std::string_view to_string(MatchKind kind) { return kind == MatchKind::NameHit ? "name hit" : "value hit"; }

std::vector<std::string> MatchSet::properties() const {
  std::set<std::string> names;
  for (const auto& m : matches) names.insert(m.entry.property);
  return {names.begin(), names.end()};
}

bool contains_token(std::string_view text, std::string_view word) {
  for (std::size_t pos = find_ci(text, word, 0); pos != std::string_view::npos;
       pos = find_ci(text, word, pos + 1)) {
    const std::size_t end = pos + word.size();
    const bool left = pos == 0 || !is_alnum(text[pos - 1]) || !is_alnum(text[pos]);
    const bool right = end == text.size() || !is_alnum(text[end]) || !is_alnum(text[end - 1]);
    if (left && right) return true;
  }
  return false;
}

std::vector<MatchedEntry> match_names(const std::vector<KeyLogMessage>& messages,
                                      const ConfigSettings& settings, const HotTermFilter& filter) {
  std::vector<MatchedEntry> out;
  for (const auto& msg : messages) {
    const std::string& text = msg.record.message;
    for (const auto& entry : settings.entries) {
      const auto segments = segment_name(entry.property);
      std::vector<std::string> cold;
      for (const auto& seg : segments) {
        if (!filter.contains(seg) && std::find(cold.begin(), cold.end(), seg) == cold.end()) cold.push_back(seg);
      }
      NameHit hit;
      if (find_ci(text, entry.property, 0) != std::string_view::npos) {
        hit.full_name_hit = true;
        // A name made only of hot terms still counts when spelled out in full.
        hit.matched_segments = cold.empty() ? segments : cold;
      } else {
        for (const auto& seg : cold) {
          if (contains_token(text, seg)) hit.matched_segments.push_back(seg);
        }
      }
      if (!hit.matched_segments.empty()) out.push_back(MatchedEntry{msg, entry, std::move(hit)});
    }
  }
  return out;
}

std::vector<MatchedEntry> match_values(const std::vector<KeyLogMessage>& messages,
                                       const ConfigSettings& settings) {
  std::vector<MatchedEntry> out;
  for (const auto& msg : messages) {
    const std::string& text = msg.record.message;
    for (const auto& entry : settings.entries) {
      std::string_view value = entry.value;
      while (!value.empty() && std::isspace(static_cast<unsigned char>(value.front()))) value.remove_prefix(1);
      while (!value.empty() && std::isspace(static_cast<unsigned char>(value.back()))) value.remove_suffix(1);
      if (value.empty()) continue;
      const std::size_t pos = text.find(value);
      if (pos == std::string::npos) continue;
      out.push_back(MatchedEntry{msg, entry, ValueHit{pos, pos + value.size()}});
    }
  }
  return out;
}

MatchSet run_direct(const std::vector<KeyLogMessage>& messages, const ConfigSettings& settings,
                    const HotTermFilter& filter, const DirectOptions& options) {
  MatchSet set;
  if (options.match_names) set.matches = match_names(messages, settings, filter);
  if (options.match_values) {
    auto values = match_values(messages, settings);
    set.matches.insert(set.matches.end(), std::make_move_iterator(values.begin()),
                       std::make_move_iterator(values.end()));
  }
  auto key = [](const MatchedEntry& m) {
    return std::tie(m.key_message.record.origin, m.entry.property);
  };
  std::stable_sort(set.matches.begin(), set.matches.end(), [&](const MatchedEntry& a, const MatchedEntry& b) {
    if (key(a) != key(b)) return key(a) < key(b);
    return a.kind() < b.kind();
  });
  auto same = [&](const MatchedEntry& a, const MatchedEntry& b) { return key(a) == key(b) && a.kind() == b.kind(); };
  set.matches.erase(std::unique(set.matches.begin(), set.matches.end(), same), set.matches.end());
  return set;
}

}  // namespace confloc
