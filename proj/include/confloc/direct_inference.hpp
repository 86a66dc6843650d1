#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "confloc/anomaly.hpp"
#include "confloc/config_model.hpp"

namespace confloc {

struct NameHit {
  std::vector<std::string> matched_segments;
  bool full_name_hit = false;

  bool operator==(const NameHit&) const = default;
};

struct ValueHit {
  std::size_t start = 0;  // byte offsets into the message text
  std::size_t end = 0;

  bool operator==(const ValueHit&) const = default;
};

enum class MatchKind { NameHit, ValueHit };

std::string_view to_string(MatchKind kind);

struct MatchedEntry {
  KeyLogMessage key_message;
  ConfigEntry entry;
  std::variant<NameHit, ValueHit> hit;

  MatchKind kind() const { return std::holds_alternative<NameHit>(hit) ? MatchKind::NameHit : MatchKind::ValueHit; }
  bool operator==(const MatchedEntry&) const = default;
};

struct MatchSet {
  std::vector<MatchedEntry> matches;

  bool empty() const { return matches.empty(); }
  std::size_t size() const { return matches.size(); }
  // Distinct property names, sorted.
  std::vector<std::string> properties() const;
  bool operator==(const MatchSet&) const = default;
};

struct DirectOptions {
  bool match_names = true;
  bool match_values = true;
};

// True if `word` occurs in text case-insensitively with non-alphanumeric
// characters (or the text ends) on both sides.
bool contains_token(std::string_view text, std::string_view word);

// Name segments are matched as whole tokens of the message text, skipping
// hot terms. A verbatim dotted name is a full-name hit. Stack lines are never
// consulted.
std::vector<MatchedEntry> match_names(const std::vector<KeyLogMessage>& messages,
                                      const ConfigSettings& settings, const HotTermFilter& filter);

// Raw substring search of each non-empty trimmed value in the message text.
std::vector<MatchedEntry> match_values(const std::vector<KeyLogMessage>& messages,
                                       const ConfigSettings& settings);

// Union of both strategies, deduplicated and ordered by
// (message origin, property, kind).
MatchSet run_direct(const std::vector<KeyLogMessage>& messages, const ConfigSettings& settings,
                    const HotTermFilter& filter, const DirectOptions& options = {});

}  // namespace confloc
