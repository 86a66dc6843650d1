#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "confloc/log_parser.hpp"
#include "confloc/template_store.hpp"

namespace confloc {

// Anomaly degree in fixed point, one unit = 1e-6, so sums and ties are exact.
class Degree {
 public:
  static constexpr std::int64_t kScale = 1'000'000;

  constexpr Degree() = default;
  static constexpr Degree from_micros(std::int64_t micros) { return Degree(micros); }
  // Rounds to the nearest 1e-6.
  static Degree from_double(double value);

  constexpr std::int64_t micros() const { return micros_; }
  double value() const { return static_cast<double>(micros_) / kScale; }
  constexpr bool positive() const { return micros_ > 0; }

  constexpr Degree& operator+=(Degree other) {
    micros_ += other.micros_;
    return *this;
  }
  friend constexpr Degree operator+(Degree a, Degree b) { return a += b; }
  constexpr auto operator<=>(const Degree&) const = default;

 private:
  constexpr explicit Degree(std::int64_t micros) : micros_(micros) {}
  std::int64_t micros_ = 0;
};

std::string to_string(Degree degree);

class WeightedTokenSet {
 public:
  WeightedTokenSet() = default;

  // error, exception, invalid, failure, disable, false, fault, warn, because,
  // exit; 0.1 each.
  static WeightedTokenSet defaults();

  // JSON: either [["token", weight], ...], [{"token": t, "weight": w}, ...]
  // or {"token": weight, ...}.
  static WeightedTokenSet from_json_file(const std::filesystem::path& path);

  // Token is lowercased; must be non-empty and whitespace-free, weight >= 0.
  void set(std::string_view token, Degree weight);

  const std::map<std::string, Degree>& tokens() const { return tokens_; }
  Degree total() const;
  bool empty() const { return tokens_.empty(); }

 private:
  std::map<std::string, Degree> tokens_;
};

// True if `token` (lowercase) occurs in `text` case-insensitively with word
// boundaries on both sides. Boundaries are non-alphanumeric characters, the
// ends of the text, and camel-case humps ("NullPointerException" contains
// "exception", "falsehood" does not contain "false").
bool contains_word(std::string_view text, std::string_view token);

// Sum of the weights of tokens present in text; each token counts once.
Degree anomaly_degree(std::string_view text, const WeightedTokenSet& tokens);

struct KeyLogMessage {
  LogRecord record;
  Degree template_degree;
  Degree variable_degree;

  bool operator==(const KeyLogMessage&) const = default;
};

enum class IdentificationKind { FaultFree, Anomalous };

struct IdentificationVerdict {
  IdentificationKind kind = IdentificationKind::FaultFree;
  std::vector<KeyLogMessage> key_messages;
  std::size_t specific_template_count = 0;
};

// Templates of `parsed` whose hash is absent from the store, by ascending hash.
std::vector<LogTemplate> extract_specific(const ParsedLog& parsed, const TemplateStore& store);

// Text scored for a record when picking the key message: its variables and
// stack lines joined by spaces.
std::string variable_text(const LogRecord& record);

std::vector<KeyLogMessage> recover_key_messages(const std::vector<LogTemplate>& specific,
                                                const ParsedLog& parsed,
                                                const WeightedTokenSet& tokens);

IdentificationVerdict classify(const ParsedLog& parsed, const TemplateStore& store,
                               const WeightedTokenSet& tokens);

}  // namespace confloc
