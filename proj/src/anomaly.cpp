#include "confloc/anomaly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "confloc/error.hpp"

namespace confloc {

namespace {

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
char lower(char c) { return is_upper(c) ? static_cast<char>(c - 'A' + 'a') : c; }

// Camel-case hump between k-1 and k: "aB", or "ABc" splitting before B.
bool camel_break(std::string_view t, std::size_t k) {
  if (k == 0 || k >= t.size()) return false;
  if (is_lower(t[k - 1]) && is_upper(t[k])) return true;
  return is_upper(t[k - 1]) && is_upper(t[k]) && k + 1 < t.size() && is_lower(t[k + 1]);
}

bool boundary(std::string_view t, std::size_t k) {
  if (k == 0 || k == t.size()) return true;
  if (!is_alnum(t[k - 1]) || !is_alnum(t[k])) return true;
  return camel_break(t, k);
}

Degree parse_weight(const nlohmann::json& w, const std::string& where) {
  if (!w.is_number()) throw Error(ErrorKind::MalformedConfig, where + ": weight must be a number");
  const double v = w.get<double>();
  if (!std::isfinite(v) || v < 0) throw Error(ErrorKind::MalformedConfig, where + ": weight must be >= 0");
  return Degree::from_double(v);
}

}  // namespace

Degree Degree::from_double(double value) {
  return Degree(static_cast<std::int64_t>(std::llround(value * static_cast<double>(kScale))));
}

std::string to_string(Degree degree) {
  char buf[48];
  const std::int64_t m = degree.micros();
  const std::int64_t whole = m / Degree::kScale;
  std::int64_t frac = std::llabs(m % Degree::kScale);
  std::snprintf(buf, sizeof buf, "%s%lld.%06lld", (m < 0 && whole == 0) ? "-" : "",
                static_cast<long long>(whole), static_cast<long long>(frac));
  std::string s(buf);
  while (s.back() == '0' && s[s.size() - 2] != '.') s.pop_back();
  return s;
}

WeightedTokenSet WeightedTokenSet::defaults() {
  WeightedTokenSet set;
  for (const char* t : {"error", "exception", "invalid", "failure", "disable", "false", "fault",
                        "warn", "because", "exit"}) {
    set.set(t, Degree::from_micros(100'000));
  }
  return set;
}

void WeightedTokenSet::set(std::string_view token, Degree weight) {
  if (token.empty()) throw Error(ErrorKind::InvalidArgument, "empty anomaly token");
  if (weight.micros() < 0) throw Error(ErrorKind::InvalidArgument, "negative weight for token " + std::string(token));
  std::string key;
  for (char c : token) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      throw Error(ErrorKind::InvalidArgument, "anomaly token contains whitespace: " + std::string(token));
    }
    key.push_back(lower(c));
  }
  tokens_[key] = weight;
}

Degree WeightedTokenSet::total() const {
  Degree sum;
  for (const auto& [token, w] : tokens_) sum += w;
  return sum;
}

WeightedTokenSet WeightedTokenSet::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot read " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedConfig, path.string() + ": " + e.what());
  }
  const std::string where = path.string();
  WeightedTokenSet set;
  try {
    if (j.is_object()) {
      for (const auto& [token, w] : j.items()) set.set(token, parse_weight(w, where));
    } else if (j.is_array()) {
      for (const auto& item : j) {
        if (item.is_array() && item.size() == 2) {
          set.set(item.at(0).get<std::string>(), parse_weight(item.at(1), where));
        } else if (item.is_object()) {
          set.set(item.at("token").get<std::string>(), parse_weight(item.at("weight"), where));
        } else {
          throw Error(ErrorKind::MalformedConfig, where + ": expected [token, weight] pairs");
        }
      }
    } else {
      throw Error(ErrorKind::MalformedConfig, where + ": expected an array or object");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedConfig, where + ": " + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidArgument) throw Error(ErrorKind::MalformedConfig, where + ": " + e.what());
    throw;
  }
  return set;
}

bool contains_word(std::string_view text, std::string_view token) {
  if (token.empty() || token.size() > text.size()) return false;
  for (std::size_t start = 0; start + token.size() <= text.size(); ++start) {
    bool equal = true;
    for (std::size_t i = 0; i < token.size(); ++i) {
      if (lower(text[start + i]) != token[i]) {
        equal = false;
        break;
      }
    }
    if (!equal) continue;
    const std::size_t end = start + token.size();
    if (!boundary(text, start) || !boundary(text, end)) continue;
    bool split_inside = false;
    for (std::size_t k = start + 1; k < end && !split_inside; ++k) {
      split_inside = is_alnum(text[k - 1]) && is_alnum(text[k]) && camel_break(text, k);
    }
    if (!split_inside) return true;
  }
  return false;
}

Degree anomaly_degree(std::string_view text, const WeightedTokenSet& tokens) {
  Degree d;
  for (const auto& [token, weight] : tokens.tokens()) {
    if (contains_word(text, token)) d += weight;
  }
  return d;
}

std::vector<LogTemplate> extract_specific(const ParsedLog& parsed, const TemplateStore& store) {
  store.require_fingerprint(parsed.config_fingerprint);
  std::vector<LogTemplate> out;
  for (const auto& [hash, tmpl] : parsed.templates) {
    if (!store.contains(hash)) out.push_back(tmpl);
  }
  return out;
}

std::string variable_text(const LogRecord& record) {
  std::string out;
  auto append = [&](const std::string& s) {
    if (!out.empty()) out.push_back(' ');
    out += s;
  };
  for (const auto& v : record.variables) append(v);
  for (const auto& s : record.stack_lines) append(s);
  return out;
}

std::vector<KeyLogMessage> recover_key_messages(const std::vector<LogTemplate>& specific,
                                                const ParsedLog& parsed,
                                                const WeightedTokenSet& tokens) {
  std::unordered_map<TemplateHash, Degree> scored;
  for (const auto& tmpl : specific) {
    const Degree d = anomaly_degree(tmpl.pattern, tokens);
    if (d.positive()) scored.emplace(tmpl.hash, d);
  }

  std::unordered_map<TemplateHash, KeyLogMessage> best;
  for (const LogRecord& record : parsed.records) {
    auto it = scored.find(record.template_id);
    if (it == scored.end()) continue;
    const Degree vd = anomaly_degree(variable_text(record), tokens);
    auto cur = best.find(record.template_id);
    if (cur == best.end()) {
      best.emplace(record.template_id, KeyLogMessage{record, it->second, vd});
    } else if (vd > cur->second.variable_degree ||
               (vd == cur->second.variable_degree && record.origin < cur->second.record.origin)) {
      cur->second = KeyLogMessage{record, it->second, vd};
    }
  }

  std::vector<KeyLogMessage> out;
  out.reserve(best.size());
  for (auto& [hash, msg] : best) out.push_back(std::move(msg));
  std::sort(out.begin(), out.end(), [](const KeyLogMessage& a, const KeyLogMessage& b) {
    if (a.template_degree != b.template_degree) return a.template_degree > b.template_degree;
    return a.record.origin < b.record.origin;
  });
  return out;
}

IdentificationVerdict classify(const ParsedLog& parsed, const TemplateStore& store,
                               const WeightedTokenSet& tokens) {
  IdentificationVerdict verdict;
  const auto specific = extract_specific(parsed, store);
  verdict.specific_template_count = specific.size();
  verdict.key_messages = recover_key_messages(specific, parsed, tokens);
  verdict.kind = verdict.key_messages.empty() ? IdentificationKind::FaultFree : IdentificationKind::Anomalous;
  return verdict;
}

}  // namespace confloc
