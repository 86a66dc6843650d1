#include "confloc/log_parser.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <boost/regex.hpp>
#include <nlohmann/json.hpp>

#include "confloc/error.hpp"
#include "drain.hpp"

namespace confloc {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

bool is_placeholder_token(std::string_view token) {
  if (token.size() < 3 || token.front() != '<' || token.back() != '>') return false;
  return std::all_of(token.begin() + 1, token.end() - 1, [](char c) { return c == '*'; });
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string canonicalize_template(std::string_view pattern) {
  auto tokens = tokenize(pattern);
  for (auto& t : tokens) {
    if (is_placeholder_token(t)) t = std::string(kPlaceholder);
  }
  return join(tokens);
}

TemplateHash template_hash(std::string_view pattern) { return fnv1a64(canonicalize_template(pattern)); }

std::size_t count_placeholders(std::string_view pattern) {
  auto tokens = tokenize(pattern);
  return static_cast<std::size_t>(
      std::count_if(tokens.begin(), tokens.end(), [](const std::string& t) { return t == kPlaceholder; }));
}

std::string sanitize_utf8(std::string_view bytes) {
  static constexpr std::string_view kReplacement = "\xEF\xBF\xBD";
  std::string out;
  out.reserve(bytes.size());
  std::size_t i = 0;
  const std::size_t n = bytes.size();
  auto byte = [&](std::size_t k) { return static_cast<unsigned char>(bytes[k]); };
  auto cont = [&](std::size_t k) { return k < n && (byte(k) & 0xC0) == 0x80; };
  while (i < n) {
    const unsigned char c = byte(i);
    std::size_t len = 0;
    if (c < 0x80) {
      len = 1;
    } else if (c >= 0xC2 && c <= 0xDF) {
      if (cont(i + 1)) len = 2;
    } else if (c >= 0xE0 && c <= 0xEF) {
      if (cont(i + 1) && cont(i + 2)) {
        const unsigned char c1 = byte(i + 1);
        const bool overlong = c == 0xE0 && c1 < 0xA0;
        const bool surrogate = c == 0xED && c1 >= 0xA0;
        if (!overlong && !surrogate) len = 3;
      }
    } else if (c >= 0xF0 && c <= 0xF4) {
      if (cont(i + 1) && cont(i + 2) && cont(i + 3)) {
        const unsigned char c1 = byte(i + 1);
        const bool overlong = c == 0xF0 && c1 < 0x90;
        const bool too_big = c == 0xF4 && c1 >= 0x90;
        if (!overlong && !too_big) len = 4;
      }
    }
    if (len == 0) {
      out += kReplacement;
      ++i;
    } else {
      out.append(bytes.substr(i, len));
      i += len;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::uint64_t ParserConfig::fingerprint() const {
  char sim[32];
  std::snprintf(sim, sizeof sim, "%.6f", similarity);
  std::string key = "confloc-parser/v1|depth=" + std::to_string(depth) + "|sim=" + sim +
                    "|children=" + std::to_string(max_children) + "|header=" + header_pattern;
  return fnv1a64(key);
}

void ParserConfig::validate() const {
  if (depth < 3) throw Error(ErrorKind::InvalidArgument, "parse tree depth must be >= 3");
  if (!(similarity > 0.0 && similarity <= 1.0))
    throw Error(ErrorKind::InvalidArgument, "similarity threshold must be in (0, 1]");
  if (max_children < 2) throw Error(ErrorKind::InvalidArgument, "max children must be >= 2");
  try {
    boost::regex re(header_pattern);
  } catch (const boost::regex_error& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("bad header pattern: ") + e.what());
  }
}

ParserConfig ParserConfig::from_json_file(const std::filesystem::path& path) {
  ParserConfig cfg;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedConfig, path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::MalformedConfig, path.string() + ": expected an object");
  // Allow the parser block to live under "parser" in a broader settings file.
  const nlohmann::json& p = j.contains("parser") ? j.at("parser") : j;
  try {
    if (p.contains("depth")) cfg.depth = p.at("depth").get<int>();
    if (p.contains("similarity")) cfg.similarity = p.at("similarity").get<double>();
    if (p.contains("max_children")) cfg.max_children = p.at("max_children").get<std::size_t>();
    if (p.contains("header_pattern")) cfg.header_pattern = p.at("header_pattern").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedConfig, path.string() + ": " + e.what());
  }
  cfg.validate();
  return cfg;
}

const LogTemplate& ParsedLog::template_of(const LogRecord& record) const {
  return templates.at(record.template_id);
}

// ---------------------------------------------------------------------------

struct LineClassifier::Impl {
  boost::regex header;
  bool has_timestamp = false;
  bool has_level = false;
  bool has_component = false;
  bool has_message = false;
};

LineClassifier::LineClassifier(std::string_view header_pattern) : impl_(std::make_unique<Impl>()) {
  try {
    impl_->header = boost::regex(header_pattern.begin(), header_pattern.end());
  } catch (const boost::regex_error& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("bad header pattern: ") + e.what());
  }
  auto has_group = [&](const char* name) {
    return header_pattern.find(std::string("(?<") + name + ">") != std::string_view::npos;
  };
  impl_->has_timestamp = has_group("timestamp");
  impl_->has_level = has_group("level");
  impl_->has_component = has_group("component");
  impl_->has_message = has_group("message");
}

LineClassifier::~LineClassifier() = default;
LineClassifier::LineClassifier(LineClassifier&&) noexcept = default;
LineClassifier& LineClassifier::operator=(LineClassifier&&) noexcept = default;

bool is_stack_line(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
  const std::string_view rest = text.substr(i);
  if (i > 0 && rest.starts_with("at ")) return true;
  if (rest.starts_with("Caused by:")) return true;
  if (rest.starts_with("... ")) {
    std::string_view tail = rest.substr(4);
    std::size_t d = 0;
    while (d < tail.size() && std::isdigit(static_cast<unsigned char>(tail[d]))) ++d;
    return d > 0 && trim(tail.substr(d)) == "more";
  }
  return false;
}

LineKind LineClassifier::classify(const RawLine& line, std::optional<LineKind> /*prev*/) const {
  return is_stack_line(line.text) ? LineKind::StackContinuation : LineKind::LogStart;
}

std::pair<std::optional<LogHeader>, std::string> LineClassifier::split(std::string_view text) const {
  boost::match_results<std::string_view::const_iterator> m;
  if (!boost::regex_search(text.begin(), text.end(), m, impl_->header, boost::match_continuous)) {
    return {std::nullopt, std::string(trim(text))};
  }
  LogHeader header;
  auto group = [&](const char* name) -> std::string {
    const auto& sub = m[name];
    return sub.matched ? std::string(sub.first, sub.second) : std::string();
  };
  if (impl_->has_timestamp) header.timestamp = group("timestamp");
  if (impl_->has_level) header.level = group("level");
  if (impl_->has_component) header.component = group("component");
  std::string message;
  if (impl_->has_message) {
    message = group("message");
  } else {
    message.assign(m[0].second, text.end());
  }
  return {std::move(header), std::string(trim(message))};
}

LineKind classify_line(const RawLine& line, std::optional<LineKind> prev) {
  static const LineClassifier classifier;
  return classifier.classify(line, prev);
}

// ---------------------------------------------------------------------------

std::vector<RawLine> split_lines(std::string_view text, std::string_view file_id) {
  std::vector<RawLine> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view piece = text.substr(start, end - start);
    if (!piece.empty() && piece.back() == '\r') piece.remove_suffix(1);
    out.push_back(RawLine{std::string(file_id), ++line_no, sanitize_utf8(piece)});
    start = end + 1;
  }
  return out;
}

ParsedLog parse_log_file(std::span<const RawLine> lines, const ParserConfig& config) {
  config.validate();
  LineClassifier classifier(config.header_pattern);
  detail::DrainTree tree(config.depth, config.similarity, config.max_children);

  ParsedLog parsed;
  parsed.config_fingerprint = config.fingerprint();
  std::vector<std::size_t> cluster_of;
  std::vector<std::vector<std::string>> tokens_of;

  std::optional<LineKind> prev;
  for (const RawLine& line : lines) {
    if (trim(line.text).empty()) continue;
    const LineKind kind = classifier.classify(line, prev);
    prev = kind;
    if (kind == LineKind::StackContinuation) {
      if (parsed.records.empty()) {
        LogRecord synthetic;
        synthetic.origin = Origin{line.file_id, line.line_no};
        parsed.records.push_back(std::move(synthetic));
        tokens_of.emplace_back();
        cluster_of.push_back(tree.add(tokens_of.back()));
      }
      std::string_view stack = line.text;
      while (!stack.empty() && is_space(stack.back())) stack.remove_suffix(1);
      parsed.records.back().stack_lines.emplace_back(stack);
      continue;
    }
    auto [header, message] = classifier.split(line.text);
    LogRecord record;
    record.header = std::move(header);
    record.message = std::move(message);
    record.origin = Origin{line.file_id, line.line_no};
    record.raw = line.text;
    tokens_of.push_back(tokenize(record.message));
    cluster_of.push_back(tree.add(tokens_of.back()));
    parsed.records.push_back(std::move(record));
  }

  // Templates are final only after the whole file has been seen.
  for (std::size_t i = 0; i < parsed.records.size(); ++i) {
    const auto& pattern_tokens = tree.cluster_tokens(cluster_of[i]);
    std::string pattern = join(pattern_tokens);
    const TemplateHash hash = fnv1a64(pattern);
    LogRecord& record = parsed.records[i];
    record.template_id = hash;
    for (std::size_t k = 0; k < pattern_tokens.size(); ++k) {
      if (pattern_tokens[k] == kPlaceholder) record.variables.push_back(tokens_of[i][k]);
    }
    auto [it, inserted] = parsed.templates.try_emplace(hash, LogTemplate{std::move(pattern), hash, 0});
    ++it->second.support;
  }
  return parsed;
}

ParsedLog parse_log_text(std::string_view text, std::string_view file_id, const ParserConfig& config) {
  const auto lines = split_lines(text, file_id);
  return parse_log_file(lines, config);
}

ParsedLog merge_parsed(std::span<const ParsedLog> parts) {
  ParsedLog merged;
  if (parts.empty()) return merged;
  merged.config_fingerprint = parts.front().config_fingerprint;
  for (const ParsedLog& part : parts) {
    if (part.config_fingerprint != merged.config_fingerprint)
      throw Error(ErrorKind::ConfigMismatch, "parsed logs were produced under different parser configs");
    merged.records.insert(merged.records.end(), part.records.begin(), part.records.end());
    for (const auto& [hash, tmpl] : part.templates) {
      auto [it, inserted] = merged.templates.try_emplace(hash, tmpl);
      if (!inserted) it->second.support += tmpl.support;
    }
  }
  return merged;
}

ParsedLog parse_log_files(std::span<const std::filesystem::path> paths, const ParserConfig& config) {
  std::vector<ParsedLog> parts;
  parts.reserve(paths.size());
  for (const auto& path : paths) {
    parts.push_back(parse_log_text(read_file(path), path.string(), config));
  }
  if (parts.empty()) {
    ParsedLog empty;
    empty.config_fingerprint = config.fingerprint();
    return empty;
  }
  return merge_parsed(parts);
}

std::string to_log_text(const ParsedLog& parsed) {
  std::string out;
  for (const LogRecord& record : parsed.records) {
    if (!record.raw.empty()) {
      out += record.raw;
      out.push_back('\n');
    }
    for (const auto& stack : record.stack_lines) {
      out += stack;
      out.push_back('\n');
    }
  }
  return out;
}

}  // namespace confloc
