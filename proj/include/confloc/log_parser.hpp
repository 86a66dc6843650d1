#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace confloc {

using TemplateHash = std::uint64_t;

inline constexpr std::string_view kPlaceholder = "<*>";

// Log4j/Hadoop style: "2023-08-01 12:00:01,123 INFO Component: message".
inline constexpr std::string_view kDefaultHeaderPattern =
    R"(^(?:(?<timestamp>\d{4}-\d{2}-\d{2}[ T]\d{2}:\d{2}:\d{2}(?:[.,]\d+)?)\s+)?)"
    R"((?:\[[^\]]*\]\s+)?(?<level>TRACE|DEBUG|INFO|WARN|ERROR|FATAL)\s+)"
    R"((?:\[[^\]]*\]\s+)?(?:(?<component>[^\s:]+):\s+)?(?<message>.*)$)";

struct RawLine {
  std::string file_id;
  std::size_t line_no = 0;  // 1-based
  std::string text;
};

enum class LineKind { LogStart, StackContinuation };

struct Origin {
  std::string file_id;
  std::size_t line_no = 0;

  auto operator<=>(const Origin&) const = default;
  bool operator==(const Origin&) const = default;
};

struct LogHeader {
  std::string timestamp;
  std::string level;
  std::string component;

  bool operator==(const LogHeader&) const = default;
};

struct LogRecord {
  std::optional<LogHeader> header;
  std::string message;
  std::vector<std::string> stack_lines;
  TemplateHash template_id = 0;
  std::vector<std::string> variables;
  Origin origin;
  std::string raw;  // original line text, empty for synthetic records

  bool operator==(const LogRecord&) const = default;
};

struct LogTemplate {
  std::string pattern;
  TemplateHash hash = 0;
  std::size_t support = 0;

  bool operator==(const LogTemplate&) const = default;
};

struct ParserConfig {
  int depth = 4;
  double similarity = 0.4;
  std::size_t max_children = 100;
  std::string header_pattern{kDefaultHeaderPattern};

  // Stable identity of the settings that influence template boundaries.
  std::uint64_t fingerprint() const;

  // Validates ranges; throws Error(InvalidArgument).
  void validate() const;

  // JSON object with any of: depth, similarity, max_children, header_pattern.
  static ParserConfig from_json_file(const std::filesystem::path& path);
};

struct ParsedLog {
  std::vector<LogRecord> records;
  std::map<TemplateHash, LogTemplate> templates;
  std::uint64_t config_fingerprint = 0;

  const LogTemplate& template_of(const LogRecord& record) const;
};

// Recognizes header lines with a configurable anchored pattern. The pattern
// may define the named captures timestamp, level, component and message.
class LineClassifier {
 public:
  explicit LineClassifier(std::string_view header_pattern = kDefaultHeaderPattern);
  ~LineClassifier();
  LineClassifier(LineClassifier&&) noexcept;
  LineClassifier& operator=(LineClassifier&&) noexcept;

  LineKind classify(const RawLine& line, std::optional<LineKind> prev = std::nullopt) const;

  // Splits a LogStart line into header and message. Lines that fail the
  // header pattern come back with no header and the whole text as message.
  std::pair<std::optional<LogHeader>, std::string> split(std::string_view text) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

bool is_stack_line(std::string_view text);

// Uses the default header pattern.
LineKind classify_line(const RawLine& line, std::optional<LineKind> prev = std::nullopt);

ParsedLog parse_log_file(std::span<const RawLine> lines, const ParserConfig& config = {});

// Splits text into RawLines (LF or CRLF), repairing invalid UTF-8.
std::vector<RawLine> split_lines(std::string_view text, std::string_view file_id);

ParsedLog parse_log_text(std::string_view text, std::string_view file_id,
                         const ParserConfig& config = {});

// Each file gets its own parse tree; results are merged by template hash.
ParsedLog parse_log_files(std::span<const std::filesystem::path> paths,
                          const ParserConfig& config = {});

ParsedLog merge_parsed(std::span<const ParsedLog> parts);

// Writes records back as log text (raw line followed by its stack lines).
std::string to_log_text(const ParsedLog& parsed);

// Replaces invalid UTF-8 sequences with U+FFFD.
std::string sanitize_utf8(std::string_view bytes);

std::uint64_t fnv1a64(std::string_view bytes);

// Trim, collapse whitespace runs to one space, normalize placeholders to <*>.
std::string canonicalize_template(std::string_view pattern);

// FNV-1a 64 over the canonical form.
TemplateHash template_hash(std::string_view pattern);

std::size_t count_placeholders(std::string_view pattern);

}  // namespace confloc
