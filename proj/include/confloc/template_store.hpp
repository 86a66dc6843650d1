#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "confloc/log_parser.hpp"

namespace confloc {

struct StoreEntry {
  std::string pattern;
  std::uint64_t support = 0;

  bool operator==(const StoreEntry&) const = default;
};

// Hash set of fault-free templates. Membership is exact on the 64-bit hash.
//
// On-disk layout (little endian):
//   magic "CFLSTOR\0" | u32 version | u64 parser fingerprint | i64 created_at |
//   u64 count | count x (u64 hash, u64 support, u32 length, pattern bytes) |
//   u32 CRC-32 of everything before it
// Entries are written in ascending hash order, so equal stores serialize to
// identical bytes.
class TemplateStore {
 public:
  static constexpr std::uint32_t kFormatVersion = 1;
  static constexpr std::string_view kMagic{"CFLSTOR\0", 8};

  explicit TemplateStore(std::uint64_t parser_fingerprint, std::int64_t created_at = 0)
      : fingerprint_(parser_fingerprint), created_at_(created_at) {}

  static TemplateStore for_config(const ParserConfig& config, std::int64_t created_at = 0) {
    return TemplateStore(config.fingerprint(), created_at);
  }

  // Returns the number of templates not previously present.
  std::size_t ingest(const ParsedLog& parsed);

  bool contains(TemplateHash hash) const { return entries_.contains(hash); }
  bool contains_pattern(std::string_view pattern) const { return contains(template_hash(pattern)); }

  // Throws ConfigMismatch when templates were mined under other settings.
  void require_fingerprint(std::uint64_t parser_fingerprint) const;

  const std::map<TemplateHash, StoreEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::uint64_t fingerprint() const { return fingerprint_; }
  std::int64_t created_at() const { return created_at_; }

  std::string serialize() const;
  static TemplateStore deserialize(std::string_view bytes);

  // Atomic: writes a sibling temp file and renames it over the target.
  void persist(const std::filesystem::path& path) const;
  static TemplateStore load(const std::filesystem::path& path);

  bool operator==(const TemplateStore&) const = default;

 private:
  std::uint64_t fingerprint_;
  std::int64_t created_at_;
  std::map<TemplateHash, StoreEntry> entries_;
};

}  // namespace confloc
