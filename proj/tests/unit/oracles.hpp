#pragma once

// Reference implementations used as test oracles. They are written
// independently of the library (naive loops, no shared helpers).

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace oracle {

// FNV-1a, 64-bit, straight from the published offset basis and prime.
inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// CRC-32 (IEEE, reflected, polynomial 0xEDB88320), bit by bit.
inline std::uint32_t crc32(std::string_view bytes) {
  std::uint32_t crc = 0xFFFFFFFFu;
  for (unsigned char c : bytes) {
    crc ^= c;
    for (int k = 0; k < 8; ++k) crc = (crc >> 1) ^ (0xEDB88320u & (0u - (crc & 1u)));
  }
  return ~crc;
}

// Splits text into words: maximal ASCII alphanumeric runs, further cut at
// camel-case humps ("fooBar" -> foo|Bar, "HTTPServer" -> HTTP|Server).
inline std::vector<std::string> words(std::string_view text) {
  auto alnum = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
  auto up = [](char c) { return c >= 'A' && c <= 'Z'; };
  auto lo = [](char c) { return c >= 'a' && c <= 'z'; };
  std::vector<std::string> out;
  std::string cur;
  for (std::size_t k = 0; k < text.size(); ++k) {
    const char c = text[k];
    if (!alnum(c)) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
      continue;
    }
    if (!cur.empty()) {
      const char p = text[k - 1];
      const bool hump = (lo(p) && up(c)) || (up(p) && up(c) && k + 1 < text.size() && lo(text[k + 1]));
      if (hump) {
        out.push_back(cur);
        cur.clear();
      }
    }
    cur.push_back(c);
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Sum of weights (in micro units) of alphabetic tokens equal to some word.
inline std::int64_t degree_micros(std::string_view text, const std::map<std::string, std::int64_t>& tokens) {
  std::set<std::string> present;
  for (const auto& w : words(text)) present.insert(lower(w));
  std::int64_t sum = 0;
  for (const auto& [t, w] : tokens) {
    if (present.count(t)) sum += w;
  }
  return sum;
}

// First occurrence of needle in hay by exhaustive comparison.
inline std::size_t find_naive(std::string_view hay, std::string_view needle) {
  if (needle.size() > hay.size()) return std::string_view::npos;
  for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i) {
    bool eq = true;
    for (std::size_t j = 0; j < needle.size() && eq; ++j) eq = hay[i + j] == needle[j];
    if (eq) return i;
  }
  return std::string_view::npos;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, std::string_view text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

// Scratch directory removed on scope exit.
class TempDir {
 public:
  explicit TempDir(std::string_view tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("confloc-" + std::string(tag) + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace oracle
