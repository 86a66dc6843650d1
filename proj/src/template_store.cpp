#include "confloc/template_store.hpp"

#include <fstream>
#include <optional>
#include <sstream>
#include <system_error>

#include <unistd.h>
#include <zlib.h>

#include "confloc/error.hpp"

namespace confloc {

namespace {

template <typename T>
void put(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF));
  }
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }

  std::string_view take(std::size_t n) {
    need(n);
    auto out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw Error(ErrorKind::CorruptStore, "unexpected end of store data");
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

std::size_t TemplateStore::ingest(const ParsedLog& parsed) {
  require_fingerprint(parsed.config_fingerprint);
  std::size_t added = 0;
  for (const auto& [hash, tmpl] : parsed.templates) {
    auto [it, inserted] = entries_.try_emplace(hash, StoreEntry{tmpl.pattern, 0});
    it->second.support += tmpl.support;
    if (inserted) ++added;
  }
  return added;
}

void TemplateStore::require_fingerprint(std::uint64_t parser_fingerprint) const {
  if (parser_fingerprint != fingerprint_) {
    throw Error(ErrorKind::ConfigMismatch,
                "store was built with a different parser configuration");
  }
}

std::string TemplateStore::serialize() const {
  std::string out(kMagic);
  put<std::uint32_t>(out, kFormatVersion);
  put<std::uint64_t>(out, fingerprint_);
  put<std::int64_t>(out, created_at_);
  put<std::uint64_t>(out, entries_.size());
  for (const auto& [hash, entry] : entries_) {
    put<std::uint64_t>(out, hash);
    put<std::uint64_t>(out, entry.support);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(entry.pattern.size()));
    out += entry.pattern;
  }
  put<std::uint32_t>(out, crc_of(out));
  return out;
}

TemplateStore TemplateStore::deserialize(std::string_view bytes) {
  Reader r(bytes);
  if (r.take(kMagic.size()) != kMagic) throw Error(ErrorKind::CorruptStore, "bad magic");
  // The checksum goes first so that a flipped bit in the version field
  // reads as damage; a file written by another format version carries a
  // valid checksum of its own.
  if (bytes.size() < r.pos() + 8) throw Error(ErrorKind::CorruptStore, "unexpected end of store data");
  const std::string_view body = bytes.substr(0, bytes.size() - 4);
  Reader tail(bytes.substr(bytes.size() - 4));
  if (tail.get<std::uint32_t>() != crc_of(body)) throw Error(ErrorKind::CorruptStore, "checksum mismatch");
  const auto version = r.get<std::uint32_t>();
  if (version != kFormatVersion) {
    throw Error(ErrorKind::VersionMismatch, "store format version " + std::to_string(version) +
                                                ", expected " + std::to_string(kFormatVersion));
  }

  Reader rb(body);
  rb.take(kMagic.size());
  rb.get<std::uint32_t>();
  const auto fingerprint = rb.get<std::uint64_t>();
  const auto created_at = rb.get<std::int64_t>();
  TemplateStore store(fingerprint, created_at);
  const auto count = rb.get<std::uint64_t>();
  std::optional<TemplateHash> last;
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto hash = rb.get<std::uint64_t>();
    const auto support = rb.get<std::uint64_t>();
    const auto len = rb.get<std::uint32_t>();
    std::string pattern(rb.take(len));
    if (last && hash <= *last) throw Error(ErrorKind::CorruptStore, "entries out of order");
    if (template_hash(pattern) != hash) throw Error(ErrorKind::CorruptStore, "pattern does not match its hash");
    store.entries_.emplace(hash, StoreEntry{std::move(pattern), support});
    last = hash;
  }
  if (rb.pos() != body.size()) throw Error(ErrorKind::CorruptStore, "trailing bytes after entries");
  return store;
}

void TemplateStore::persist(const std::filesystem::path& path) const {
  const std::string bytes = serialize();
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::IoFailure, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorKind::IoFailure, "cannot replace " + path.string());
  }
}

TemplateStore TemplateStore::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

}  // namespace confloc
