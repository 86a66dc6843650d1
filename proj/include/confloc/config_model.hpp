#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace confloc {

enum class EntrySource { UserDefined, Fabricated };

std::string_view to_string(EntrySource source);

struct ConfigEntry {
  std::string property;
  std::string value;
  EntrySource source = EntrySource::UserDefined;

  bool operator==(const ConfigEntry&) const = default;
};

struct ConfigSettings {
  std::vector<ConfigEntry> entries;

  const ConfigEntry* find(std::string_view property) const;
  bool contains(std::string_view property) const { return find(property) != nullptr; }
  std::size_t size() const { return entries.size(); }

  bool operator==(const ConfigSettings&) const = default;
};

enum class SettingsFormat { XmlProperties, FlatKeyValue };

// ".xml" or a leading '<' means XmlProperties.
SettingsFormat detect_format(const std::filesystem::path& path);

ConfigSettings parse_settings(std::string_view text, SettingsFormat format,
                              EntrySource source = EntrySource::UserDefined,
                              std::string_view where = "<input>");

ConfigSettings load_settings(const std::filesystem::path& path, SettingsFormat format,
                             EntrySource source = EntrySource::UserDefined);
ConfigSettings load_settings(const std::filesystem::path& path,
                             EntrySource source = EntrySource::UserDefined);

// Hadoop-style <configuration><property><name/><value/></property>...
std::string to_xml(const ConfigSettings& settings);

struct MergedSettings {
  ConfigSettings settings;
  std::vector<std::string> warnings;
};

// Later user files override earlier ones (with a warning). Fabricated entries
// are appended unless a user-defined entry already has that name.
MergedSettings merge_settings(const std::vector<ConfigSettings>& user_files,
                              const std::vector<ConfigSettings>& fabricated_files = {});

// Splits on '.', keeping case. Throws EmptySegment.
std::vector<std::string> segment_name(std::string_view property);

struct PropertyCatalog {
  std::map<std::string, std::string> descriptions;
  std::vector<std::string> universe;

  // JSON array of {"name": ..., "description": ...}.
  static PropertyCatalog load_json(const std::filesystem::path& path);
  static PropertyCatalog parse_json(std::string_view text, std::string_view where = "<input>");
  // Universe only, no descriptions.
  static PropertyCatalog from_settings(const ConfigSettings& settings);

  std::string description_of(std::string_view property) const;
  std::string to_json() const;
};

struct HotTermFilter {
  std::set<std::string> terms;  // lowercase
  std::size_t k = 20;

  bool contains(std::string_view segment) const;
};

// Top-k most frequent lowercase name segments over the catalog universe,
// ties broken lexicographically.
HotTermFilter build_hot_filter(const PropertyCatalog& catalog, std::size_t k = 20);

}  // namespace confloc
