#include "confloc/config_model.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <nlohmann/json.hpp>

#include "confloc/error.hpp"

namespace confloc {

namespace {

std::string trim(std::string_view s) {
  auto space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!s.empty() && space(s.front())) s.remove_prefix(1);
  while (!s.empty() && space(s.back())) s.remove_suffix(1);
  return std::string(s);
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void add_entry(ConfigSettings& settings, ConfigEntry entry, std::string_view where) {
  if (settings.contains(entry.property)) {
    throw Error(ErrorKind::DuplicateProperty, std::string(where) + ": " + entry.property);
  }
  settings.entries.push_back(std::move(entry));
}

void check_name(const std::string& name, const std::string& locus) {
  try {
    segment_name(name);
  } catch (const Error&) {
    throw Error(ErrorKind::MalformedConfig, locus + ": invalid property name '" + name + "'");
  }
}

ConfigSettings parse_xml(std::string_view text, EntrySource source, std::string_view where) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw Error(ErrorKind::MalformedConfig,
                std::string(where) + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  ConfigSettings settings;
  const auto root = tree.get_child_optional("configuration");
  if (!root) throw Error(ErrorKind::MalformedConfig, std::string(where) + ": missing <configuration> root");
  std::size_t index = 0;
  for (const auto& [tag, node] : *root) {
    if (tag != "property") continue;
    ++index;
    const std::string locus = std::string(where) + ": <property> #" + std::to_string(index);
    const auto name = node.get_optional<std::string>("name");
    if (!name) throw Error(ErrorKind::MalformedConfig, locus + " has no <name>");
    ConfigEntry entry{trim(*name), trim(node.get<std::string>("value", "")), source};
    check_name(entry.property, locus);
    add_entry(settings, std::move(entry), where);
  }
  return settings;
}

ConfigSettings parse_flat(std::string_view text, EntrySource source, std::string_view where) {
  ConfigSettings settings;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const std::string line = trim(text.substr(start, end - start));
    start = end + 1;
    if (line.empty() || line.front() == '#' || line.front() == '!') continue;
    const std::string locus = std::string(where) + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::MalformedConfig, locus + ": expected key=value");
    ConfigEntry entry{trim(std::string_view(line).substr(0, eq)), trim(std::string_view(line).substr(eq + 1)),
                      source};
    check_name(entry.property, locus);
    add_entry(settings, std::move(entry), where);
  }
  return settings;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(EntrySource source) {
  return source == EntrySource::UserDefined ? "user-defined" : "fabricated";
}

const ConfigEntry* ConfigSettings::find(std::string_view property) const {
  auto it = std::find_if(entries.begin(), entries.end(),
                         [&](const ConfigEntry& e) { return e.property == property; });
  return it == entries.end() ? nullptr : &*it;
}

SettingsFormat detect_format(const std::filesystem::path& path) {
  if (to_lower(path.extension().string()) == ".xml") return SettingsFormat::XmlProperties;
  std::ifstream in(path);
  char c = 0;
  while (in.get(c)) {
    if (!std::isspace(static_cast<unsigned char>(c))) break;
  }
  return c == '<' ? SettingsFormat::XmlProperties : SettingsFormat::FlatKeyValue;
}

ConfigSettings parse_settings(std::string_view text, SettingsFormat format, EntrySource source,
                              std::string_view where) {
  return format == SettingsFormat::XmlProperties ? parse_xml(text, source, where)
                                                 : parse_flat(text, source, where);
}

ConfigSettings load_settings(const std::filesystem::path& path, SettingsFormat format, EntrySource source) {
  return parse_settings(read_file(path), format, source, path.string());
}

ConfigSettings load_settings(const std::filesystem::path& path, EntrySource source) {
  return load_settings(path, detect_format(path), source);
}

std::string to_xml(const ConfigSettings& settings) {
  std::string out = "<?xml version=\"1.0\"?>\n<configuration>\n";
  for (const auto& e : settings.entries) {
    out += "  <property>\n    <name>" + xml_escape(e.property) + "</name>\n    <value>" + xml_escape(e.value) +
           "</value>\n  </property>\n";
  }
  out += "</configuration>\n";
  return out;
}

MergedSettings merge_settings(const std::vector<ConfigSettings>& user_files,
                              const std::vector<ConfigSettings>& fabricated_files) {
  MergedSettings merged;
  auto& entries = merged.settings.entries;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& file : user_files) {
    for (const auto& e : file.entries) {
      auto it = index.find(e.property);
      if (it != index.end()) {
        merged.warnings.push_back("property " + e.property + " redefined; later value '" + e.value + "' wins");
        entries[it->second].value = e.value;
        continue;
      }
      index.emplace(e.property, entries.size());
      entries.push_back(ConfigEntry{e.property, e.value, EntrySource::UserDefined});
    }
  }
  for (const auto& file : fabricated_files) {
    for (const auto& e : file.entries) {
      auto it = index.find(e.property);
      if (it != index.end()) {
        if (entries[it->second].source == EntrySource::UserDefined) {
          merged.warnings.push_back("fabricated property " + e.property + " shadowed by user-defined entry");
        } else {
          merged.warnings.push_back("fabricated property " + e.property + " redefined; later value wins");
          entries[it->second].value = e.value;
        }
        continue;
      }
      index.emplace(e.property, entries.size());
      entries.push_back(ConfigEntry{e.property, e.value, EntrySource::Fabricated});
    }
  }
  return merged;
}

std::vector<std::string> segment_name(std::string_view property) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = property.find('.', start);
    const std::string_view piece =
        property.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
    if (piece.empty()) throw Error(ErrorKind::EmptySegment, "empty segment in property name '" + std::string(property) + "'");
    out.emplace_back(piece);
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return out;
}

PropertyCatalog PropertyCatalog::parse_json(std::string_view text, std::string_view where) {
  PropertyCatalog catalog;
  try {
    const auto j = nlohmann::json::parse(text);
    if (!j.is_array()) throw Error(ErrorKind::MalformedConfig, std::string(where) + ": expected a JSON array");
    for (const auto& item : j) {
      const std::string name = item.at("name").get<std::string>();
      segment_name(name);
      if (!catalog.descriptions.contains(name) &&
          std::find(catalog.universe.begin(), catalog.universe.end(), name) == catalog.universe.end()) {
        catalog.universe.push_back(name);
      }
      if (item.contains("description") && !item.at("description").is_null()) {
        catalog.descriptions[name] = item.at("description").get<std::string>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedConfig, std::string(where) + ": " + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::EmptySegment) throw Error(ErrorKind::MalformedConfig, std::string(where) + ": " + e.what());
    throw;
  }
  return catalog;
}

PropertyCatalog PropertyCatalog::load_json(const std::filesystem::path& path) {
  return parse_json(read_file(path), path.string());
}

PropertyCatalog PropertyCatalog::from_settings(const ConfigSettings& settings) {
  PropertyCatalog catalog;
  for (const auto& e : settings.entries) catalog.universe.push_back(e.property);
  return catalog;
}

std::string PropertyCatalog::description_of(std::string_view property) const {
  auto it = descriptions.find(std::string(property));
  return it == descriptions.end() ? std::string() : it->second;
}

std::string PropertyCatalog::to_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& name : universe) {
    j.push_back({{"name", name}, {"description", description_of(name)}});
  }
  return j.dump(2) + "\n";
}

bool HotTermFilter::contains(std::string_view segment) const { return terms.contains(to_lower(segment)); }

HotTermFilter build_hot_filter(const PropertyCatalog& catalog, std::size_t k) {
  std::map<std::string, std::size_t> counts;
  for (const auto& name : catalog.universe) {
    for (const auto& seg : segment_name(name)) ++counts[to_lower(seg)];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  // counts is already in lexicographic order; stable sort keeps it for ties.
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  HotTermFilter filter;
  filter.k = k;
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) filter.terms.insert(ranked[i].first);
  return filter;
}

}  // namespace confloc
