#include "confloc/llm_gateway.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "confloc/error.hpp"
#include "confloc/prompt_templates.hpp"

namespace confloc {

namespace {

std::string trim(std::string_view s) {
  auto space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!s.empty() && space(s.front())) s.remove_prefix(1);
  while (!s.empty() && space(s.back())) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> lines_of(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

std::string describe_origin(const Origin& o) { return o.file_id + ":" + std::to_string(o.line_no); }

std::string header_prefix(const LogRecord& r) {
  if (!r.header) return {};
  std::string out;
  if (!r.header->level.empty()) out += r.header->level + " ";
  if (!r.header->component.empty()) out += r.header->component + ": ";
  return out;
}

}  // namespace

void CompletionRequest::validate() const {
  if (temperature != 0.0) {
    throw Error(ErrorKind::InvalidRequest, "temperature must be 0 for reproducible completions");
  }
  if (model_id.empty()) throw Error(ErrorKind::InvalidRequest, "model id is empty");
  if (max_retries < 0) throw Error(ErrorKind::InvalidRequest, "max_retries must be >= 0");
}

std::string LlmBackend::complete(const CompletionRequest& request) {
  request.validate();
  return dispatch(request);
}

// --- Mock --------------------------------------------------------------------

MockBackend::MockBackend(std::map<std::string, std::string> scripts, std::string case_name)
    : scripts_(std::move(scripts)), case_name_(std::move(case_name)) {}

MockBackend MockBackend::from_directory(const std::filesystem::path& dir, std::string case_name) {
  if (!std::filesystem::is_directory(dir)) throw Error(ErrorKind::IoFailure, "fixture directory not found: " + dir.string());
  std::map<std::string, std::string> scripts;
  for (const auto& item : std::filesystem::directory_iterator(dir)) {
    if (!item.is_regular_file() || item.path().extension() != ".txt") continue;
    std::ifstream in(item.path(), std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    scripts.emplace(item.path().stem().string(), buf.str());
  }
  return MockBackend(std::move(scripts), std::move(case_name));
}

std::string MockBackend::key_for(std::string_view task) const {
  return case_name_.empty() ? std::string(task) : case_name_ + "-" + std::string(task);
}

std::string MockBackend::dispatch(const CompletionRequest& request) {
  const std::string key = key_for(request.task);
  auto it = scripts_.find(key);
  if (it == scripts_.end()) throw Error(ErrorKind::MissingFixture, "no scripted response for '" + key + "'");
  return it->second;
}

// --- Remote ------------------------------------------------------------------

RemoteConfig RemoteConfig::from_environment() {
  RemoteConfig cfg;
  const char* base = std::getenv("LLM_API_BASE");
  cfg.base_url = base && *base ? base : "https://api.openai.com/v1";
  const char* key = std::getenv("LLM_API_KEY");
  cfg.api_key = key ? key : "";
  return cfg;
}

RemoteBackend::RemoteBackend(RemoteConfig config, Sleeper sleeper)
    : config_(std::move(config)), sleeper_(std::move(sleeper)) {
  if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::string RemoteBackend::dispatch(const CompletionRequest& request) {
  const std::string& url = config_.base_url;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorKind::InvalidRequest, "LLM base URL needs a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  const std::string host = url.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? std::string() : url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

  nlohmann::json body = {
      {"model", request.model_id},
      {"temperature", request.temperature},
      {"messages",
       {{{"role", "system"}, {"content", request.system_prompt}}, {{"role", "user"}, {"content", request.user_prompt}}}},
  };
  const std::string payload = body.dump();

  httplib::Client client(host);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  client.set_write_timeout(config_.timeout);
  if (!config_.api_key.empty()) client.set_bearer_token_auth(config_.api_key);

  auto delay = config_.retry.initial_delay;
  ErrorKind last_kind = ErrorKind::NetworkFailure;
  std::string last_detail;
  for (int attempt = 0; attempt <= request.max_retries; ++attempt) {
    if (attempt > 0) {
      sleeper_(delay);
      auto next = std::chrono::milliseconds(
          static_cast<std::int64_t>(static_cast<double>(delay.count()) * config_.retry.backoff_factor));
      delay = std::min(next, config_.retry.max_delay);
    }
    ++attempts_;
    auto res = client.Post(prefix + "/chat/completions", payload, "application/json");
    if (!res) {
      last_kind = ErrorKind::NetworkFailure;
      last_detail = httplib::to_string(res.error());
      continue;
    }
    if (res->status == 401 || res->status == 403) {
      throw Error(ErrorKind::AuthFailure, "LLM endpoint rejected credentials (HTTP " + std::to_string(res->status) + ")");
    }
    if (res->status == 429) {
      last_kind = ErrorKind::RateLimited;
      last_detail = "HTTP 429";
      continue;
    }
    if (res->status >= 500) {
      last_kind = ErrorKind::NetworkFailure;
      last_detail = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw Error(ErrorKind::InvalidRequest, "LLM endpoint returned HTTP " + std::to_string(res->status));
    }
    try {
      const auto j = nlohmann::json::parse(res->body);
      return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::NetworkFailure, std::string("malformed completion response: ") + e.what());
    }
  }
  throw Error(last_kind, "giving up after " + std::to_string(request.max_retries + 1) + " attempts: " + last_detail);
}

// --- Verification --------------------------------------------------------

std::string build_verify_prompt(const MatchSet& matches, const PropertyCatalog& catalog) {
  std::string out;
  for (std::size_t i = 0; i < matches.matches.size(); ++i) {
    const MatchedEntry& m = matches.matches[i];
    const std::string description = catalog.description_of(m.entry.property);
    out += "ENTRY " + std::to_string(i + 1) + "\n";
    out += "Log message: " + m.key_message.record.message + "\n";
    out += "Property: " + m.entry.property + "\n";
    out += "Value: " + m.entry.value + "\n";
    out += "Description: " + (description.empty() ? std::string("(none)") : description) + "\n";
    if (const auto* name = std::get_if<NameHit>(&m.hit)) {
      std::string segs;
      for (const auto& s : name->matched_segments) segs += (segs.empty() ? "" : ", ") + s;
      out += std::string("Match: name hit (") + (name->full_name_hit ? "full name" : "segments: " + segs) + ")\n";
    } else {
      out += "Match: value hit\n";
    }
    out += "\n";
  }
  return out;
}

VerificationVerdict parse_verification(std::string_view response, std::size_t entry_count, int threshold) {
  static const std::regex line_re(R"(^\s*ENTRY\s+(\d+)\s*:\s*SCORE\s*=\s*(-?\d+)\s*$)", std::regex::icase);
  VerificationVerdict verdict;
  std::vector<std::optional<int>> scores(entry_count);
  std::size_t parsed = 0;
  for (const auto& line : lines_of(response)) {
    if (trim(line).empty()) continue;
    std::smatch m;
    if (!std::regex_match(line, m, line_re)) {
      verdict.warnings.push_back("verification: ignoring unparseable line '" + trim(line) + "'");
      continue;
    }
    const long idx = std::stol(m[1].str());
    long score = std::stol(m[2].str());
    if (idx < 1 || static_cast<std::size_t>(idx) > entry_count) {
      verdict.warnings.push_back("verification: entry " + m[1].str() + " out of range");
      continue;
    }
    if (score < 0 || score > 100) {
      verdict.warnings.push_back("verification: score " + m[2].str() + " clamped to [0, 100]");
      score = std::clamp(score, 0L, 100L);
    }
    ++parsed;
    scores[static_cast<std::size_t>(idx - 1)] = static_cast<int>(score);
  }
  if (parsed == 0) {
    verdict.malformed = true;
    verdict.warnings.push_back("verification: MalformedOutput, no entry scores could be parsed");
  }
  for (std::size_t i = 0; i < entry_count; ++i) {
    if (!scores[i] && !verdict.malformed) {
      verdict.warnings.push_back("verification: no score for entry " + std::to_string(i + 1) + ", using 0");
    }
    const int s = scores[i].value_or(0);
    verdict.per_entry.push_back(EntryScore{i, s, s >= threshold});
    verdict.passed = verdict.passed || s >= threshold;
  }
  return verdict;
}

VerificationVerdict verify(const MatchSet& matches, const PropertyCatalog& catalog, LlmBackend& backend,
                           const LlmOptions& options) {
  if (matches.empty()) throw Error(ErrorKind::InvalidArgument, "verification needs at least one matched entry");
  CompletionRequest request;
  request.task = "verify";
  request.system_prompt = std::string(prompts::kVerifySystem);
  request.user_prompt = build_verify_prompt(matches, catalog);
  request.model_id = options.model_id;
  request.max_retries = options.max_retries;
  const std::string response = backend.complete(request);
  return parse_verification(response, matches.size(), options.verify_threshold);
}

// --- Suspects ----------------------------------------------------------------

std::string_view to_string(SuspectOrigin origin) {
  switch (origin) {
    case SuspectOrigin::Verification: return "verification";
    case SuspectOrigin::DirectInference: return "direct-inference";
    case SuspectOrigin::IndirectInference: return "indirect-inference";
  }
  return "unknown";
}

bool SuspectSet::contains(std::string_view property) const {
  return std::any_of(suspects.begin(), suspects.end(), [&](const Suspect& s) { return s.property == property; });
}

std::string hit_explanation(bool name_hit, bool value_hit) {
  if (name_hit && value_hit) return "name hits; value hits";
  return name_hit ? "name hits" : "value hits";
}

namespace {

struct PropertyTally {
  std::string property;
  std::string value;
  std::set<Origin> messages;
  std::size_t name_hits = 0;
  bool value_hit = false;
  int best_score = -1;
  std::size_t first_index = 0;
};

std::vector<PropertyTally> tally(const MatchSet& matches, const VerificationVerdict* verdict) {
  std::vector<PropertyTally> out;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < matches.matches.size(); ++i) {
    if (verdict && !verdict->per_entry.at(i).plausible) continue;
    const MatchedEntry& m = matches.matches[i];
    auto [it, inserted] = index.try_emplace(m.entry.property, out.size());
    if (inserted) out.push_back(PropertyTally{m.entry.property, m.entry.value, {}, 0, false, -1, i});
    PropertyTally& t = out[it->second];
    t.messages.insert(m.key_message.record.origin);
    if (m.kind() == MatchKind::NameHit) {
      ++t.name_hits;
    } else {
      t.value_hit = true;
    }
    if (verdict) t.best_score = std::max(t.best_score, verdict->per_entry[i].score);
  }
  return out;
}

bool heuristic_order(const PropertyTally& a, const PropertyTally& b) {
  if (a.messages.size() != b.messages.size()) return a.messages.size() > b.messages.size();
  if (a.name_hits != b.name_hits) return a.name_hits > b.name_hits;
  return a.property < b.property;
}

SuspectSet to_suspects(const std::vector<PropertyTally>& ranked, std::size_t max_suspects, SuspectOrigin origin) {
  SuspectSet set;
  set.origin_phase = origin;
  for (const auto& t : ranked) {
    if (set.suspects.size() >= max_suspects) break;
    set.suspects.push_back(
        Suspect{t.property, t.value, hit_explanation(t.name_hits > 0, t.value_hit), set.suspects.size() + 1});
  }
  return set;
}

}  // namespace

SuspectSet suspects_from_verification(const MatchSet& matches, const VerificationVerdict& verdict,
                                      std::size_t max_suspects) {
  auto ranked = tally(matches, &verdict);
  std::stable_sort(ranked.begin(), ranked.end(), [](const PropertyTally& a, const PropertyTally& b) {
    if (a.best_score != b.best_score) return a.best_score > b.best_score;
    return a.first_index < b.first_index;
  });
  return to_suspects(ranked, max_suspects, SuspectOrigin::Verification);
}

SuspectSet suspects_from_matches(const MatchSet& matches, std::size_t max_suspects) {
  auto ranked = tally(matches, nullptr);
  std::sort(ranked.begin(), ranked.end(), heuristic_order);
  return to_suspects(ranked, max_suspects, SuspectOrigin::DirectInference);
}

SuspectSet heuristic_verify(const MatchSet& matches) {
  if (matches.empty()) throw Error(ErrorKind::InvalidArgument, "heuristic verification needs at least one match");
  auto ranked = tally(matches, nullptr);
  std::sort(ranked.begin(), ranked.end(), heuristic_order);
  const auto& top = ranked.front();
  SuspectSet set;
  set.origin_phase = SuspectOrigin::Verification;
  set.suspects.push_back(Suspect{top.property, top.value, "heuristic: most anomalous log matches", 1});
  return set;
}

// --- Indirect inference --------------------------------------------------

std::string indirect_system_prompt(std::size_t max_suspects) {
  std::string prompt(prompts::kIndirectSystem);
  const std::string marker = "{{MAX_SUSPECTS}}";
  for (auto pos = prompt.find(marker); pos != std::string::npos; pos = prompt.find(marker)) {
    prompt.replace(pos, marker.size(), std::to_string(max_suspects));
  }
  return prompt;
}

std::string build_indirect_prompt(const std::vector<KeyLogMessage>& messages, const ConfigSettings& settings,
                                  const PropertyCatalog& catalog, std::size_t prompt_char_cap,
                                  std::vector<std::string>* warnings) {
  std::string tail = "CONFIGURATION SETTINGS\n";
  for (const auto& e : settings.entries) tail += e.property + "=" + e.value + "\n";
  tail += "\nPROPERTY DESCRIPTIONS\n";
  for (const auto& e : settings.entries) {
    const std::string d = catalog.description_of(e.property);
    if (!d.empty()) tail += e.property + ": " + d + "\n";
  }

  std::vector<const KeyLogMessage*> kept;
  for (const auto& m : messages) kept.push_back(&m);

  auto render = [&]() {
    std::string out = "KEY LOG MESSAGES\n";
    for (std::size_t i = 0; i < kept.size(); ++i) {
      const LogRecord& r = kept[i]->record;
      out += "[" + std::to_string(i + 1) + "] (" + describe_origin(r.origin) + ") " + header_prefix(r) + r.message + "\n";
      for (const auto& s : r.stack_lines) out += "    " + trim(s) + "\n";
    }
    return out + "\n" + tail;
  };

  std::string prompt = render();
  while (prompt.size() > prompt_char_cap && kept.size() > 1) {
    auto oldest = std::min_element(kept.begin(), kept.end(), [](const KeyLogMessage* a, const KeyLogMessage* b) {
      return a->record.origin < b->record.origin;
    });
    if (warnings) {
      warnings->push_back("indirect inference: prompt cap reached, evicted key message at " +
                          describe_origin((*oldest)->record.origin));
    }
    kept.erase(oldest);
    prompt = render();
  }
  return prompt;
}

IndirectResult parse_indirect(std::string_view response, const ConfigSettings& settings, std::size_t max_suspects) {
  static const std::regex line_re(R"(^\s*SUSPECT\s+(\d+)\s*:\s*([^|]*?)\s*\|\s*(.*?)\s*$)", std::regex::icase);
  IndirectResult result;
  result.suspects.origin_phase = SuspectOrigin::IndirectInference;

  struct Candidate {
    long rank;
    std::size_t order;
    std::string property;
    std::string explanation;
  };
  std::vector<Candidate> candidates;
  for (const auto& line : lines_of(response)) {
    if (trim(line).empty()) continue;
    std::smatch m;
    if (!std::regex_match(line, m, line_re)) {
      result.warnings.push_back("indirect inference: ignoring unparseable line '" + trim(line) + "'");
      continue;
    }
    candidates.push_back(Candidate{std::stol(m[1].str()), candidates.size(), trim(m[2].str()), trim(m[3].str())});
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.rank < b.rank; });

  for (const auto& c : candidates) {
    const ConfigEntry* entry = settings.find(c.property);
    if (!entry) {
      result.warnings.push_back("indirect inference: dropped suspect '" + c.property + "' (not in settings)");
      continue;
    }
    if (c.explanation.empty()) {
      result.warnings.push_back("indirect inference: dropped suspect '" + c.property + "' (no explanation)");
      continue;
    }
    if (result.suspects.contains(c.property)) continue;
    if (result.suspects.suspects.size() >= max_suspects) {
      result.warnings.push_back("indirect inference: dropped suspect '" + c.property + "' (over the limit of " +
                                std::to_string(max_suspects) + ")");
      continue;
    }
    result.suspects.suspects.push_back(
        Suspect{entry->property, entry->value, c.explanation, result.suspects.suspects.size() + 1});
  }
  result.inconclusive = result.suspects.empty();
  return result;
}

IndirectResult infer_indirect(const std::vector<KeyLogMessage>& messages, const ConfigSettings& settings,
                              const PropertyCatalog& catalog, LlmBackend& backend, const LlmOptions& options) {
  std::vector<std::string> warnings;
  CompletionRequest request;
  request.task = "indirect";
  request.system_prompt = indirect_system_prompt(options.max_suspects);
  request.user_prompt = build_indirect_prompt(messages, settings, catalog, options.prompt_char_cap, &warnings);
  request.model_id = options.model_id;
  request.max_retries = options.max_retries;
  const std::string response = backend.complete(request);
  IndirectResult result = parse_indirect(response, settings, options.max_suspects);
  warnings.insert(warnings.end(), result.warnings.begin(), result.warnings.end());
  result.warnings = std::move(warnings);
  return result;
}

}  // namespace confloc
