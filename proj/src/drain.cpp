#include "drain.hpp"

#include <algorithm>
#include <cctype>

namespace confloc::detail {

namespace {
constexpr const char* kWildcard = "<*>";
}

bool has_digit(const std::string& token) {
  return std::any_of(token.begin(), token.end(),
                     [](unsigned char c) { return std::isdigit(c) != 0; });
}

DrainTree::DrainTree(int depth, double similarity, std::size_t max_children)
    : prefix_layers_(depth > 3 ? static_cast<std::size_t>(depth - 3) : 0),
      similarity_(similarity),
      max_children_(max_children) {}

DrainTree::Node* DrainTree::descend(const std::vector<std::string>& tokens) {
  auto it = root_.children.find(std::to_string(tokens.size()));
  if (it == root_.children.end()) return nullptr;
  Node* cur = it->second.get();
  const std::size_t layers = tokens.empty() ? 0 : std::min(prefix_layers_, tokens.size() - 1);
  for (std::size_t i = 0; i < layers; ++i) {
    auto child = cur->children.find(tokens[i]);
    if (child == cur->children.end()) child = cur->children.find(kWildcard);
    if (child == cur->children.end()) return nullptr;
    cur = child->second.get();
  }
  return cur;
}

void DrainTree::attach(std::size_t cluster_id) {
  const auto& tokens = clusters_[cluster_id];
  auto& by_length = root_.children[std::to_string(tokens.size())];
  if (!by_length) by_length = std::make_unique<Node>();
  Node* cur = by_length.get();

  auto child_or_create = [](Node* node, const std::string& key) {
    auto& slot = node->children[key];
    if (!slot) slot = std::make_unique<Node>();
    return slot.get();
  };

  const std::size_t layers = tokens.empty() ? 0 : std::min(prefix_layers_, tokens.size() - 1);
  for (std::size_t i = 0; i < layers; ++i) {
    const std::string& token = tokens[i];
    if (auto found = cur->children.find(token); found != cur->children.end()) {
      cur = found->second.get();
      continue;
    }
    const bool has_wildcard = cur->children.contains(kWildcard);
    const std::size_t fanout = cur->children.size();
    if (has_digit(token)) {
      cur = child_or_create(cur, kWildcard);
    } else if (has_wildcard) {
      cur = fanout < max_children_ ? child_or_create(cur, token) : child_or_create(cur, kWildcard);
    } else if (fanout + 1 < max_children_) {
      cur = child_or_create(cur, token);
    } else {
      cur = child_or_create(cur, kWildcard);
    }
  }
  cur->cluster_ids.push_back(cluster_id);
}

std::optional<std::size_t> DrainTree::best_match(const Node& leaf,
                                                 const std::vector<std::string>& tokens) const {
  if (tokens.empty()) {
    if (leaf.cluster_ids.empty()) return std::nullopt;
    return leaf.cluster_ids.front();
  }
  double best_sim = -1.0;
  std::size_t best_params = 0;
  std::optional<std::size_t> best;
  for (std::size_t id : leaf.cluster_ids) {
    const auto& pattern = clusters_[id];
    std::size_t same = 0;
    std::size_t params = 0;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
      if (pattern[i] == kWildcard) {
        ++params;
      } else if (pattern[i] == tokens[i]) {
        ++same;
      }
    }
    const double sim = static_cast<double>(same) / static_cast<double>(pattern.size());
    if (sim > best_sim || (sim == best_sim && params > best_params)) {
      best_sim = sim;
      best_params = params;
      best = id;
    }
  }
  if (best && best_sim >= similarity_) return best;
  return std::nullopt;
}

std::size_t DrainTree::add(const std::vector<std::string>& tokens) {
  if (Node* leaf = descend(tokens)) {
    if (auto id = best_match(*leaf, tokens)) {
      auto& pattern = clusters_[*id];
      for (std::size_t i = 0; i < pattern.size(); ++i) {
        if (pattern[i] != tokens[i]) pattern[i] = kWildcard;
      }
      return *id;
    }
  }
  const std::size_t id = clusters_.size();
  clusters_.push_back(tokens);
  attach(id);
  return id;
}

}  // namespace confloc::detail
