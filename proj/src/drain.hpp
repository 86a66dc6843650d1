#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace confloc::detail {

// Fixed-depth parse tree clustering of tokenized messages. The first layer
// below the root keys on token count, the next (depth - 3) layers key on
// leading tokens, and leaves hold candidate clusters.
class DrainTree {
 public:
  DrainTree(int depth, double similarity, std::size_t max_children);

  // Returns the cluster id the message was assigned to.
  std::size_t add(const std::vector<std::string>& tokens);

  const std::vector<std::string>& cluster_tokens(std::size_t id) const { return clusters_[id]; }
  std::size_t cluster_count() const { return clusters_.size(); }

 private:
  struct Node {
    std::map<std::string, std::unique_ptr<Node>> children;
    std::vector<std::size_t> cluster_ids;
  };

  Node* descend(const std::vector<std::string>& tokens);
  void attach(std::size_t cluster_id);
  std::optional<std::size_t> best_match(const Node& leaf, const std::vector<std::string>& tokens) const;

  std::size_t prefix_layers_;
  double similarity_;
  std::size_t max_children_;
  Node root_;
  std::vector<std::vector<std::string>> clusters_;
};

bool has_digit(const std::string& token);

}  // namespace confloc::detail
