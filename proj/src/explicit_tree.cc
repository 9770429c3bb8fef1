// Copyright 2026 The auctionwire Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "auctionwire/explicit_tree.h"

#include <algorithm>
#include <functional>

namespace auctionwire {

ExplicitTree::ExplicitTree(std::vector<TreeNode> nodes, int root)
    : nodes_(std::make_shared<const std::vector<TreeNode>>(std::move(nodes))),
      root_(root) {
  const int n = size();
  if (root_ < 0 || root_ >= n) throw std::invalid_argument("bad root id");
  std::vector<int> parents(n, 0);
  for (const auto& node : *nodes_) {
    for (int c : node.children) {
      if (c < 0 || c >= n) throw std::invalid_argument("bad child id");
      ++parents[c];
    }
    switch (node.kind) {
      case NodeKind::kLeaf:
        if (!node.children.empty()) throw std::invalid_argument("leaf with children");
        break;
      case NodeKind::kBuyer:
        if (node.children.empty() || node.children.size() > 2) {
          throw std::invalid_argument("buyer nodes have one or two children");
        }
        break;
      case NodeKind::kChance: {
        if (node.children.empty() || node.weights.size() != node.children.size()) {
          throw std::invalid_argument("chance node needs one weight per child");
        }
        Rational total = 0;
        for (const auto& w : node.weights) {
          if (w < 0) throw std::invalid_argument("negative chance weight");
          total += w;
        }
        if (total != 1) throw std::invalid_argument("chance weights must sum to 1");
        break;
      }
    }
  }
  if (parents[root_] != 0) throw std::invalid_argument("root has a parent");
  // Every reachable node must have exactly one parent (a tree, no cycles).
  std::vector<bool> seen(n, false);
  std::vector<int> stack = {root_};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    if (seen[id]) throw std::invalid_argument("nodes must form a tree");
    seen[id] = true;
    for (int c : (*nodes_)[id].children) {
      if (parents[c] != 1) throw std::invalid_argument("nodes must form a tree");
      stack.push_back(c);
    }
  }
}

ExplicitTree ExplicitTree::leaf(Bundle alloc_mask, Rational payment) {
  TreeNode node;
  node.alloc_mask = alloc_mask;
  node.payment = std::move(payment);
  return ExplicitTree({node});
}

std::unique_ptr<ProtocolState> ExplicitTree::root() const {
  return std::make_unique<ExplicitTreeState>(nodes_, root_);
}

int ExplicitTree::depth() const {
  std::function<int(int)> d = [&](int id) {
    int best = 0;
    for (int c : node(id).children) best = std::max(best, 1 + d(c));
    return best;
  };
  return d(root_);
}

int ExplicitTree::chance_count() const {
  std::function<int(int)> count = [&](int id) {
    int total = node(id).kind == NodeKind::kChance ? 1 : 0;
    for (int c : node(id).children) total += count(c);
    return total;
  };
  return count(root_);
}

int ExplicitTree::leaf_count() const {
  std::function<int(int)> count = [&](int id) {
    if (node(id).kind == NodeKind::kLeaf) return 1;
    int total = 0;
    for (int c : node(id).children) total += count(c);
    return total;
  };
  return count(root_);
}

unsigned ExplicitTreeState::allowed() const {
  return node().children.size() == 1 ? kAllowZero : (kAllowZero | kAllowOne);
}

ChanceSpec ExplicitTreeState::chance() const {
  const auto& n = node();
  if (n.kind != NodeKind::kChance) throw std::logic_error("not a chance node");
  Rational rest = 0;
  for (std::size_t i = branch_; i < n.weights.size(); ++i) rest += n.weights[i];
  if (rest == 0 || branch_ + 1 == static_cast<int>(n.children.size())) {
    return ChanceSpec::weighted(Rational(1));
  }
  return ChanceSpec::weighted(n.weights[branch_] / rest);
}

void ExplicitTreeState::apply(int bit) {
  const auto& n = node();
  switch (n.kind) {
    case NodeKind::kLeaf:
      throw std::logic_error("no moves at a leaf");
    case NodeKind::kBuyer:
      if (bit < 0 || bit >= static_cast<int>(n.children.size())) {
        throw InfeasibleMove("no such buyer move");
      }
      id_ = n.children[bit];
      return;
    case NodeKind::kChance: {
      const int last = static_cast<int>(n.children.size()) - 1;
      if (bit == 0 || branch_ + 1 >= last) {
        id_ = n.children[bit == 0 ? branch_ : last];
        branch_ = 0;
      } else {
        ++branch_;
      }
      return;
    }
  }
}

Outcome ExplicitTreeState::outcome() const {
  const auto& n = node();
  if (n.kind != NodeKind::kLeaf) throw std::logic_error("not a leaf");
  return Outcome{n.alloc_mask, n.payment, false};
}

int NodeStrategy::choose(const ProtocolState& state, const History&) {
  const auto* s = dynamic_cast<const ExplicitTreeState*>(&state);
  if (s == nullptr) throw std::invalid_argument("not an explicit tree");
  auto it = choices_.find(s->node_id());
  return it == choices_.end() ? 0 : it->second;
}

ExplicitTree random_tree(std::mt19937_64& rng, const RandomTreeOptions& options) {
  std::vector<TreeNode> nodes;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> pay_step(0, options.payment_steps);
  std::uniform_int_distribution<int> weight_step(0, options.weight_steps);
  const Bundle universe = options.n_items >= 64
                              ? ~Bundle{0}
                              : (Bundle{1} << options.n_items) - 1;
  std::uniform_int_distribution<Bundle> mask(0, universe);
  std::function<int(int)> build = [&](int level) -> int {
    const int id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    const bool stop =
        level == options.depth || (level > 0 && coin(rng) < options.leaf_prob);
    if (stop) {
      nodes[id].alloc_mask = mask(rng);
      nodes[id].payment = options.max_payment *
                          ratio(pay_step(rng), options.payment_steps);
      return id;
    }
    const bool buyer =
        options.alternate ? level % 2 == 0 : coin(rng) < 0.5;
    nodes[id].kind = buyer ? NodeKind::kBuyer : NodeKind::kChance;
    if (!buyer) {
      const Rational w = ratio(weight_step(rng), options.weight_steps);
      nodes[id].weights = {w, 1 - w};
    }
    const int left = build(level + 1);
    const int right = build(level + 1);
    nodes[id].children = {left, right};
    return id;
  };
  build(0);
  return ExplicitTree(std::move(nodes));
}

}  // namespace auctionwire
