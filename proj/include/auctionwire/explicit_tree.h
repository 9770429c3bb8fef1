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

#ifndef AUCTIONWIRE_EXPLICIT_TREE_H_
#define AUCTIONWIRE_EXPLICIT_TREE_H_

#include <map>
#include <memory>
#include <random>
#include <vector>

#include "auctionwire/protocol.h"

namespace auctionwire {

struct TreeNode {
  NodeKind kind = NodeKind::kLeaf;
  // Buyer nodes: one (forced) or two children. Chance nodes: any positive
  // number of children with matching weights.
  std::vector<int> children;
  std::vector<Rational> weights;
  Bundle alloc_mask = 0;
  Rational payment;
};

// A fully materialized protocol tree. Chance nodes with k children are
// played as a chain of k-1 binary draws.
class ExplicitTree final : public Protocol {
 public:
  ExplicitTree(std::vector<TreeNode> nodes, int root = 0);

  static ExplicitTree leaf(Bundle alloc_mask, Rational payment);

  std::unique_ptr<ProtocolState> root() const override;

  int root_id() const { return root_; }
  const TreeNode& node(int id) const { return nodes_->at(id); }
  int size() const { return static_cast<int>(nodes_->size()); }
  int depth() const;
  int chance_count() const;
  int leaf_count() const;

 private:
  std::shared_ptr<const std::vector<TreeNode>> nodes_;
  int root_;
};

class ExplicitTreeState final : public ProtocolState {
 public:
  ExplicitTreeState(std::shared_ptr<const std::vector<TreeNode>> nodes, int id)
      : nodes_(std::move(nodes)), id_(id) {}

  NodeKind kind() const override { return node().kind; }
  unsigned allowed() const override;
  ChanceSpec chance() const override;
  void apply(int bit) override;
  Outcome outcome() const override;
  std::unique_ptr<ProtocolState> clone() const override {
    return std::make_unique<ExplicitTreeState>(*this);
  }

  int node_id() const { return id_; }

 private:
  const TreeNode& node() const { return (*nodes_)[id_]; }

  std::shared_ptr<const std::vector<TreeNode>> nodes_;
  int id_;
  int branch_ = 0;  // position within a multiway chance node
};

// Plays a fixed bit per buyer node id (0 where unspecified).
class NodeStrategy final : public BuyerStrategy {
 public:
  explicit NodeStrategy(std::map<int, int> choices = {})
      : choices_(std::move(choices)) {}
  int choose(const ProtocolState& state, const History& history) override;
  const std::map<int, int>& choices() const { return choices_; }

 private:
  std::map<int, int> choices_;
};

struct RandomTreeOptions {
  int depth = 6;
  int n_items = 2;
  // Payments are multiples of 1/payment_steps in [0, max_payment].
  Rational max_payment = 1;
  int payment_steps = 8;
  // Weights are k/weight_steps for binary chance nodes.
  int weight_steps = 8;
  // Probability of stopping early at each interior position.
  double leaf_prob = 0.2;
  // Alternate buyer and chance levels starting with a buyer level; otherwise
  // pick each interior kind at random.
  bool alternate = false;
};

ExplicitTree random_tree(std::mt19937_64& rng, const RandomTreeOptions& options);

}  // namespace auctionwire

#endif  // AUCTIONWIRE_EXPLICIT_TREE_H_
