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

#include "auctionwire/protocol.h"

#include <random>

#include "auctionwire/backward_induction.h"
#include "auctionwire/explicit_tree.h"
#include "auctionwire/random.h"
#include "doctest.h"
#include "oracles.h"

namespace auctionwire {
namespace {

// A chance node that never ends.
class EndlessState final : public ProtocolState {
 public:
  NodeKind kind() const override { return NodeKind::kChance; }
  ChanceSpec chance() const override { return ChanceSpec::weighted(Rational(1, 2)); }
  void apply(int) override {}
  Outcome outcome() const override { return {}; }
  std::unique_ptr<ProtocolState> clone() const override {
    return std::make_unique<EndlessState>(*this);
  }
};

class Endless final : public Protocol {
 public:
  std::unique_ptr<ProtocolState> root() const override {
    return std::make_unique<EndlessState>();
  }
};

TreeNode buyer(std::vector<int> children) {
  TreeNode n;
  n.kind = NodeKind::kBuyer;
  n.children = std::move(children);
  return n;
}

TreeNode chance(std::vector<int> children, std::vector<Rational> weights) {
  TreeNode n;
  n.kind = NodeKind::kChance;
  n.children = std::move(children);
  n.weights = std::move(weights);
  return n;
}

TreeNode leaf(Bundle mask, Rational payment) {
  TreeNode n;
  n.alloc_mask = mask;
  n.payment = std::move(payment);
  return n;
}

// Buyer picks a branch, then a fair coin decides between two leaves.
ExplicitTree two_level_tree() {
  return ExplicitTree({
      buyer({1, 2}),
      chance({3, 4}, {Rational(1, 2), Rational(1, 2)}),
      chance({5, 6}, {Rational(1, 4), Rational(3, 4)}),
      leaf(1, Rational(1, 2)),
      leaf(0, 0),
      leaf(1, Rational(1, 8)),
      leaf(0, Rational(1, 16)),
  });
}

TEST_CASE("tau bits are stable once drawn") {
  TauStream tau(99);
  const int b5 = tau.bit(0, 5);
  CHECK(tau.bit(0, 1) == tau.bit(0, 1));
  CHECK(tau.bit(0, 5) == b5);
  CHECK(tau.prefix_used(0) == 5);
  TauStream again(99);
  CHECK(again.bit(0, 5) == b5);
}

TEST_CASE("tau bits are fair") {
  const int trials = 100'000;
  int ones = 0;
  int ones_deep = 0;
  for (int s = 0; s < trials; ++s) {
    TauStream tau(mix_seed(5, 1, s));
    ones += tau.bit(0, 1);
    ones_deep += tau.bit(3, 200);
  }
  CHECK(testing::within_sigma(ones / double(trials), 0.5, trials, 3));
  CHECK(testing::within_sigma(ones_deep / double(trials), 0.5, trials, 3));
}

TEST_CASE("threshold sampling matches its value") {
  std::mt19937_64 rng(3);
  for (const Rational& p : {Rational(1, 3), Rational(0), Rational(1), Rational(7, 8)}) {
    Threshold t(p);
    const int trials = 50'000;
    int below = 0;
    for (int i = 0; i < trials; ++i) below += t.sample_below(rng);
    CHECK(testing::within_sigma(below / double(trials), to_double(p), trials, 4));
  }
}

TEST_CASE("a single leaf protocol") {
  ExplicitTree tree = ExplicitTree::leaf(0, 0);
  ZeroStrategy s;
  Transcript t = run(tree, s, 17);
  CHECK(t.rounds == 0);
  CHECK(t.buyer_bits.empty());
  CHECK(t.outcome == Outcome{});
  OutcomeLaw law = evaluate(tree, s);
  CHECK(law.expected_payment == 0);
  CHECK(law.alloc.at(0) == 1);
}

TEST_CASE("runs stop at the step cap") {
  Endless endless;
  ZeroStrategy s;
  RunOptions options;
  options.step_cap = 1000;
  CHECK_THROWS_AS(run(endless, s, 1, options), StepLimitExceeded);
}

TEST_CASE("forced bits are not buyer bits") {
  ExplicitTree tree({buyer({1}), buyer({2, 3}), leaf(0, 0), leaf(1, 0)});
  NodeStrategy s(std::map<int, int>{{1, 1}});
  Transcript t = run(tree, s, 1);
  CHECK(t.forced_bits == 1);
  CHECK(t.buyer_bits == std::vector<std::uint8_t>{1});
  CHECK(t.outcome.alloc_mask == 1);
}

TEST_CASE("replays with the same seed are identical") {
  std::mt19937_64 rng(21);
  RandomTreeOptions options;
  options.depth = 8;
  for (int trial = 0; trial < 30; ++trial) {
    ExplicitTree tree = random_tree(rng, options);
    NodeStrategy s;
    for (int seed = 0; seed < 10; ++seed) {
      Transcript a = run(tree, s, seed);
      Transcript b = run(tree, s, seed);
      CHECK(a.outcome == b.outcome);
      CHECK(a.chance_bits == b.chance_bits);
      CHECK(a.rounds == b.rounds);
    }
  }
}

TEST_CASE("exact evaluation of a small tree") {
  ExplicitTree tree = two_level_tree();
  NodeStrategy left(std::map<int, int>{{0, 0}});
  OutcomeLaw a = evaluate(tree, left);
  CHECK(a.expected_payment == Rational(1, 4));
  CHECK(a.alloc.at(1) == Rational(1, 2));
  NodeStrategy right(std::map<int, int>{{0, 1}});
  OutcomeLaw b = evaluate(tree, right);
  CHECK(b.expected_payment == Rational(1, 4) * Rational(1, 8) + Rational(3, 4) * Rational(1, 16));
  CHECK(b.alloc.at(1) == Rational(1, 4));
}

TEST_CASE("monte carlo agrees with exact evaluation") {
  ExplicitTree tree = two_level_tree();
  NodeStrategy right(std::map<int, int>{{0, 1}});
  const int trials = 40'000;
  int got = 0;
  for (int s = 0; s < trials; ++s) got += run(tree, right, s).outcome.alloc_mask == 1;
  CHECK(testing::within_sigma(got / double(trials), 0.25, trials, 4));
}

TEST_CASE("best response on a small tree") {
  ExplicitTree tree = two_level_tree();
  // Left: 1/2 (1 - 1/2) - 0 = 1/4. Right: 1/4 (1 - 1/8) - 3/4 (1/16) = 11/64.
  BestResponse br = tree_best_response(tree, Valuation::additive({1}));
  CHECK(br.value == Rational(1, 4));
  CHECK(br.revenue == Rational(1, 4));
  // With value 1/4 the left branch gives 1/8 - 1/4 < 0 and the right gives
  // 1/16 - 1/32 - 3/64 = -1/64.
  BestResponse low = tree_best_response(tree, Valuation::additive({Rational(1, 4)}));
  CHECK(low.value == Rational(-1, 64));
}

TEST_CASE("best response on a leaf is its utility") {
  ExplicitTree tree = ExplicitTree::leaf(1, Rational(1, 3));
  CHECK(tree_best_response(tree, Valuation::additive({1})).value == Rational(2, 3));
}

TEST_CASE("ties go to revenue") {
  ExplicitTree tree({buyer({1, 2}), leaf(0, 0), leaf(1, 1)});
  BestResponse br = tree_best_response(tree, Valuation::additive({1}));
  CHECK(br.value == 0);
  CHECK(br.revenue == 1);
}

TEST_CASE("best response matches strategy enumeration") {
  std::mt19937_64 rng(77);
  RandomTreeOptions options;
  options.depth = 6;
  for (int trial = 0; trial < 60; ++trial) {
    ExplicitTree tree = random_tree(rng, options);
    Valuation v = testing::random_additive(rng, options.n_items, 3);
    std::vector<testing::StrategyValue> all;
    REQUIRE(testing::enumerate_strategies(tree, v, 1'000'000, all));
    testing::StrategyValue best = testing::brute_force_best(all);
    BestResponse br = tree_best_response(tree, v);
    CHECK(br.value == best.utility);
    CHECK(br.revenue == best.revenue);
    OutcomeLaw law = evaluate(tree, br.strategy);
    CHECK(law.expected_utility(v) == br.value);
  }
}

TEST_CASE("hidden chance is rejected by backward induction") {
  class Hidden final : public Protocol {
   public:
    std::unique_ptr<ProtocolState> root() const override {
      class S final : public ProtocolState {
       public:
        NodeKind kind() const override { return done_ ? NodeKind::kLeaf : NodeKind::kChance; }
        ChanceSpec chance() const override { return ChanceSpec::weighted(Rational(1, 2), false); }
        void apply(int) override { done_ = true; }
        Outcome outcome() const override { return {}; }
        std::unique_ptr<ProtocolState> clone() const override {
          return std::make_unique<S>(*this);
        }

       private:
        bool done_ = false;
      };
      return std::make_unique<S>();
    }
  };
  CHECK_THROWS_AS(tree_best_response(Hidden(), Valuation::additive({1})),
                  std::invalid_argument);
}

TEST_CASE("node budget is enforced") {
  std::mt19937_64 rng(5);
  RandomTreeOptions options;
  options.depth = 10;
  options.leaf_prob = 0;
  ExplicitTree tree = random_tree(rng, options);
  BestResponseOptions tight;
  tight.node_budget = 10;
  CHECK_THROWS_AS(tree_best_response(tree, Valuation::additive({1, 1}), tight),
                  SearchBudgetExceeded);
}

TEST_CASE("trees validate their structure") {
  CHECK_THROWS(ExplicitTree({chance({1, 2}, {Rational(1, 2), Rational(1, 3)}),
                             leaf(0, 0), leaf(0, 0)}));
  CHECK_THROWS(ExplicitTree({buyer({1, 1}), leaf(0, 0)}));
  CHECK_THROWS(ExplicitTree({buyer({}), leaf(0, 0)}));
  CHECK(two_level_tree().leaf_count() == 4);
  CHECK(two_level_tree().chance_count() == 2);
  CHECK(two_level_tree().depth() == 2);
}

TEST_CASE("multiway chance nodes keep their weights") {
  ExplicitTree tree({chance({1, 2, 3}, {Rational(1, 2), Rational(1, 3), Rational(1, 6)}),
                     leaf(1, 0), leaf(2, 0), leaf(3, 0)});
  ZeroStrategy s;
  OutcomeLaw law = evaluate(tree, s);
  CHECK(law.alloc.at(1) == Rational(1, 2));
  CHECK(law.alloc.at(2) == Rational(1, 3));
  CHECK(law.alloc.at(3) == Rational(1, 6));
}

}  // namespace
}  // namespace auctionwire
