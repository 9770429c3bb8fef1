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

#include "auctionwire/expost_ir.h"

#include <cmath>
#include <functional>
#include <random>

#include "auctionwire/backward_induction.h"
#include "auctionwire/explicit_tree.h"
#include "doctest.h"
#include "oracles.h"

namespace auctionwire {
namespace {

TreeNode leaf(Bundle mask, Rational payment) {
  TreeNode n;
  n.alloc_mask = mask;
  n.payment = std::move(payment);
  return n;
}

TreeNode fair(int a, int b) {
  TreeNode n;
  n.kind = NodeKind::kChance;
  n.children = {a, b};
  n.weights = {Rational(1, 2), Rational(1, 2)};
  return n;
}

struct LeafVisit {
  Rational prob;
  Outcome outcome;
  Rational reported_total;
};

// Every leaf of the wrapped protocol under the strategy, with its
// probability.
std::vector<LeafVisit> leaves(const Protocol& p, BuyerStrategy& s) {
  std::vector<LeafVisit> out;
  std::function<void(ProtocolState&, History&, const Rational&)> go =
      [&](ProtocolState& state, History& history, const Rational& prob) {
        if (state.kind() == NodeKind::kLeaf) {
          const auto& e = dynamic_cast<const ExpostState&>(state);
          out.push_back({prob, state.outcome(), e.reported_total()});
          return;
        }
        if (state.kind() == NodeKind::kBuyer) {
          const int bit = s.choose(state, history);
          push_event(history, state, bit);
          state.apply(bit);
          go(state, history, prob);
          return;
        }
        const Rational p0 = state.chance().p_zero();
        for (int bit = 0; bit < 2; ++bit) {
          const Rational w = bit == 0 ? p0 : 1 - p0;
          if (w == 0) continue;
          auto next = state.clone();
          History h = history;
          push_event(h, *next, bit);
          next->apply(bit);
          go(*next, h, prob * w);
        }
      };
  auto root = p.root();
  History history;
  go(*root, history, 1);
  return out;
}

TEST_CASE("one fair coin over the item is hedged by half") {
  auto inner = std::make_shared<ExplicitTree>(
      std::vector<TreeNode>{fair(1, 2), leaf(1, 0), leaf(0, 0)});
  ExpostProtocol p(inner, ratio(1, 1024), 1);
  const Valuation v = Valuation::additive({1});
  ZeroStrategy base;
  ExpostStrategy s(base, v);
  const auto visits = leaves(p, s);
  REQUIRE(visits.size() == 2);
  for (const auto& leaf : visits) {
    CHECK(leaf.reported_total == Rational(1, 2));
    const Rational u = v.value(leaf.outcome.alloc_mask) - leaf.outcome.payment;
    CHECK(u == Rational(1, 2));
    CHECK(abs(leaf.outcome.payment) == Rational(1, 2));
  }
}

TEST_CASE("a deterministic protocol only gains the initial report") {
  auto inner = std::make_shared<ExplicitTree>(ExplicitTree::leaf(1, Rational(1, 4)));
  ExpostProtocol p(inner, ratio(1, 1024), 1);
  const Valuation v = Valuation::additive({1});
  ZeroStrategy base;
  ExpostStrategy s(base, v);
  const Transcript t = run(p, s, 1);
  CHECK(static_cast<int>(t.buyer_bits.size()) + t.forced_bits == p.config().total_bits);
  CHECK(t.outcome.payment == Rational(1, 4));
  CHECK(p.config().total_bits == 10);  // codes 0..512 on a grid of 2/1024
}

TEST_CASE("random wrapped trees keep every run within eps") {
  std::mt19937_64 rng(61);
  const Rational eps = ratio(1, 1024);
  const Rational big_u = 2;
  int tested = 0;
  while (tested < 20) {
    RandomTreeOptions options;
    options.depth = 6;
    ExplicitTree tree = random_tree(rng, options);
    if (tree.chance_count() > 8 || tree.chance_count() == 0) continue;
    ++tested;
    auto inner = std::make_shared<ExplicitTree>(tree);
    const Valuation v = testing::random_additive(rng, options.n_items, 3);
    BestResponse br = tree_best_response(*inner, v);
    const OutcomeLaw base = evaluate(*inner, br.strategy);
    const Rational u_bar = base.expected_utility(v);
    ExpostProtocol p(inner, eps, big_u);
    ExpostStrategy s(br.strategy, v);
    Rational mean_payment = 0;
    for (const auto& leaf : leaves(p, s)) {
      const Rational u = v.value(leaf.outcome.alloc_mask) - leaf.outcome.payment;
      CHECK(abs(u - u_bar) < eps);
      // Random trees need not be interim IR; a negative expectation reports 0.
      CHECK(abs(leaf.reported_total - (u_bar > 0 ? u_bar : Rational(0))) <= eps);
      mean_payment += leaf.prob * leaf.outcome.payment;
    }
    CHECK(mean_payment == base.expected_payment);
    const std::int64_t c = tree.chance_count();
    const double log_ratio = std::log2(to_double(big_u / eps));
    for (int seed = 0; seed < 20; ++seed) {
      const Transcript t = run(p, s, seed);
      const Transcript plain = run(*inner, br.strategy, seed);
      const std::int64_t extra = static_cast<std::int64_t>(t.buyer_bits.size()) + t.forced_bits -
                                 static_cast<std::int64_t>(plain.buyer_bits.size()) -
                                 plain.forced_bits;
      // Tree weights are multiples of 1/8.
      CHECK(extra <= expost_overhead_bound(p.config(), c, ratio(1, 8)));
      CHECK(static_cast<double>(extra) <= 2 * (c * log_ratio + c * c));
    }
  }
}

TEST_CASE("reports beyond the cap are refused") {
  auto inner = std::make_shared<ExplicitTree>(ExplicitTree::leaf(0, 0));
  ExpostProtocol p(inner, ratio(1, 5), 1);
  REQUIRE(p.config().total_bits == 2);  // codes 0..2
  auto state = p.root();
  state->apply(1);
  CHECK_THROWS_AS(state->apply(1), ReportOutOfRange);
}

TEST_CASE("shifts beyond the reachable range are refused") {
  auto inner = std::make_shared<ExplicitTree>(
      std::vector<TreeNode>{fair(1, 2), leaf(1, 0), leaf(0, 0)});
  ExpostProtocol p(inner, ratio(1, 4), 1);
  auto state = p.root();
  state->apply(0);
  state->apply(1);
  auto& e = dynamic_cast<ExpostState&>(*state);
  REQUIRE(e.phase() == ExpostState::Phase::kShift);
  REQUIRE(e.shift_bits() == 4);  // codes 0..8
  state->apply(1);
  state->apply(0);
  state->apply(0);
  CHECK_THROWS_AS(state->apply(1), ReportOutOfRange);
}

TEST_CASE("hedge configuration") {
  CHECK_THROWS(make_hedge_config(0, 1));
  CHECK_THROWS(make_hedge_config(ratio(1, 4), 0));
  const HedgeConfig c = make_hedge_config(ratio(1, 4), 1);
  CHECK(c.total_bits == 2);  // codes 0..2
  CHECK(shift_grid(c, 1) == ratio(1, 4));
  CHECK(shift_grid(c, 2) == ratio(1, 8));
  CHECK(shift_reach(c, 1, ratio(1, 2)) == 4);
  CHECK(shift_bits(c, 1, ratio(1, 2)) == 4);  // codes 0..8
  CHECK(shift_bits(c, 2, ratio(1, 2)) == 5);  // codes 0..16
  CHECK(shift_reach(c, 1, ratio(1, 8)) == 7);
  CHECK(shift_bits(c, 1, ratio(1, 8)) == 4);  // codes 0..14
  CHECK(expost_overhead_bound(c, 0, ratio(1, 2)) == 2);
  CHECK(expost_overhead_bound(c, 2, ratio(1, 2)) == 2 + 4 + 5);
  CHECK_THROWS(expost_overhead_bound(c, 1, 0));
}

TEST_CASE("the overhead meets twice C log(U/eps) + C^2 at every C") {
  // U / eps = 2^11 and the lighter outcome has weight at least 1/8.
  const HedgeConfig c = make_hedge_config(ratio(1, 1024), 2);
  for (std::int64_t moves = 1; moves <= 16; ++moves) {
    CHECK(expost_overhead_bound(c, moves, ratio(1, 8)) <= 2 * (moves * 11 + moves * moves));
  }
}

}  // namespace
}  // namespace auctionwire
