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

#include "auctionwire/nonic.h"

#include <random>

#include "auctionwire/backward_induction.h"
#include "doctest.h"
#include "oracles.h"

namespace auctionwire {
namespace {

BundleMenu random_bundle_menu(std::mt19937_64& rng, int bundles, int lines, int bits) {
  BundleMenu bm;
  bm.n_items = 6;
  bm.cap = 1;
  for (int b = 0; b < bundles; ++b) bm.bundles.push_back(static_cast<Bundle>(b));
  for (int l = 0; l < lines; ++l) {
    std::vector<Rational> cuts;
    for (int b = 0; b + 1 < bundles; ++b) {
      cuts.push_back(testing::dyadic(rng() % ((1u << bits) + 1), bits));
    }
    std::sort(cuts.begin(), cuts.end());
    bm.lines.push_back({cuts, testing::dyadic(rng() % ((1u << bits) + 1), bits)});
  }
  return bm;
}

TEST_CASE("a single bundle ends at the first one digit") {
  BundleMenu bm;
  bm.n_items = 1;
  bm.cap = 1;
  bm.bundles = {0};
  bm.lines = {{{}, 0}};
  NonicProtocol p = compile_nonic(bm);
  CHECK(p.shape().alloc_bits == 0);
  NonicLineStrategy s(0);
  auto state = p.root();
  History history;
  std::vector<int> decisions;
  const std::vector<int> digits = {0, 0, 1};
  std::size_t used = 0;
  while (state->kind() != NodeKind::kLeaf) {
    int bit;
    if (state->kind() == NodeKind::kChance) {
      bit = digits.at(used++);
    } else {
      bit = s.choose(*state, history);
      if (dynamic_cast<const NonicState&>(*state).phase() == NonicState::Phase::kDecide) {
        decisions.push_back(bit);
      }
    }
    push_event(history, *state, bit);
    state->apply(bit);
  }
  CHECK(decisions == std::vector<int>{0, 0, 1});
  CHECK(state->outcome() == Outcome{});
}

TEST_CASE("honest play reproduces each line exactly") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const int bundles = 1 + static_cast<int>(rng() % 5);
    BundleMenu bm = random_bundle_menu(rng, bundles, 3, 4);
    NonicProtocol p = compile_nonic(bm);
    for (std::size_t l = 0; l < bm.lines.size(); ++l) {
      NonicLineStrategy s(l);
      OutcomeLaw law = evaluate(p, s);
      CHECK(law.flagged == 0);
      CHECK(law.expected_payment == bm.lines[l].pay_prob);
      for (const auto& [bundle, prob] : bm.distribution(l)) CHECK(law.alloc[bundle] == prob);
    }
  }
}

TEST_CASE("honest runs match the exact law") {
  std::mt19937_64 rng(42);
  BundleMenu bm = random_bundle_menu(rng, 3, 2, 6);
  NonicProtocol p = compile_nonic(bm);
  NonicLineStrategy s(1);
  const BundleDist dist = bm.distribution(1);
  const int trials = 30'000;
  std::map<Bundle, int> got;
  for (int i = 0; i < trials; ++i) {
    const Transcript t = run(p, s, i);
    CHECK_FALSE(t.outcome.flagged);
    ++got[t.outcome.alloc_mask];
  }
  for (const auto& [bundle, prob] : dist) {
    CHECK(testing::within_sigma(got[bundle] / double(trials), to_double(prob), trials, 4));
  }
}

TEST_CASE("sixteen bundles take four announcement bits") {
  std::mt19937_64 rng(43);
  BundleMenu bm = random_bundle_menu(rng, 16, 2, 6);
  NonicProtocol p = compile_nonic(bm);
  CHECK(p.shape().alloc_bits == 4);
  NonicLineStrategy s(0);
  for (int seed = 0; seed < 50; ++seed) {
    const Transcript t = run(p, s, seed);
    // One stop decision per revealed digit, one payment bit, four index bits.
    const std::int64_t all = static_cast<std::int64_t>(t.buyer_bits.size()) + t.forced_bits;
    CHECK(all == t.rounds + 1 + 4);
  }
}

TEST_CASE("announcing an impossible outcome is flagged") {
  BundleMenu bm;
  bm.n_items = 1;
  bm.cap = 1;
  bm.bundles = {1, 0};
  bm.lines = {{{Rational(1, 2)}, Rational(1, 2)}};
  NonicProtocol p = compile_nonic(bm);
  // The liar stops after one digit and claims the item for free. Below 1/2
  // the buyer owes the cap; above it the item is not allocated.
  PathStrategy liar({{"0", 1}, {"01", 0}, {"010", 0}, {"1", 1}, {"11", 0}, {"110", 0}});
  for (int seed = 0; seed < 40; ++seed) {
    const Transcript t = run(p, liar, seed);
    CHECK(t.outcome.flagged);
    CHECK(t.outcome.payment == 0);
    CHECK(t.outcome.alloc_mask == 1);
  }
  OutcomeLaw law = evaluate(p, liar);
  CHECK(law.flagged == 1);
}

TEST_CASE("the cheat on the quadratic menu") {
  const CheatReport r = demonstrate_cheat(Rational(4, 3));
  CHECK(r.honest_q == Rational(2, 3));
  CHECK(r.honest_pay == Rational(4, 9));
  CHECK(r.deviation_q == Rational(1, 2));
  CHECK(r.deviation_pay == Rational(1, 4));
  // Threshold below 1/2: both reports get the item. Honest pays with
  // probability (4/9)/(1/2), the deviation with probability 1/2.
  CHECK(r.honest_low == Rational(4, 3) - Rational(8, 9));
  CHECK(r.deviation_low == Rational(4, 3) - Rational(1, 2));
  CHECK(r.honest_low == Rational(4, 9));
  CHECK(r.deviation_low == Rational(5, 6));
  CHECK(r.gap_low == Rational(7, 18));
  CHECK(r.improves);
  // Threshold above 1/2: the honest report wins the item on [1/2, 2/3) and
  // never pays; the deviation gets nothing.
  CHECK(r.honest_high == Rational(4, 3) * Rational(1, 3));
  CHECK(r.deviation_high == 0);
  CHECK(r.honest_high >= r.deviation_high);
}

TEST_CASE("conditional utilities agree with a closed form") {
  // Report q costs q^2 in the unconditional menu. Given a threshold below
  // 1/2 the item arrives with probability min(q, 1/2) / (1/2) and the
  // payment with probability min(q^2, 1/2) / (1/2).
  for (int k = 0; k <= 12; ++k) {
    const Rational v = ratio(k, 6);
    const CheatReport r = demonstrate_cheat(v);
    auto closed = [&](const Rational& q) -> Rational {
      const Rational half(1, 2);
      return 2 * (v * std::min(q, half) - std::min(Rational(q * q), half));
    };
    CHECK(r.honest_low == closed(r.honest_q));
    CHECK(r.deviation_low == closed(r.deviation_q));
    CHECK(r.gap_low >= 0);
  }
}

TEST_CASE("the zero type has nothing to gain") {
  const CheatReport r = demonstrate_cheat(0);
  CHECK(r.honest_q == 0);
  CHECK(r.gap_low == 0);
  CHECK_FALSE(r.improves);
  CHECK_THROWS(demonstrate_cheat(-1));
}

TEST_CASE("the quadratic menu") {
  const BundleMenu bm = quadratic_price_menu(3);
  REQUIRE(bm.lines.size() == 9);
  for (std::size_t k = 0; k < bm.lines.size(); ++k) {
    const Rational q = ratio(static_cast<long>(k), 8);
    CHECK(bm.lines[k].boundaries.front() == q);
    CHECK(bm.lines[k].pay_prob == Dyadic::truncate(Rational(q * q), 20).value());
  }
  CHECK_NOTHROW(compile_nonic(bm));
}

TEST_CASE("line status compares digits with the revealed prefix") {
  std::vector<std::vector<Dyadic>> rows = {{*Dyadic::from_rational(Rational(5, 8))}};
  StreamTable table(rows);
  CHECK(line_status(table, 0, {}) == std::vector<std::int8_t>{0});
  CHECK(line_status(table, 0, {1, 0}) == std::vector<std::int8_t>{0});
  CHECK(line_status(table, 0, {0}) == std::vector<std::int8_t>{1});
  CHECK(line_status(table, 0, {1, 1}) == std::vector<std::int8_t>{-1});
}

}  // namespace
}  // namespace auctionwire
