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

#include "auctionwire/ddt.h"

#include <cmath>
#include <random>

#include "auctionwire/random.h"
#include "doctest.h"
#include "oracles.h"

namespace auctionwire {
namespace {

DdtType type_a(const Rational& pi, const Rational& payment) {
  DdtType t;
  t.region = DdtRegion::kA;
  t.preferred = 0;
  t.pi = pi;
  t.payment = payment;
  return t;
}

DdtType type_of(DdtRegion region) {
  DdtType t;
  t.region = region;
  return t;
}

// Exact expected number of bits spent naming the region: the encoding draws
// are enumerated and the strategy followed until the signal ends.
Rational expected_signal_bits(const DdtProtocol& p, DdtStrategy& s) {
  std::function<Rational(ProtocolState&, History&)> go = [&](ProtocolState& state,
                                                             History& history) -> Rational {
    const auto& d = dynamic_cast<const DdtState&>(state);
    if (d.phase() == DdtState::Phase::kEncoding || d.phase() == DdtState::Phase::kRotation) {
      const Rational p0 = state.chance().p_zero();
      Rational total = 0;
      for (int bit = 0; bit < 2; ++bit) {
        auto next = state.clone();
        History h = history;
        push_event(h, *next, bit);
        next->apply(bit);
        total += (bit == 0 ? p0 : 1 - p0) * go(*next, h);
      }
      return total;
    }
    if (d.phase() == DdtState::Phase::kSignal1 || d.phase() == DdtState::Phase::kSignal2) {
      const int bit = s.choose(state, history);
      push_event(history, state, bit);
      state.apply(bit);
      return 1 + go(state, history);
    }
    return 0;
  };
  auto root = p.root();
  History history;
  return go(*root, history);
}

TEST_CASE("region codes cost the expected preliminary bits") {
  DdtProtocol p = build_ddt(SyntheticDdtOracle(), Rational(1 << 20));
  DdtStrategy z(p, type_of(DdtRegion::kZ));
  DdtStrategy w(p, type_of(DdtRegion::kW));
  DdtStrategy a(p, type_a(Rational(1, 8), 0));
  CHECK(expected_signal_bits(p, z) == ratio(199, 100));
  CHECK(expected_signal_bits(p, w) == ratio(199, 100));
  CHECK(expected_signal_bits(p, a) == ratio(102, 100));
}

TEST_CASE("a Z type under the main code sends 00 and gets nothing") {
  DdtProtocol p = build_ddt(SyntheticDdtOracle(), Rational(64));
  DdtStrategy z(p, type_of(DdtRegion::kZ));
  auto state = p.root();
  History history;
  state->apply(0);  // main code
  std::vector<int> sent;
  while (state->kind() == NodeKind::kBuyer) {
    const int bit = z.choose(*state, history);
    sent.push_back(bit);
    push_event(history, *state, bit);
    state->apply(bit);
  }
  CHECK(sent == std::vector<int>{0, 0});
  REQUIRE(state->kind() == NodeKind::kLeaf);
  CHECK(state->outcome() == Outcome{});
}

TEST_CASE("the free range costs no further bits") {
  DdtProtocol p = build_ddt(SyntheticDdtOracle(), Rational(64));
  DdtStrategy a(p, type_a(ratio(1, 8) + ratio(3, 200), ratio(1, 4)));
  auto state = p.root();
  History history;
  int bits = 0;
  // Main code, then the range draws: not below 1/U, below 1/8.
  const std::vector<int> chance = {0, 1, 0};
  std::size_t used = 0;
  while (state->kind() != NodeKind::kLeaf) {
    int bit;
    if (state->kind() == NodeKind::kBuyer) {
      bit = a.choose(*state, history);
      ++bits;
    } else {
      bit = chance.at(used++);
    }
    push_event(history, *state, bit);
    state->apply(bit);
  }
  CHECK(bits == 1);
  CHECK(state->outcome().alloc_mask == 3);
  CHECK(state->outcome().payment == 0);
}

TEST_CASE("types receive their allocation and payment exactly") {
  const Rational big_u(64);
  DdtProtocol p = build_ddt(SyntheticDdtOracle(), big_u);
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 10; ++trial) {
    // pi = 1/8 + (3/100) s for a dyadic s.
    const Rational s = testing::dyadic(rng() % 16, 4);
    const Rational pi = ratio(1, 8) + ratio(3, 100) * s;
    const Rational pay = testing::dyadic(rng() % 16, 5);
    DdtType t = type_a(pi, pay);
    t.region = trial % 2 == 0 ? DdtRegion::kA : DdtRegion::kB;
    t.preferred = trial % 2;
    DdtStrategy strategy(p, t);
    OutcomeLaw law = evaluate(p, strategy);
    const ItemProbs marg = law.item_marginals(2);
    CHECK(marg[t.preferred] == 1);
    CHECK(marg[1 - t.preferred] == pi);
    CHECK(law.expected_payment == pay);
  }
  DdtStrategy w(p, type_of(DdtRegion::kW));
  OutcomeLaw lw = evaluate(p, w);
  CHECK(lw.alloc.at(3) == 1);
  CHECK(lw.expected_payment == SyntheticDdtOracle().price());
  DdtStrategy z(p, type_of(DdtRegion::kZ));
  CHECK(evaluate(p, z).alloc.at(0) == 1);
}

TEST_CASE("a degenerate lottery streams zeros in the fine range") {
  DdtProtocol p = build_ddt(SyntheticDdtOracle(), Rational(1 << 20));
  DdtStrategy a(p, type_a(ratio(1, 8), ratio(1, 4)));
  CHECK(a.s_digits().value() == 0);
  // Fine range under the main code: chance draws 0 (code), 1, 1, 0 (ranges).
  double sum = 0, sq = 0;
  int n = 0;
  for (int seed = 0; seed < 200'000; ++seed) {
    const Transcript t = run(p, a, mix_seed(52, 0, seed));
    const auto& c = t.chance_bits;
    if (c.size() < 4 || c[0] != 0 || c[1] != 1 || c[2] != 1 || c[3] != 0) continue;
    const double bits = static_cast<double>(t.buyer_bits.size()) - 1;  // after the signal
    sum += bits;
    sq += bits * bits;
    ++n;
    CHECK(t.outcome.alloc_mask == 1);
  }
  REQUIRE(n > 1000);
  const double mean = sum / n;
  const double se = std::sqrt((sq / n - mean * mean) / n);
  // One item bit, then digits until the threshold shows a one: 1 + 2.
  CHECK(std::abs(mean - 3.0) <= 4 * se);
}

TEST_CASE("bit estimates on a small sample") {
  DdtProtocol p = build_ddt(SyntheticDdtOracle(), Rational(1 << 20));
  const DdtBitReport r = estimate_ddt_bits(p, SyntheticDdtOracle(), 20'000, 3);
  CHECK(r.samples == 20'000);
  CHECK(r.z.samples + r.w.samples + r.a_or_b.samples == 20'000);
  const double z_se = r.signal_z.half_width / 1.96;
  CHECK(std::abs(r.signal_z.mean - 1.99) <= 4 * z_se);
  CHECK(r.z.mean == r.signal_z.mean);
  CHECK(std::abs(r.signal_a_or_b.mean - 1.02) <= 4 * r.signal_a_or_b.half_width / 1.96);
  CHECK(r.a_or_b.mean >= r.signal_a_or_b.mean);
  const DdtBitReport again = estimate_ddt_bits(p, SyntheticDdtOracle(), 20'000, 3);
  CHECK(again.overall.mean == r.overall.mean);
}

TEST_CASE("beta samples have the right mean") {
  std::mt19937_64 rng(53);
  const int n = 100'000;
  double sum = 0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_beta_1_2(rng);
    CHECK((x >= 0 && x <= 1));
    sum += x;
  }
  CHECK(std::abs(sum / n - 1.0 / 3) <= 4 * std::sqrt(1.0 / 18 / n));
}

TEST_CASE("the synthetic oracle respects the region rules") {
  SyntheticDdtOracle oracle;
  std::mt19937_64 rng(54);
  for (int i = 0; i < 5000; ++i) {
    const DdtType t = oracle.classify(sample_beta_1_2(rng), sample_beta_1_2(rng));
    CHECK_NOTHROW(check_ddt_type(t, oracle.price()));
  }
  CHECK(oracle.classify(0, 0).region == DdtRegion::kZ);
  CHECK(oracle.classify(1, 1).region == DdtRegion::kW);
  CHECK(oracle.classify(1, 0).region == DdtRegion::kA);
  CHECK(oracle.classify(0, 1).region == DdtRegion::kB);
  CHECK_THROWS(oracle.classify(2, 0));
}

TEST_CASE("inconsistent oracle output is rejected") {
  const Rational price = SyntheticDdtOracle().price();
  CHECK_THROWS_AS(check_ddt_type(type_a(ratio(1, 10), 0), price), OracleInconsistent);
  CHECK_THROWS_AS(check_ddt_type(type_a(ratio(1, 8), price), price), OracleInconsistent);
  DdtType wrong = type_a(ratio(1, 8), 0);
  wrong.preferred = 1;
  CHECK_THROWS_AS(check_ddt_type(wrong, price), OracleInconsistent);
  CHECK_THROWS(build_ddt(SyntheticDdtOracle(), Rational(8)));
}

}  // namespace
}  // namespace auctionwire
