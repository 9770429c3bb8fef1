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

#include <algorithm>
#include <cstdlib>
#include <string>

#include "auctionwire/random.h"

namespace auctionwire {

namespace {

std::uint64_t floor_scaled_64(const Rational& q) {
  mpz_class scaled = q.get_num();
  scaled <<= 64;
  scaled /= q.get_den();
  return mpz_get_ui(scaled.get_mpz_t());
}

}  // namespace

Threshold::Threshold(Rational value) : value_(std::move(value)) {
  if (value_ < 0 || value_ > 1) {
    throw std::invalid_argument("threshold outside [0,1]");
  }
  is_one_ = value_ == 1;
  if (!is_one_) head_ = floor_scaled_64(value_);
}

bool Threshold::sample_below(std::mt19937_64& rng) const {
  if (is_one_) return true;
  const std::uint64_t u = rng();
  if (u != head_) return u < head_;
  // Equal leading word: keep comparing further digits exactly.
  mpz_class two64 = 1;
  two64 <<= 64;
  Rational rest = value_ * Rational(two64) - Rational(mpz_class(head_));
  while (rest != 0) {
    rest *= Rational(two64);
    mpz_class word = rest.get_num() / rest.get_den();
    rest -= Rational(word);
    const std::uint64_t w = mpz_get_ui(word.get_mpz_t());
    const std::uint64_t next = rng();
    if (next != w) return next < w;
  }
  return false;
}

Rational ChanceSpec::p_zero() const {
  if (kind == Kind::kTauBit) return Rational(1, 2);
  return threshold->value();
}

int ZeroStrategy::choose(const ProtocolState& state, const History&) {
  return (state.allowed() & kAllowZero) ? 0 : 1;
}

int TauStream::bit(int stream, std::int64_t index) {
  if (index < 1) throw std::invalid_argument("tau digits are 1-indexed");
  const std::int64_t word = (index - 1) / 64;
  const int offset = static_cast<int>((index - 1) % 64);
  if (stream != cached_stream_ || word != cached_word_) {
    cached_stream_ = stream;
    cached_word_ = word;
    cached_bits_ = mix_seed(seed_, static_cast<std::uint64_t>(stream),
                            static_cast<std::uint64_t>(word));
  }
  auto& used = used_[stream];
  used = std::max(used, index);
  return static_cast<int>((cached_bits_ >> (63 - offset)) & 1u);
}

std::int64_t TauStream::prefix_used(int stream) const {
  auto it = used_.find(stream);
  return it == used_.end() ? 0 : it->second;
}

std::int64_t default_step_cap() {
  if (const char* env = std::getenv("AUCTIONWIRE_STEP_CAP")) {
    try {
      const long long cap = std::stoll(env);
      if (cap > 0) return cap;
    } catch (const std::exception&) {
    }
  }
  return 1'000'000;
}

void push_event(History& history, const ProtocolState& before, int bit) {
  using Kind = HistoryEvent::Kind;
  const auto b = static_cast<std::uint8_t>(bit);
  switch (before.kind()) {
    case NodeKind::kBuyer:
      history.push_back({before.forced() ? Kind::kForced : Kind::kBuyer, b});
      return;
    case NodeKind::kChance:
      if (before.chance().visible) {
        history.push_back({Kind::kChance, b});
      } else {
        history.push_back({Kind::kHidden, 0});
      }
      return;
    case NodeKind::kLeaf:
      throw std::logic_error("no moves at a leaf");
  }
}

Transcript run(const Protocol& protocol, BuyerStrategy& strategy,
               std::uint64_t seed, const RunOptions& options) {
  const std::int64_t cap =
      options.step_cap > 0 ? options.step_cap : default_step_cap();
  Transcript t;
  t.seed = seed;
  TauStream tau(seed);
  std::mt19937_64 rng(mix_seed(seed, 0x5eedULL, 1));
  History history;
  auto state = protocol.root();
  using Kind = HistoryEvent::Kind;
  for (NodeKind kind = state->kind(); kind != NodeKind::kLeaf;
       kind = state->kind()) {
    if (++t.depth > cap) {
      throw StepLimitExceeded("run exceeded " + std::to_string(cap) +
                              " protocol steps");
    }
    int bit = 0;
    if (kind == NodeKind::kBuyer) {
      const unsigned allowed = state->allowed();
      if (allowed == kAllowZero || allowed == kAllowOne) {
        bit = allowed == kAllowOne ? 1 : 0;
        ++t.forced_bits;
        history.push_back({Kind::kForced, static_cast<std::uint8_t>(bit)});
      } else {
        bit = strategy.choose(*state, history);
        if (bit != 0 && bit != 1) throw InfeasibleMove("strategy bit not 0/1");
        t.buyer_bits.push_back(static_cast<std::uint8_t>(bit));
        history.push_back({Kind::kBuyer, static_cast<std::uint8_t>(bit)});
      }
      if (!((allowed >> bit) & 1u)) {
        throw InfeasibleMove("strategy chose a disallowed bit");
      }
    } else {
      const ChanceSpec spec = state->chance();
      if (spec.kind == ChanceSpec::Kind::kTauBit) {
        bit = tau.bit(spec.stream, spec.index);
      } else {
        bit = spec.threshold->sample_below(rng) ? 0 : 1;
      }
      ++t.rounds;
      t.chance_bits.push_back(static_cast<std::uint8_t>(bit));
      if (spec.visible) {
        history.push_back({Kind::kChance, static_cast<std::uint8_t>(bit)});
      } else {
        history.push_back({Kind::kHidden, 0});
      }
    }
    state->apply(bit);
  }
  t.tau_prefix_used = tau.prefix_used(0);
  t.outcome = state->outcome();
  return t;
}

ItemProbs OutcomeLaw::item_marginals(int n_items) const {
  ItemProbs out(n_items, Rational(0));
  for (const auto& [bundle, p] : alloc) {
    for (int i = 0; i < n_items; ++i) {
      if ((bundle >> i) & 1) out[i] += p;
    }
  }
  return out;
}

Rational OutcomeLaw::expected_value(const Valuation& v) const {
  Rational sum = 0;
  for (const auto& [bundle, p] : alloc) sum += p * v.value(bundle);
  return sum;
}

namespace {

class Evaluator {
 public:
  Evaluator(BuyerStrategy& strategy, const EvalOptions& options)
      : strategy_(strategy), options_(options) {}

  void visit(std::unique_ptr<ProtocolState> state, History history,
             KnownTau known, const Rational& weight) {
    while (true) {
      if (++used_ > options_.node_budget) {
        law_.unexplored += weight;
        return;
      }
      const NodeKind kind = state->kind();
      if (kind == NodeKind::kLeaf) {
        add(state->outcome(), weight);
        return;
      }
      if (auto fixed = state->settled()) {
        add(*fixed, weight);
        return;
      }
      if (auto fixed = strategy_.settled(*state, history)) {
        add(*fixed, weight);
        return;
      }
      if (kind == NodeKind::kBuyer) {
        const unsigned allowed = state->allowed();
        int bit = 0;
        if (allowed == kAllowZero || allowed == kAllowOne) {
          bit = allowed == kAllowOne ? 1 : 0;
        } else {
          bit = strategy_.choose(*state, history);
        }
        if (bit < 0 || bit > 1 || !((allowed >> bit) & 1u)) {
          throw InfeasibleMove("strategy chose a disallowed bit");
        }
        push_event(history, *state, bit);
        state->apply(bit);
        continue;
      }
      const ChanceSpec spec = state->chance();
      if (spec.kind == ChanceSpec::Kind::kTauBit) {
        const auto key = std::make_pair(spec.stream, spec.index);
        if (auto it = known.find(key); it != known.end()) {
          push_event(history, *state, it->second);
          state->apply(it->second);
          continue;
        }
        const Rational half = weight / 2;
        for (int bit = 0; bit < 2; ++bit) {
          auto child = bit == 0 ? state->clone() : std::move(state);
          History h = history;
          push_event(h, *child, bit);
          child->apply(bit);
          KnownTau k = known;
          k[key] = bit;
          visit(std::move(child), std::move(h), std::move(k), half);
        }
        return;
      }
      const Rational p0 = spec.p_zero();
      if (p0 == 1 || p0 == 0) {
        const int bit = p0 == 1 ? 0 : 1;
        push_event(history, *state, bit);
        state->apply(bit);
        continue;
      }
      auto child = state->clone();
      History h = history;
      push_event(h, *child, 0);
      child->apply(0);
      visit(std::move(child), std::move(h), known, weight * p0);
      push_event(history, *state, 1);
      state->apply(1);
      visit(std::move(state), std::move(history), std::move(known),
            weight * (1 - p0));
      return;
    }
  }

  OutcomeLaw take() { return std::move(law_); }

 private:
  void add(const Outcome& o, const Rational& weight) {
    law_.alloc[o.alloc_mask] += weight;
    law_.expected_payment += weight * o.payment;
    if (o.flagged) law_.flagged += weight;
  }

  BuyerStrategy& strategy_;
  EvalOptions options_;
  std::int64_t used_ = 0;
  OutcomeLaw law_;
};

}  // namespace

OutcomeLaw evaluate(const Protocol& protocol, BuyerStrategy& strategy,
                    const EvalOptions& options) {
  Evaluator e(strategy, options);
  e.visit(protocol.root(), {}, {}, Rational(1));
  return e.take();
}

OutcomeLaw evaluate_from(const ProtocolState& state, BuyerStrategy& strategy,
                         const History& history, const KnownTau& known,
                         const EvalOptions& options) {
  Evaluator e(strategy, options);
  e.visit(state.clone(), history, known, Rational(1));
  return e.take();
}

}  // namespace auctionwire
