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

#include "auctionwire/backward_induction.h"

namespace auctionwire {

std::string path_key(const History& history) {
  std::string key;
  key.reserve(history.size());
  for (const auto& e : history) key.push_back(e.bit ? '1' : '0');
  return key;
}

int PathStrategy::choose(const ProtocolState&, const History& history) {
  auto it = choices_.find(path_key(history));
  return it == choices_.end() ? 0 : it->second;
}

namespace {

struct Value {
  Rational utility;
  Rational revenue;
};

class Solver {
 public:
  Solver(const Valuation& v, const BestResponseOptions& options)
      : v_(v), options_(options) {}

  Value solve(ProtocolState& state, History& history, KnownTau& known) {
    if (++used_ > options_.node_budget) {
      throw SearchBudgetExceeded("backward induction exceeded its node budget");
    }
    const NodeKind kind = state.kind();
    if (kind == NodeKind::kLeaf) return leaf(state.outcome());
    if (auto fixed = state.settled()) return leaf(*fixed);
    if (kind == NodeKind::kBuyer) {
      const unsigned allowed = state.allowed();
      if (allowed == kAllowZero || allowed == kAllowOne) {
        return step(state, history, known, allowed == kAllowOne ? 1 : 0);
      }
      auto other = state.clone();
      Value zero = step(*other, history, known, 0);
      Value one = step(state, history, known, 1);
      // Ties favour revenue, then digit 0.
      const bool pick_one =
          one.utility > zero.utility ||
          (one.utility == zero.utility && one.revenue > zero.revenue);
      choices_[path_key(history)] = pick_one ? 1 : 0;
      return pick_one ? one : zero;
    }
    const ChanceSpec spec = state.chance();
    if (!spec.visible) {
      throw std::invalid_argument(
          "backward induction needs every chance move to be visible");
    }
    if (spec.kind == ChanceSpec::Kind::kTauBit) {
      const auto key = std::make_pair(spec.stream, spec.index);
      if (auto it = known.find(key); it != known.end()) {
        return step(state, history, known, it->second);
      }
      auto other = state.clone();
      known[key] = 0;
      Value zero = step(*other, history, known, 0);
      known[key] = 1;
      Value one = step(state, history, known, 1);
      known.erase(key);
      return {(zero.utility + one.utility) / 2, (zero.revenue + one.revenue) / 2};
    }
    const Rational p0 = spec.p_zero();
    if (p0 == 1) return step(state, history, known, 0);
    if (p0 == 0) return step(state, history, known, 1);
    auto other = state.clone();
    Value zero = step(*other, history, known, 0);
    Value one = step(state, history, known, 1);
    const Rational p1 = 1 - p0;
    return {p0 * zero.utility + p1 * one.utility,
            p0 * zero.revenue + p1 * one.revenue};
  }

  std::map<std::string, int> take_choices() { return std::move(choices_); }

 private:
  Value step(ProtocolState& state, History& history, KnownTau& known, int bit) {
    push_event(history, state, bit);
    state.apply(bit);
    Value out = solve(state, history, known);
    history.pop_back();
    return out;
  }

  Value leaf(const Outcome& o) const {
    return {v_.value(o.alloc_mask) - o.payment, o.payment};
  }

  const Valuation& v_;
  BestResponseOptions options_;
  std::int64_t used_ = 0;
  std::map<std::string, int> choices_;
};

}  // namespace

BestResponse best_response_from(const ProtocolState& state, const Valuation& v,
                                const History& history, const KnownTau& known,
                                const BestResponseOptions& options) {
  Solver solver(v, options);
  auto s = state.clone();
  History h = history;
  KnownTau k = known;
  Value value = solver.solve(*s, h, k);
  return {std::move(value.utility), std::move(value.revenue),
          PathStrategy(solver.take_choices())};
}

BestResponse tree_best_response(const Protocol& protocol, const Valuation& v,
                                const BestResponseOptions& options) {
  auto root = protocol.root();
  return best_response_from(*root, v, {}, {}, options);
}

}  // namespace auctionwire
