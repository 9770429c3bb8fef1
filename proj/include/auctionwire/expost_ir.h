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

// Hedging wrapper. The buyer first reports its expected utility, then before
// every random move reports how that expectation shifts for one outcome; the
// other outcome's shift is derived so that the weighted shifts cancel. The
// realized shifts are added to the payment, so an honest buyer ends with
// (approximately) its reported utility on every path while expected payment
// and incentives are unchanged.
//
// Reports are fixed point and rounded to nearest. The total is kept to within
// eps and the shift at the i-th hedged move to within eps * 2^-i, so the
// drift over any path stays below eps. A shift is sent in offset binary over
// the range its outcome's weight allows: with utilities in [-U, U] and the
// lighter outcome w reported, the shift lies in [-2U(1-w), 2U(1-w)].
// Adjusted payments may be negative.

#ifndef AUCTIONWIRE_EXPOST_IR_H_
#define AUCTIONWIRE_EXPOST_IR_H_

#include <memory>

#include "auctionwire/protocol.h"

namespace auctionwire {

class ReportOutOfRange : public InfeasibleMove {
 public:
  using InfeasibleMove::InfeasibleMove;
};

struct HedgeConfig {
  Rational eps;
  Rational big_u;       // bound on values and payments
  int total_bits = 0;   // bits of the initial utility report
};

HedgeConfig make_hedge_config(const Rational& eps, const Rational& big_u);

// Spacing of the shift codes at the 1-based hedged move `index`.
Rational shift_grid(const HedgeConfig& config, int index);
// Largest code magnitude K; codes 0..2K stand for shifts (code - K) * grid.
mpz_class shift_reach(const HedgeConfig& config, int index, const Rational& w_reported);
int shift_bits(const HedgeConfig& config, int index, const Rational& w_reported);

class ExpostProtocol final : public Protocol {
 public:
  ExpostProtocol(std::shared_ptr<const Protocol> inner, const Rational& eps,
                 const Rational& big_u);
  std::unique_ptr<ProtocolState> root() const override;
  const HedgeConfig& config() const { return *config_; }
  const Protocol& inner() const { return *inner_; }

 private:
  std::shared_ptr<const Protocol> inner_;
  std::shared_ptr<const HedgeConfig> config_;
};

class ExpostState final : public ProtocolState {
 public:
  enum class Phase { kTotal, kShift, kInner, kLeaf };

  ExpostState(std::shared_ptr<const HedgeConfig> config,
              std::unique_ptr<ProtocolState> inner);
  ExpostState(const ExpostState& other);

  NodeKind kind() const override;
  unsigned allowed() const override;
  ChanceSpec chance() const override;
  void apply(int bit) override;
  Outcome outcome() const override;
  std::unique_ptr<ProtocolState> clone() const override {
    return std::make_unique<ExpostState>(*this);
  }

  Phase phase() const { return phase_; }
  const ProtocolState& inner() const { return *inner_; }
  const History& inner_history() const { return inner_history_; }
  const KnownTau& known() const { return known_; }
  const HedgeConfig& config() const { return *config_; }
  // 1-based index of the hedged move being reported or next to be hedged.
  int hedge_index() const { return hedge_index_; }
  int report_bits_sent() const { return bits_sent_; }
  int shift_bits() const { return shift_bits_; }
  const mpz_class& shift_reach() const { return reach_; }
  // The outcome whose shift is reported; the other one is derived.
  int reported_child() const { return reported_child_; }
  const Rational& reported_weight() const { return w_reported_; }
  const Rational& reported_total() const { return total_; }
  const Rational& offset() const { return offset_; }
  // Distinct for every report begun in this process; shared by clones.
  std::uint64_t report_id() const { return report_id_; }

 private:
  void advance();
  void finish_shift();
  // Probability of child 0 at the current inner random move, or nullopt if
  // its outcome is already determined.
  std::optional<Rational> open_weight() const;

  std::shared_ptr<const HedgeConfig> config_;
  std::unique_ptr<ProtocolState> inner_;
  History inner_history_;
  KnownTau known_;
  Phase phase_ = Phase::kTotal;
  int bits_sent_ = 0;
  mpz_class code_;
  int hedge_index_ = 1;
  int reported_child_ = 0;
  int shift_bits_ = 0;
  mpz_class reach_;
  Rational w_reported_;
  Rational shift_;  // reported shift for reported_child_
  Rational total_;
  Rational offset_;
  std::uint64_t report_id_ = 0;
};

// Honest play: the inner strategy's moves, exact expected utility, and
// shifts equal to the change in true expected utility, rounded to nearest.
class ExpostStrategy final : public BuyerStrategy {
 public:
  ExpostStrategy(BuyerStrategy& inner, const Valuation& v,
                 const EvalOptions& options = {});
  int choose(const ProtocolState& state, const History& history) override;

 private:
  mpz_class total_code(const ExpostState& s);
  mpz_class shift_code(const ExpostState& s);  // offset binary
  Rational continuation(const ProtocolState& state, const History& history,
                        const KnownTau& known);

  BuyerStrategy& inner_;
  const Valuation& v_;
  EvalOptions options_;
  std::uint64_t cache_id_ = 0;
  mpz_class cache_code_;
};

// Upper bound on buyer bits added by the wrapper over `hedged_moves` random
// moves whose lighter outcome has probability at least `min_weight`.
std::int64_t expost_overhead_bound(const HedgeConfig& config, std::int64_t hedged_moves,
                                   const Rational& min_weight);

}  // namespace auctionwire

#endif  // AUCTIONWIRE_EXPOST_IR_H_
