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

#include <atomic>

#include "auctionwire/backward_induction.h"  // SearchBudgetExceeded

namespace auctionwire {

namespace {

// Bits needed to write every integer in [0, max].
int bits_to_hold(const mpz_class& max) {
  return max == 0 ? 0 : static_cast<int>(mpz_sizeinbase(max.get_mpz_t(), 2));
}

mpz_class floor_of(const Rational& q) {
  mpz_class out;
  mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

mpz_class ceil_of(const Rational& q) {
  mpz_class out;
  mpz_cdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

// Nearest integer, halves away from zero.
mpz_class round_nearest(const Rational& q) {
  const Rational half(1, 2);
  return q >= 0 ? floor_of(q + half) : mpz_class(-floor_of(-q + half));
}

mpz_class pow2(int k) {
  mpz_class out = 1;
  out <<= k;
  return out;
}

// The total is reported on a grid of 2 eps, so nearest rounding is within eps.
Rational total_grid(const HedgeConfig& c) { return 2 * c.eps; }

mpz_class max_total(const HedgeConfig& c) { return floor_of(c.big_u / total_grid(c)); }

int bit_of(const mpz_class& code, int position) {
  return mpz_tstbit(code.get_mpz_t(), static_cast<mp_bitcnt_t>(position));
}

std::uint64_t next_report_id() {
  static std::atomic<std::uint64_t> counter{0};
  return ++counter;
}

const ExpostState& as_expost(const ProtocolState& state) {
  const auto* s = dynamic_cast<const ExpostState*>(&state);
  if (s == nullptr) throw std::invalid_argument("not a hedged protocol state");
  return *s;
}

}  // namespace

HedgeConfig make_hedge_config(const Rational& eps, const Rational& big_u) {
  if (eps <= 0) throw std::invalid_argument("eps must be positive");
  if (big_u <= 0) throw std::invalid_argument("U must be positive");
  HedgeConfig c;
  c.eps = eps;
  c.big_u = big_u;
  c.total_bits = bits_to_hold(max_total(c));
  return c;
}

Rational shift_grid(const HedgeConfig& config, int index) {
  return 2 * config.eps / Rational(pow2(index));
}

mpz_class shift_reach(const HedgeConfig& config, int index, const Rational& w_reported) {
  return ceil_of(2 * config.big_u * (1 - w_reported) / shift_grid(config, index));
}

int shift_bits(const HedgeConfig& config, int index, const Rational& w_reported) {
  return bits_to_hold(2 * shift_reach(config, index, w_reported));
}

ExpostProtocol::ExpostProtocol(std::shared_ptr<const Protocol> inner,
                               const Rational& eps, const Rational& big_u)
    : inner_(std::move(inner)),
      config_(std::make_shared<const HedgeConfig>(make_hedge_config(eps, big_u))) {
  if (!inner_) throw std::invalid_argument("null inner protocol");
}

std::unique_ptr<ProtocolState> ExpostProtocol::root() const {
  return std::make_unique<ExpostState>(config_, inner_->root());
}

ExpostState::ExpostState(std::shared_ptr<const HedgeConfig> config,
                         std::unique_ptr<ProtocolState> inner)
    : config_(std::move(config)),
      inner_(std::move(inner)),
      report_id_(next_report_id()) {
  if (config_->total_bits == 0) advance();
}

ExpostState::ExpostState(const ExpostState& other)
    : config_(other.config_),
      inner_(other.inner_->clone()),
      inner_history_(other.inner_history_),
      known_(other.known_),
      phase_(other.phase_),
      bits_sent_(other.bits_sent_),
      code_(other.code_),
      hedge_index_(other.hedge_index_),
      reported_child_(other.reported_child_),
      shift_bits_(other.shift_bits_),
      reach_(other.reach_),
      w_reported_(other.w_reported_),
      shift_(other.shift_),
      total_(other.total_),
      offset_(other.offset_),
      report_id_(other.report_id_) {}

std::optional<Rational> ExpostState::open_weight() const {
  const ChanceSpec spec = inner_->chance();
  if (spec.kind == ChanceSpec::Kind::kTauBit &&
      known_.count({spec.stream, spec.index}) != 0) {
    return std::nullopt;
  }
  Rational p0 = spec.p_zero();
  if (p0 == 0 || p0 == 1) return std::nullopt;
  return p0;
}

void ExpostState::advance() {
  const NodeKind k = inner_->kind();
  if (k == NodeKind::kLeaf) {
    phase_ = Phase::kLeaf;
    return;
  }
  if (k == NodeKind::kChance) {
    if (auto p0 = open_weight()) {
      // The heavier outcome is derived; ties derive outcome 1.
      const int derived = 1 - *p0 >= *p0 ? 1 : 0;
      reported_child_ = 1 - derived;
      w_reported_ = reported_child_ == 0 ? *p0 : 1 - *p0;
      reach_ = auctionwire::shift_reach(*config_, hedge_index_, w_reported_);
      shift_bits_ = auctionwire::shift_bits(*config_, hedge_index_, w_reported_);
      phase_ = Phase::kShift;
      bits_sent_ = 0;
      code_ = 0;
      report_id_ = next_report_id();
      if (shift_bits_ == 0) finish_shift();
      return;
    }
  }
  phase_ = Phase::kInner;
}

NodeKind ExpostState::kind() const {
  switch (phase_) {
    case Phase::kInner:
      return inner_->kind();
    case Phase::kLeaf:
      return NodeKind::kLeaf;
    default:
      return NodeKind::kBuyer;
  }
}

unsigned ExpostState::allowed() const {
  return phase_ == Phase::kInner ? inner_->allowed() : (kAllowZero | kAllowOne);
}

ChanceSpec ExpostState::chance() const {
  if (phase_ != Phase::kInner) throw std::logic_error("not a chance node");
  return inner_->chance();
}

void ExpostState::apply(int bit) {
  switch (phase_) {
    case Phase::kTotal:
      code_ = code_ * 2 + bit;
      if (++bits_sent_ == config_->total_bits) {
        if (code_ > max_total(*config_)) {
          throw ReportOutOfRange("expected utility report above U");
        }
        total_ = Rational(code_) * total_grid(*config_);
        advance();
      }
      return;
    case Phase::kShift:
      code_ = code_ * 2 + bit;
      if (++bits_sent_ == shift_bits_) finish_shift();
      return;
    case Phase::kInner: {
      const bool chance = inner_->kind() == NodeKind::kChance;
      const bool hedged = chance && open_weight().has_value();
      if (chance) {
        const ChanceSpec spec = inner_->chance();
        if (spec.kind == ChanceSpec::Kind::kTauBit) {
          known_.emplace(std::make_pair(spec.stream, spec.index), bit);
        }
      }
      if (hedged) {
        offset_ += bit == reported_child_
                       ? shift_
                       : Rational(-w_reported_ * shift_ / (1 - w_reported_));
        ++hedge_index_;
      }
      push_event(inner_history_, *inner_, bit);
      inner_->apply(bit);
      advance();
      return;
    }
    case Phase::kLeaf:
      throw std::logic_error("apply at a leaf");
  }
}

void ExpostState::finish_shift() {
  if (code_ > 2 * reach_) throw ReportOutOfRange("utility shift outside the reachable range");
  shift_ = Rational(code_ - reach_) * shift_grid(*config_, hedge_index_);
  phase_ = Phase::kInner;
}

Outcome ExpostState::outcome() const {
  if (phase_ != Phase::kLeaf) throw std::logic_error("not a leaf");
  Outcome o = inner_->outcome();
  o.payment += offset_;
  return o;
}

ExpostStrategy::ExpostStrategy(BuyerStrategy& inner, const Valuation& v,
                               const EvalOptions& options)
    : inner_(inner), v_(v), options_(options) {}

Rational ExpostStrategy::continuation(const ProtocolState& state,
                                      const History& history,
                                      const KnownTau& known) {
  const OutcomeLaw law = evaluate_from(state, inner_, history, known, options_);
  if (law.unexplored > 0) {
    throw SearchBudgetExceeded("continuation utility needs a larger node budget");
  }
  return law.expected_utility(v_);
}

mpz_class ExpostStrategy::total_code(const ExpostState& s) {
  const Rational t = continuation(s.inner(), s.inner_history(), s.known());
  mpz_class code = round_nearest(t / total_grid(s.config()));
  if (code < 0) code = 0;
  const mpz_class cap = max_total(s.config());
  return code > cap ? cap : code;
}

mpz_class ExpostStrategy::shift_code(const ExpostState& s) {
  const ProtocolState& node = s.inner();
  const Rational here = continuation(node, s.inner_history(), s.known());
  auto child = node.clone();
  History history = s.inner_history();
  KnownTau known = s.known();
  const ChanceSpec spec = node.chance();
  if (spec.kind == ChanceSpec::Kind::kTauBit) {
    known[{spec.stream, spec.index}] = s.reported_child();
  }
  push_event(history, node, s.reported_child());
  child->apply(s.reported_child());
  const Rational there = continuation(*child, history, known);
  // Shifting by the true change keeps the derived outcome's drift bounded
  // by the rounding of the reported one.
  const mpz_class& reach = s.shift_reach();
  mpz_class code = round_nearest((there - here) / shift_grid(s.config(), s.hedge_index()));
  if (code > reach) code = reach;
  if (code < -reach) code = -reach;
  return code + reach;
}

int ExpostStrategy::choose(const ProtocolState& state, const History&) {
  const ExpostState& s = as_expost(state);
  if (s.phase() == ExpostState::Phase::kInner) {
    return inner_.choose(s.inner(), s.inner_history());
  }
  // A report spans several bits; compute it once per report.
  if (s.report_id() != cache_id_) {
    cache_code_ = s.phase() == ExpostState::Phase::kTotal ? total_code(s)
                                                           : shift_code(s);
    cache_id_ = s.report_id();
  }
  switch (s.phase()) {
    case ExpostState::Phase::kTotal:
      return bit_of(cache_code_, s.config().total_bits - 1 - s.report_bits_sent());
    case ExpostState::Phase::kShift:
      return bit_of(cache_code_, s.shift_bits() - 1 - s.report_bits_sent());
    default:
      throw std::logic_error("no buyer move here");
  }
}

std::int64_t expost_overhead_bound(const HedgeConfig& config, std::int64_t hedged_moves,
                                   const Rational& min_weight) {
  if (min_weight <= 0 || min_weight > Rational(1, 2)) {
    throw std::invalid_argument("min_weight must lie in (0, 1/2]");
  }
  std::int64_t bits = config.total_bits;
  for (std::int64_t i = 1; i <= hedged_moves; ++i) {
    bits += shift_bits(config, static_cast<int>(i), min_weight);
  }
  return bits;
}

}  // namespace auctionwire
