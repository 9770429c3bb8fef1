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

#include <algorithm>

namespace auctionwire {

namespace {

// Index of the bundle whose interval holds the threshold, -1 if undecided.
int decided_bundle(const std::vector<std::int8_t>& status, int boundaries) {
  int below = -1;
  int above = boundaries;
  for (int j = 0; j < boundaries; ++j) {
    if (status[j] < 0) below = j;
    if (status[j] > 0 && above == boundaries) above = j;
  }
  return above == below + 1 ? above : -1;
}

Rational overlap(const Rational& lo, const Rational& hi, const Rational& a,
                 const Rational& b) {
  const Rational l = std::max(lo, a);
  const Rational h = std::min(hi, b);
  return h > l ? h - l : Rational(0);
}

const NonicState& as_nonic(const ProtocolState& state) {
  const auto* s = dynamic_cast<const NonicState*>(&state);
  if (s == nullptr) throw std::invalid_argument("not a nonic protocol state");
  return *s;
}

Outcome announced(const NonicProtocol::Shape& shape,
                  const std::vector<std::int8_t>& status) {
  const int boundaries = static_cast<int>(shape.menu.bundles.size()) - 1;
  const int b = decided_bundle(status, boundaries);
  if (b < 0) throw std::logic_error("bundle not decided");
  Outcome o;
  o.alloc_mask = shape.menu.bundles[b];
  if (status.back() > 0) o.payment = shape.menu.cap;
  return o;
}

}  // namespace

std::vector<std::int8_t> line_status(const StreamTable& table, std::size_t line,
                                     const std::vector<std::uint8_t>& prefix) {
  std::vector<std::int8_t> status(table.coord_count(), 0);
  for (int c = 0; c < table.coord_count(); ++c) {
    const Dyadic& d = table.coord(line, c);
    for (std::size_t k = 1; k <= prefix.size(); ++k) {
      const int digit = d.bit(static_cast<std::int64_t>(k));
      if (digit != prefix[k - 1]) {
        status[c] = digit ? 1 : -1;
        break;
      }
    }
  }
  return status;
}

std::unique_ptr<ProtocolState> NonicProtocol::root() const {
  return std::make_unique<NonicState>(shape_);
}

NodeKind NonicState::kind() const {
  switch (phase_) {
    case Phase::kReveal:
      return NodeKind::kChance;
    case Phase::kLeaf:
      return NodeKind::kLeaf;
    default:
      return NodeKind::kBuyer;
  }
}

unsigned NonicState::allowed() const {
  if (phase_ != Phase::kAllocBits) return kAllowZero | kAllowOne;
  // Keep the announced index below the bundle count.
  const int remaining = shape_->alloc_bits - alloc_bits_sent_ - 1;
  const std::uint64_t with_one =
      (static_cast<std::uint64_t>(alloc_index_) * 2 + 1) << remaining;
  return with_one < shape_->menu.bundles.size() ? (kAllowZero | kAllowOne)
                                                : kAllowZero;
}

ChanceSpec NonicState::chance() const {
  if (phase_ != Phase::kReveal) throw std::logic_error("not a chance node");
  return ChanceSpec::tau(0, static_cast<std::int64_t>(prefix_.size()) + 1);
}

void NonicState::apply(int bit) {
  switch (phase_) {
    case Phase::kReveal:
      prefix_.push_back(static_cast<std::uint8_t>(bit));
      phase_ = Phase::kDecide;
      return;
    case Phase::kDecide:
      phase_ = bit ? Phase::kPayBit : Phase::kReveal;
      return;
    case Phase::kPayBit:
      pay_bit_ = bit;
      phase_ = shape_->alloc_bits > 0 ? Phase::kAllocBits : Phase::kLeaf;
      return;
    case Phase::kAllocBits:
      if ((allowed() & (bit ? kAllowOne : kAllowZero)) == 0) {
        throw InfeasibleMove("bundle index out of range");
      }
      alloc_index_ = alloc_index_ * 2 + bit;
      if (++alloc_bits_sent_ == shape_->alloc_bits) phase_ = Phase::kLeaf;
      return;
    case Phase::kLeaf:
      throw std::logic_error("apply at a leaf");
  }
}

bool NonicState::announcement_possible() const {
  Rational lo = 0;
  Rational width = 1;
  for (auto digit : prefix_) {
    width /= 2;
    if (digit) lo += width;
  }
  const Rational hi = lo + width;
  const BundleMenu& menu = shape_->menu;
  for (const auto& line : menu.lines) {
    const Rational a = alloc_index_ == 0 ? Rational(0)
                                         : line.boundaries[alloc_index_ - 1];
    const Rational b = alloc_index_ < static_cast<int>(line.boundaries.size())
                           ? line.boundaries[alloc_index_]
                           : Rational(1);
    Rational l = std::max(lo, a);
    Rational h = std::min(hi, b);
    if (pay_bit_) {
      h = std::min(h, line.pay_prob);
    } else {
      l = std::max(l, line.pay_prob);
    }
    if (h > l) return true;
  }
  return false;
}

Outcome NonicState::outcome() const {
  if (phase_ != Phase::kLeaf) throw std::logic_error("not a leaf");
  Outcome o;
  o.alloc_mask = shape_->menu.bundles[alloc_index_];
  if (pay_bit_) o.payment = shape_->menu.cap;
  o.flagged = !announcement_possible();
  return o;
}

NonicProtocol compile_nonic(const BundleMenu& menu) {
  menu.validate();
  std::vector<std::vector<Dyadic>> rows;
  rows.reserve(menu.lines.size());
  for (const auto& line : menu.lines) {
    std::vector<Dyadic> row;
    row.reserve(line.boundaries.size() + 1);
    for (const auto& q : line.boundaries) row.push_back(require_dyadic(q, "boundary"));
    row.push_back(require_dyadic(line.pay_prob, "pay probability"));
    rows.push_back(std::move(row));
  }
  auto shape = std::make_shared<NonicProtocol::Shape>();
  shape->menu = menu;
  shape->table = std::make_shared<const StreamTable>(std::move(rows));
  shape->alloc_bits = ceil_log2(menu.bundles.size());
  return NonicProtocol(std::move(shape));
}

int NonicLineStrategy::choose(const ProtocolState& state, const History&) {
  const NonicState& s = as_nonic(state);
  const auto& shape = s.shape();
  const auto status = line_status(*shape.table, line_, s.tau_prefix());
  switch (s.phase()) {
    case NonicState::Phase::kDecide:
      return std::all_of(status.begin(), status.end(),
                         [](std::int8_t x) { return x != 0; })
                 ? 1
                 : 0;
    case NonicState::Phase::kPayBit:
      return status.back() > 0 ? 1 : 0;
    case NonicState::Phase::kAllocBits: {
      const int b = decided_bundle(
          status, static_cast<int>(shape.menu.bundles.size()) - 1);
      if (b < 0) throw std::logic_error("bundle not decided");
      const int shift = shape.alloc_bits - s.alloc_bits_sent() - 1;
      return (b >> shift) & 1;
    }
    default:
      throw std::logic_error("no buyer move here");
  }
}

std::optional<Outcome> NonicLineStrategy::settled(const ProtocolState& state,
                                                  const History&) {
  const NonicState& s = as_nonic(state);
  if (s.phase() != NonicState::Phase::kReveal &&
      s.phase() != NonicState::Phase::kDecide) {
    return std::nullopt;
  }
  const StreamTable& table = *s.shape().table;
  if (static_cast<int>(s.tau_prefix().size()) < table.precision(line_)) {
    return std::nullopt;
  }
  // Undecided coordinates equal the threshold's prefix and repeat one digit
  // from here on, so their comparisons are fixed almost surely.
  auto status = line_status(table, line_, s.tau_prefix());
  for (int c = 0; c < table.coord_count(); ++c) {
    if (status[c] == 0) status[c] = table.coord(line_, c).is_one() ? 1 : -1;
  }
  return announced(s.shape(), status);
}

NonicLineStrategy& SwitchStrategy::active(const NonicState& state) {
  const auto& prefix = state.tau_prefix();
  if (prefix.size() < trigger_.size()) return from_;
  return std::equal(trigger_.begin(), trigger_.end(), prefix.begin()) ? to_
                                                                      : from_;
}

int SwitchStrategy::choose(const ProtocolState& state, const History& history) {
  return active(as_nonic(state)).choose(state, history);
}

std::optional<Outcome> SwitchStrategy::settled(const ProtocolState& state,
                                               const History& history) {
  const NonicState& s = as_nonic(state);
  const auto& prefix = s.tau_prefix();
  const std::size_t shared = std::min(prefix.size(), trigger_.size());
  const bool on_track =
      std::equal(prefix.begin(), prefix.begin() + shared, trigger_.begin());
  // The switch may still fire: nothing is fixed yet.
  if (on_track && prefix.size() < trigger_.size()) return std::nullopt;
  return active(s).settled(state, history);
}

BundleMenu quadratic_price_menu(int grid_bits) {
  if (grid_bits < 1 || grid_bits > 10) {
    throw std::invalid_argument("grid_bits must be in [1, 10]");
  }
  BundleMenu menu;
  menu.n_items = 1;
  menu.cap = 1;
  menu.bundles = {Bundle{1}, Bundle{0}};
  const std::int64_t steps = std::int64_t{1} << grid_bits;
  for (std::int64_t k = 0; k <= steps; ++k) {
    const Rational q = ratio(k, steps);
    const Rational price = Dyadic::truncate(Rational(q * q), 20).value();
    menu.lines.push_back({{q}, price});
  }
  return menu;
}

CheatReport demonstrate_cheat(const Rational& value) {
  if (value < 0) throw std::invalid_argument("value must be non-negative");
  const Rational half(1, 2);
  // Utility of report (q, q^2) given the threshold lies in [lo, hi).
  auto conditional = [&](const Rational& q, const Rational& lo,
                         const Rational& hi) -> Rational {
    const Rational width = hi - lo;
    return (value * overlap(lo, hi, 0, q) - overlap(lo, hi, 0, Rational(q * q))) /
           width;
  };
  CheatReport r;
  r.value = value;
  r.honest_q = std::min(Rational(value / 2), Rational(1));
  r.honest_pay = r.honest_q * r.honest_q;
  // On [0, 1/2) reports above 1/2 buy nothing more and cost more, and below
  // it the conditional utility 2q(v - q) peaks at v/2.
  r.deviation_q = std::min(Rational(value / 2), half);
  r.deviation_pay = r.deviation_q * r.deviation_q;
  r.honest_low = conditional(r.honest_q, 0, half);
  r.deviation_low = conditional(r.deviation_q, 0, half);
  r.honest_high = conditional(r.honest_q, half, 1);
  r.deviation_high = conditional(r.deviation_q, half, 1);
  r.gap_low = r.deviation_low - r.honest_low;
  r.improves = r.gap_low > 0;
  return r;
}

}  // namespace auctionwire
