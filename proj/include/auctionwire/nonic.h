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

// A protocol that implements a bundle menu without making honesty optimal:
// the seller reveals threshold digits, the buyer says when it has seen
// enough and then announces the payment bit and the bundle index. Nothing
// checks the announcement; impossible announcements are only flagged.

#ifndef AUCTIONWIRE_NONIC_H_
#define AUCTIONWIRE_NONIC_H_

#include <memory>
#include <vector>

#include "auctionwire/protocol.h"
#include "auctionwire/stream_compiler.h"

namespace auctionwire {

class NonicProtocol final : public Protocol {
 public:
  struct Shape {
    BundleMenu menu;
    std::shared_ptr<const StreamTable> table;  // boundaries, then pay_prob
    int alloc_bits = 0;
  };

  explicit NonicProtocol(std::shared_ptr<const Shape> shape)
      : shape_(std::move(shape)) {}
  std::unique_ptr<ProtocolState> root() const override;
  const Shape& shape() const { return *shape_; }

 private:
  std::shared_ptr<const Shape> shape_;
};

class NonicState final : public ProtocolState {
 public:
  enum class Phase { kReveal, kDecide, kPayBit, kAllocBits, kLeaf };

  explicit NonicState(std::shared_ptr<const NonicProtocol::Shape> shape)
      : shape_(std::move(shape)) {}

  NodeKind kind() const override;
  unsigned allowed() const override;
  ChanceSpec chance() const override;
  void apply(int bit) override;
  Outcome outcome() const override;
  std::unique_ptr<ProtocolState> clone() const override {
    return std::make_unique<NonicState>(*this);
  }

  Phase phase() const { return phase_; }
  const std::vector<std::uint8_t>& tau_prefix() const { return prefix_; }
  int alloc_bits_sent() const { return alloc_bits_sent_; }
  const NonicProtocol::Shape& shape() const { return *shape_; }

 private:
  bool announcement_possible() const;

  std::shared_ptr<const NonicProtocol::Shape> shape_;
  Phase phase_ = Phase::kReveal;
  std::vector<std::uint8_t> prefix_;
  int pay_bit_ = 0;
  int alloc_index_ = 0;
  int alloc_bits_sent_ = 0;
};

NonicProtocol compile_nonic(const BundleMenu& menu);

// Coordinate comparisons of one line against a revealed threshold prefix:
// +1 above, -1 below, 0 undecided.
std::vector<std::int8_t> line_status(const StreamTable& table, std::size_t line,
                                     const std::vector<std::uint8_t>& prefix);

// Honest play for one line: stop once every coordinate is decided, then
// announce the resulting outcome.
class NonicLineStrategy final : public BuyerStrategy {
 public:
  explicit NonicLineStrategy(std::size_t line) : line_(line) {}
  int choose(const ProtocolState& state, const History& history) override;
  std::optional<Outcome> settled(const ProtocolState& state,
                                 const History& history) override;

 private:
  std::size_t line_;
};

// Plays `from` until the revealed prefix equals `trigger`, then plays `to`.
class SwitchStrategy final : public BuyerStrategy {
 public:
  SwitchStrategy(std::size_t from, std::size_t to,
                 std::vector<std::uint8_t> trigger)
      : from_(from), to_(to), trigger_(std::move(trigger)) {}
  int choose(const ProtocolState& state, const History& history) override;
  std::optional<Outcome> settled(const ProtocolState& state,
                                 const History& history) override;

 private:
  NonicLineStrategy& active(const NonicState& state);

  NonicLineStrategy from_;
  NonicLineStrategy to_;
  std::vector<std::uint8_t> trigger_;
};

// One-item menu q -> (item w.p. q, pay q^2) on the grid q = k/8, with the
// item listed first so it is allocated iff the threshold is below q.
BundleMenu quadratic_price_menu(int grid_bits = 3);

struct CheatReport {
  Rational value;
  Rational honest_q, honest_pay;
  Rational deviation_q, deviation_pay;
  // Conditional on the first threshold digit being 0, then 1.
  Rational honest_low, deviation_low;
  Rational honest_high, deviation_high;
  Rational gap_low;  // deviation_low - honest_low
  bool improves = false;
};

// Evaluates, for the single-item menu q -> (q, q^2) with unit cap, the
// buyer's conditional utilities after the first threshold digit is revealed.
// The honest report maximizes v*q - q^2; the deviation is the best report
// once the threshold is known to be below 1/2.
CheatReport demonstrate_cheat(const Rational& value = Rational(4, 3));

}  // namespace auctionwire

#endif  // AUCTIONWIRE_NONIC_H_
