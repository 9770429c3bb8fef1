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

#ifndef AUCTIONWIRE_PROTOCOL_H_
#define AUCTIONWIRE_PROTOCOL_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "auctionwire/menu.h"
#include "auctionwire/rational.h"

namespace auctionwire {

class StepLimitExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A buyer bit that leaves no consistent continuation.
class InfeasibleMove : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Outcome {
  Bundle alloc_mask = 0;
  Rational payment;
  // Set by protocols that do not enforce the outcome they are told.
  bool flagged = false;

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

enum class NodeKind { kBuyer, kChance, kLeaf };

// A probability with its first 64 binary digits cached, so that sampling
// "fresh uniform < value" usually needs one machine word.
class Threshold {
 public:
  explicit Threshold(Rational value);

  const Rational& value() const { return value_; }
  // Resolves uniform < value by lazily drawing uniform bits from `rng`.
  bool sample_below(std::mt19937_64& rng) const;

 private:
  Rational value_;
  std::uint64_t head_ = 0;  // floor(value * 2^64), when value < 1
  bool is_one_ = false;
};

struct ChanceSpec {
  enum class Kind {
    // The next binary digit of a shared uniform; child = digit.
    kTauBit,
    // Child 0 with probability threshold->value(), else child 1.
    kWeighted,
  };

  static ChanceSpec tau(int stream, std::int64_t index, bool visible = true) {
    ChanceSpec c;
    c.kind = Kind::kTauBit;
    c.stream = stream;
    c.index = index;
    c.visible = visible;
    return c;
  }
  static ChanceSpec weighted(std::shared_ptr<const Threshold> threshold,
                             bool visible = true) {
    ChanceSpec c;
    c.kind = Kind::kWeighted;
    c.threshold = std::move(threshold);
    c.visible = visible;
    return c;
  }
  static ChanceSpec weighted(const Rational& p_zero, bool visible = true) {
    return weighted(std::make_shared<const Threshold>(p_zero), visible);
  }

  // Probability of child 0, ignoring any tau digits already known.
  Rational p_zero() const;

  Kind kind = Kind::kTauBit;
  int stream = 0;
  std::int64_t index = 0;
  std::shared_ptr<const Threshold> threshold;
  bool visible = true;
};

inline constexpr unsigned kAllowZero = 1u;
inline constexpr unsigned kAllowOne = 2u;

// A node of a lazily expanded protocol tree. States are mutated in place by
// apply() and duplicated with clone() where a search needs to branch.
class ProtocolState {
 public:
  virtual ~ProtocolState() = default;

  virtual NodeKind kind() const = 0;
  // Buyer nodes: bitmask of kAllowZero / kAllowOne (never empty).
  virtual unsigned allowed() const { return kAllowZero | kAllowOne; }
  // Chance nodes only.
  virtual ChanceSpec chance() const {
    throw std::logic_error("not a chance node");
  }
  virtual void apply(int bit) = 0;
  // Leaf nodes only.
  virtual Outcome outcome() const = 0;
  // An outcome that is already fixed almost surely whatever happens next.
  // The remaining steps only refine public randomness.
  virtual std::optional<Outcome> settled() const { return std::nullopt; }
  virtual std::unique_ptr<ProtocolState> clone() const = 0;

  bool forced() const {
    const unsigned a = allowed();
    return a == kAllowZero || a == kAllowOne;
  }
};

class Protocol {
 public:
  virtual ~Protocol() = default;
  virtual std::unique_ptr<ProtocolState> root() const = 0;
};

struct HistoryEvent {
  enum class Kind : std::uint8_t { kBuyer, kForced, kChance, kHidden };
  Kind kind;
  std::uint8_t bit;  // 0 for hidden chance events
};
using History = std::vector<HistoryEvent>;

// A deterministic buyer strategy. It is consulted only at unforced buyer
// nodes and sees the public part of the path.
class BuyerStrategy {
 public:
  virtual ~BuyerStrategy() = default;
  virtual int choose(const ProtocolState& state, const History& history) = 0;
  // A strategy may declare that, from here on, the outcome it will reach is
  // fixed almost surely. Exact evaluation stops at such nodes.
  virtual std::optional<Outcome> settled(const ProtocolState& state,
                                         const History& history) {
    (void)state;
    (void)history;
    return std::nullopt;
  }
};

// Always the lowest allowed bit.
class ZeroStrategy final : public BuyerStrategy {
 public:
  int choose(const ProtocolState& state, const History& history) override;
};

// Lazily drawn uniform bits, counter based: bit k of stream s is a fixed
// function of (seed, s, k), so repeated reads always agree.
class TauStream {
 public:
  explicit TauStream(std::uint64_t seed) : seed_(seed) {}

  // Bits are 1-indexed: bit(s, 1) is the first digit after the binary point.
  int bit(int stream, std::int64_t index);
  std::int64_t prefix_used(int stream = 0) const;

 private:
  std::uint64_t seed_;
  std::map<int, std::int64_t> used_;
  int cached_stream_ = -1;
  std::int64_t cached_word_ = -1;
  std::uint64_t cached_bits_ = 0;
};

struct Transcript {
  std::uint64_t seed = 0;
  std::vector<std::uint8_t> buyer_bits;  // unforced bits only
  std::int64_t forced_bits = 0;
  std::vector<std::uint8_t> chance_bits;  // visible and hidden draws
  std::int64_t rounds = 0;                // chance nodes traversed
  std::int64_t depth = 0;                 // all nodes traversed
  std::int64_t tau_prefix_used = 0;
  Outcome outcome;
};

struct RunOptions {
  // Hard cap on traversed nodes; 0 means "read AUCTIONWIRE_STEP_CAP, else
  // 10^6".
  std::int64_t step_cap = 0;
};

std::int64_t default_step_cap();

Transcript run(const Protocol& protocol, BuyerStrategy& strategy,
               std::uint64_t seed, const RunOptions& options = {});

// Distribution of outcomes under a fixed strategy, computed by exhaustive
// integration over chance. Unexplored mass (node budget) is reported.
struct OutcomeLaw {
  std::map<Bundle, Rational> alloc;
  Rational expected_payment;
  Rational flagged;
  Rational unexplored;

  ItemProbs item_marginals(int n_items) const;
  Rational expected_value(const Valuation& v) const;
  Rational expected_utility(const Valuation& v) const {
    return expected_value(v) - expected_payment;
  }
};

// tau digits already revealed on a path, keyed by (stream, index).
using KnownTau = std::map<std::pair<int, std::int64_t>, int>;

struct EvalOptions {
  std::int64_t node_budget = 4'000'000;
};

OutcomeLaw evaluate(const Protocol& protocol, BuyerStrategy& strategy,
                    const EvalOptions& options = {});
// Continues from an interior state with its path history and known digits.
OutcomeLaw evaluate_from(const ProtocolState& state, BuyerStrategy& strategy,
                         const History& history, const KnownTau& known,
                         const EvalOptions& options = {});

// Records one step into a history, masking hidden chance draws.
void push_event(History& history, const ProtocolState& before, int bit);

}  // namespace auctionwire

#endif  // AUCTIONWIRE_PROTOCOL_H_
