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

// Prior families on which full revenue needs long messages: types are
// indexed by the sets of a nearly disjoint set system, and each prior in a
// family assigns the sets values drawn from an equal-revenue distribution.

#ifndef AUCTIONWIRE_HARD_INSTANCES_H_
#define AUCTIONWIRE_HARD_INSTANCES_H_

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "auctionwire/menu.h"
#include "auctionwire/protocol.h"

namespace auctionwire {

class DesignFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParameterGuard : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Sets of size floor(eps*n) over [n] whose pairwise intersections are at
// most floor((1+delta)*eps^2*n).
struct WeakDesign {
  int n = 0;
  Rational eps;
  Rational delta;
  int set_size = 0;
  int intersection_bound = 0;
  std::vector<Bundle> sets;

  std::size_t size() const { return sets.size(); }
  // Largest |x ∩ x'| / |x'| over distinct pairs (0 for a single set).
  Rational max_overlap_ratio() const;
};

// Throws DesignFailure unless sizes, distinctness and intersections hold.
void verify_design(const WeakDesign& design);

WeakDesign gen_weak_design(int n, const Rational& eps, const Rational& delta,
                           int count, std::uint64_t seed);

// Support eps^(l-1) < ... < eps < 1; value eps^t has probability
// proportional to eps^(l-1-t), so value times probability is constant.
class EqualRevenueDist {
 public:
  EqualRevenueDist(int levels, Rational eps);

  int levels() const { return levels_; }
  const Rational& eps() const { return eps_; }
  // Level t has value eps^t.
  const Rational& value(int level) const { return values_.at(level); }
  const Rational& prob(int level) const { return probs_.at(level); }

 private:
  int levels_;
  Rational eps_;
  std::vector<Rational> values_;
  std::vector<Rational> probs_;
};

// One level per coordinate.
using CodeVector = std::vector<int>;

std::vector<CodeVector> sample_code_vectors(int length,
                                            const EqualRevenueDist& dist,
                                            int count, std::uint64_t seed);

// Among the first m vectors: the fraction of coordinates where every level's
// count is within (1 +- eta) * prob * m.
Rational low_discrepancy_fraction(const std::vector<CodeVector>& codes,
                                  const EqualRevenueDist& dist, int m,
                                  const Rational& eta);

enum class HardFamily { kUnitDemand, kXos };

struct HardPrior {
  HardFamily family = HardFamily::kUnitDemand;
  int n_items = 0;
  // Unit demand: the sets of interest. XOS: the interaction patterns over
  // clauses.
  WeakDesign design;
  WeakDesign clauses;  // XOS only
  Rational gamma;      // XOS only
  CodeVector code;
  // Per design set: its value c(x) (unit demand) or the last item's
  // contribution (XOS).
  std::vector<Rational> set_values;
  // Value of each level of the code distribution.
  std::vector<Rational> level_values;
  // Uniform over the design; type k belongs to design set k.
  Prior prior;

  // Sum over types of weight times the value of all items.
  Rational welfare() const;
};

std::vector<HardPrior> build_unit_demand_family(const WeakDesign& design,
                                                const std::vector<CodeVector>& codes,
                                                const EqualRevenueDist& dist);

// Messages of a fixed bit length; each message maps to a lottery over
// outcomes, drawn by a chain of visible random moves. Unlisted messages end
// with nothing allocated and no payment.
class MessageProtocol final : public Protocol {
 public:
  using Lottery = std::vector<std::pair<Rational, Outcome>>;

  MessageProtocol(int message_bits, std::map<Bundle, Lottery> lotteries);
  std::unique_ptr<ProtocolState> root() const override;

  int message_bits() const { return shape_->message_bits; }
  const Lottery& lottery(Bundle message) const;
  const std::map<Bundle, Lottery>& lotteries() const { return shape_->lotteries; }

  struct Shape {
    int message_bits = 0;
    std::map<Bundle, Lottery> lotteries;
    Lottery empty;
  };

 private:
  std::shared_ptr<const Shape> shape_;
};

class MessageState final : public ProtocolState {
 public:
  explicit MessageState(std::shared_ptr<const MessageProtocol::Shape> shape)
      : shape_(std::move(shape)) {}

  NodeKind kind() const override;
  ChanceSpec chance() const override;
  void apply(int bit) override;
  Outcome outcome() const override;
  std::unique_ptr<ProtocolState> clone() const override {
    return std::make_unique<MessageState>(*this);
  }

  int bits_sent() const { return bits_sent_; }
  Bundle message() const { return message_; }

 private:
  const MessageProtocol::Lottery& current() const;
  void skip_empty();
  Rational remaining() const;

  std::shared_ptr<const MessageProtocol::Shape> shape_;
  int bits_sent_ = 0;
  Bundle message_ = 0;  // bit i is the i-th bit sent
  std::size_t entry_ = 0;
  bool resolved_ = false;
};

// Sends a fixed message.
class MessageStrategy final : public BuyerStrategy {
 public:
  explicit MessageStrategy(Bundle message) : message_(message) {}
  int choose(const ProtocolState& state, const History& history) override;

 private:
  Bundle message_;
};

// The buyer names its set; a uniform item of the set is allocated at the
// set's value. Full revenue, n message bits.
MessageProtocol optimal_protocol_unit_demand(const HardPrior& prior);

// Chance first picks a uniform position j in [0, set size); the buyer then
// names an item and a value level, which are allocated and charged
// unchecked.
class NontruthfulUnitDemand final : public Protocol {
 public:
  struct Shape {
    int n_items = 0;
    int set_size = 0;
    int item_bits = 0;
    int level_bits = 0;
    std::vector<Rational> level_values;
  };

  explicit NontruthfulUnitDemand(std::shared_ptr<const Shape> shape)
      : shape_(std::move(shape)) {}
  std::unique_ptr<ProtocolState> root() const override;
  const Shape& shape() const { return *shape_; }

 private:
  std::shared_ptr<const Shape> shape_;
};

class NontruthfulState final : public ProtocolState {
 public:
  explicit NontruthfulState(
      std::shared_ptr<const NontruthfulUnitDemand::Shape> shape);

  NodeKind kind() const override;
  unsigned allowed() const override;
  ChanceSpec chance() const override;
  void apply(int bit) override;
  Outcome outcome() const override;
  std::unique_ptr<ProtocolState> clone() const override {
    return std::make_unique<NontruthfulState>(*this);
  }

  const NontruthfulUnitDemand::Shape& shape() const { return *shape_; }
  bool picking() const { return !picked_; }
  int position() const { return position_; }
  int item_bits_sent() const { return item_bits_sent_; }
  int level_bits_sent() const { return level_bits_sent_; }

 private:
  std::shared_ptr<const NontruthfulUnitDemand::Shape> shape_;
  bool picked_ = false;
  int position_ = 0;
  int item_ = 0;
  int item_bits_sent_ = 0;
  int level_ = 0;
  int level_bits_sent_ = 0;
};

NontruthfulUnitDemand nontruthful_impl_unit_demand(const HardPrior& prior);

// Names the position-th item of `set` and the value level.
class NontruthfulStrategy final : public BuyerStrategy {
 public:
  NontruthfulStrategy(Bundle set, int level) : set_(set), level_(level) {}
  int choose(const ProtocolState& state, const History& history) override;

 private:
  Bundle set_;
  int level_;
};

struct XosParams {
  int n = 0;
  Rational eps0, delta0;  // clause design over the first n-1 items
  Rational eps1, delta1;  // interaction patterns over the clauses
  Rational eta;
  Rational gamma;
  int clause_count = 0;
  int pattern_count = 0;
  int prior_count = 0;
  std::uint64_t seed = 0;
};

// Clause t gives each of its items weight 1/((2-gamma)|clause|); the last
// item adds w in {1/2, 1} to every clause its pattern marks.
std::vector<HardPrior> build_xos_family(const XosParams& params);

// The buyer names its pattern; a uniform marked clause plus the last item is
// allocated at w + 1/(2-gamma).
MessageProtocol optimal_protocol_xos(const HardPrior& prior);

// Honest message of type k under a family's optimal protocol.
Bundle honest_message(const HardPrior& prior, std::size_t type);

struct UnitDemandPreset {
  std::string name;
  int n;
  Rational eps1, delta1, eps2;
  int levels;
  int sets;
};

// "ud16", "ud32", "ud64"; throws std::invalid_argument otherwise.
UnitDemandPreset unit_demand_preset(const std::string& name);
// "xos64".
XosParams xos_preset(const std::string& name);

// Checks eps1*(1+delta1) < eps2^(levels-1); throws ParameterGuard.
void check_unit_demand_guard(const UnitDemandPreset& preset);

std::vector<HardPrior> unit_demand_family(const UnitDemandPreset& preset,
                                          int priors, std::uint64_t seed);

// Rank oracle of a matroid over the items. Declared so that an external
// construction of gross-substitutes hard instances can be plugged in.
class MatroidRankOracle {
 public:
  virtual ~MatroidRankOracle() = default;
  virtual int n_items() const = 0;
  virtual int rank(Bundle set) const = 0;
};

}  // namespace auctionwire

#endif  // AUCTIONWIRE_HARD_INSTANCES_H_
