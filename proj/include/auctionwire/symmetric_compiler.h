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

// Protocols for unit-demand menus whose lines are symmetric within the parts
// of an item partition. A line is described by a payment, the partition, and
// for each part a histogram of allocation probabilities over a geometric
// grid. The buyer names a line, chance picks a part (or nothing), and the
// buyer then repeatedly sends the histogram of the first half of the
// remaining items while chance keeps one half with probability proportional
// to its mass.

#ifndef AUCTIONWIRE_SYMMETRIC_COMPILER_H_
#define AUCTIONWIRE_SYMMETRIC_COMPILER_H_

#include <map>
#include <memory>
#include <vector>

#include "auctionwire/menu.h"
#include "auctionwire/protocol.h"

namespace auctionwire {

class HistogramMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SymMenuLine {
  Rational payment;
  std::vector<std::vector<int>> partition;
  // Per part: grid index -> number of items of the part at that value.
  std::vector<std::map<int, int>> histograms;
};

class SymMenu {
 public:
  SymMenu(int n_items, Rational delta, std::vector<SymMenuLine> lines);

  int n_items() const { return n_items_; }
  const Rational& delta() const { return delta_; }
  const std::vector<SymMenuLine>& lines() const { return lines_; }
  std::size_t size() const { return lines_.size(); }

  // (1-delta)^k for k = 0..K with K = floor((3/delta) ln n), then 0.
  const std::vector<Rational>& grid() const { return grid_; }
  int zero_index() const { return static_cast<int>(grid_.size()) - 1; }

  Rational part_mass(std::size_t line, std::size_t part) const;
  Rational total_mass(std::size_t line) const;

 private:
  int n_items_;
  Rational delta_;
  std::vector<SymMenuLine> lines_;
  std::vector<Rational> grid_;
};

std::vector<Rational> symmetric_grid(int n_items, const Rational& delta);

class SymmetricProtocol final : public Protocol {
 public:
  struct Shape;

  explicit SymmetricProtocol(std::shared_ptr<const Shape> shape)
      : shape_(std::move(shape)) {}

  std::unique_ptr<ProtocolState> root() const override;
  const Shape& shape() const { return *shape_; }

 private:
  std::shared_ptr<const Shape> shape_;
};

struct SymmetricProtocol::Shape {
  std::shared_ptr<const SymMenu> menu;  // null for a stage-two protocol
  std::vector<Rational> grid;
  int line_bits = 0;
  int count_bits = 0;
  // Stage-two protocols start from this part directly.
  std::vector<int> start_items;
  std::vector<int> start_histogram;
  Rational start_payment;
};

class SymmetricState final : public ProtocolState {
 public:
  enum class Phase { kLine, kPart, kHistogram, kHalving, kLeaf };

  explicit SymmetricState(std::shared_ptr<const SymmetricProtocol::Shape> shape);

  NodeKind kind() const override;
  unsigned allowed() const override;
  ChanceSpec chance() const override;
  void apply(int bit) override;
  Outcome outcome() const override;
  std::unique_ptr<ProtocolState> clone() const override {
    return std::make_unique<SymmetricState>(*this);
  }

  Phase phase() const { return phase_; }
  int line_bits_sent() const { return line_bits_sent_; }
  int line_bits_total() const { return shape_->line_bits; }
  int count_bits_total() const { return shape_->count_bits; }
  // Items still in play, in order; the first half_size() form the left half.
  const std::vector<int>& items() const { return items_; }
  std::size_t half_size() const { return items_.size() / 2; }
  // Grid index whose count is being sent and the number of its bits sent.
  int grid_index() const { return grid_index_; }
  int count_bits_sent() const { return count_bits_sent_; }
  const std::vector<int>& histogram() const { return histogram_; }

 private:
  void settle_part();
  void start_halving();
  void enter_histogram();
  Rational mass(const std::vector<int>& histogram) const;
  bool count_feasible(int prefix, int bits_sent) const;

  std::shared_ptr<const SymmetricProtocol::Shape> shape_;
  Phase phase_ = Phase::kLine;
  int line_ = 0;
  int line_bits_sent_ = 0;
  std::size_t part_ = 0;
  std::vector<int> items_;
  std::vector<int> histogram_;
  std::vector<int> left_;  // sub-histogram under construction
  int grid_index_ = 0;
  int count_bits_sent_ = 0;
  int count_prefix_ = 0;
  int left_sum_ = 0;
  int allocated_ = -1;
  Rational payment_;
};

SymmetricProtocol compile_symmetric(const SymMenu& menu);

// Stage two alone on an explicit part and histogram; the masses need not
// sum to at most 1, so the leaf law is the conditional one.
SymmetricProtocol compile_symmetric_stage2(std::vector<int> items,
                                          std::vector<int> histogram,
                                          std::vector<Rational> grid,
                                          Rational payment);

// Names `line` and reports sub-histograms of a fixed assignment of grid
// indices to items.
class SymmetricStrategy final : public BuyerStrategy {
 public:
  SymmetricStrategy(int line, std::vector<int> assignment);
  int choose(const ProtocolState& state, const History& history) override;

 private:
  int line_;
  std::vector<int> assignment_;
};

struct SymmetricChoice {
  std::size_t line = 0;
  std::vector<int> assignment;  // grid index per item
  Rational utility;
};

// Exact line utility under the best assignment: within each part, the
// highest values receive the highest probabilities.
SymmetricChoice best_symmetric_assignment(const SymMenu& menu,
                                          std::size_t line, const Valuation& v);
// Highest utility over lines, lowest index on ties.
SymmetricChoice best_symmetric_response(const SymMenu& menu, const Valuation& v);

SymmetricStrategy honest_strategy_symmetric(const SymMenu& menu,
                                            std::size_t line,
                                            std::vector<int> assignment);

}  // namespace auctionwire

#endif  // AUCTIONWIRE_SYMMETRIC_COMPILER_H_
