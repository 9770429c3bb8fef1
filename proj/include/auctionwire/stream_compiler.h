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

// Threshold streaming protocols. A uniform threshold is revealed one binary
// digit per round; in each round the buyer first sends the next digit of
// every coordinate of the menu line it commits to. A coordinate is decided
// once its prefix departs from the threshold's prefix.
//
// Additive menus stream one coordinate per item plus the payment
// probability. Bundle menus stream the cumulative interval boundaries of a
// shared bundle order plus the payment probability.

#ifndef AUCTIONWIRE_STREAM_COMPILER_H_
#define AUCTIONWIRE_STREAM_COMPILER_H_

#include <memory>
#include <optional>
#include <vector>

#include "auctionwire/menu.h"
#include "auctionwire/protocol.h"
#include "auctionwire/rational.h"

namespace auctionwire {

class NonDyadicInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct BundleMenuLine {
  // Cumulative boundaries q_1 <= ... <= q_{B-1}; bundle b owns [q_b, q_{b+1})
  // with q_0 = 0 and q_B = 1.
  std::vector<Rational> boundaries;
  Rational pay_prob;
};

struct BundleMenu {
  int n_items = 0;
  Rational cap;
  // Public bundle order shared by every line.
  std::vector<Bundle> bundles;
  std::vector<BundleMenuLine> lines;

  std::size_t bundle_count() const { return bundles.size(); }
  BundleDist distribution(std::size_t line) const;
  // Orders the union of all lines' support by decreasing mask, so a single
  // item sits first and is allocated iff the threshold is below its
  // probability.
  static BundleMenu from_normalized(const NormalizedMenu& menu);
  void validate() const;
};

// The validated digit expansion of every coordinate of every line.
class StreamTable {
 public:
  StreamTable(std::vector<std::vector<Dyadic>> lines);

  std::size_t line_count() const { return lines_.size(); }
  int coord_count() const { return coords_; }
  int words() const { return words_; }
  const Dyadic& coord(std::size_t line, int c) const { return lines_[line][c]; }
  // Rounds after which every coordinate of `line` repeats one digit forever.
  int precision(std::size_t line) const { return precision_[line]; }
  // Lines whose digit `round` of coordinate `c` is 1, as a word mask.
  const std::uint64_t* ones(int c, std::int64_t round) const;

 private:
  std::vector<std::vector<Dyadic>> lines_;
  int coords_ = 0;
  int words_ = 0;
  std::vector<int> precision_;
  std::vector<std::uint64_t> ones_;
};

class StreamProtocol final : public Protocol {
 public:
  enum class Mode { kAdditive, kBundle };

  StreamProtocol(Mode mode, int n_items, Rational cap,
                 std::vector<Bundle> bundles,
                 std::shared_ptr<const StreamTable> table);

  std::unique_ptr<ProtocolState> root() const override;

  struct Shape {
    Mode mode;
    int n_items;
    Rational cap;
    std::vector<Bundle> bundles;
    std::shared_ptr<const StreamTable> table;
  };

  Mode mode() const { return shape_->mode; }
  int n_items() const { return shape_->n_items; }
  const Rational& cap() const { return shape_->cap; }
  const std::vector<Bundle>& bundles() const { return shape_->bundles; }
  const StreamTable& table() const { return *shape_->table; }
  const std::shared_ptr<const StreamTable>& shared_table() const {
    return shape_->table;
  }
  const std::shared_ptr<const Shape>& shape() const { return shape_; }

 private:
  std::shared_ptr<const Shape> shape_;
};

class StreamState final : public ProtocolState {
 public:
  explicit StreamState(std::shared_ptr<const StreamProtocol::Shape> shape);

  NodeKind kind() const override;
  unsigned allowed() const override;
  ChanceSpec chance() const override;
  void apply(int bit) override;
  Outcome outcome() const override;
  std::optional<Outcome> settled() const override;
  std::unique_ptr<ProtocolState> clone() const override;

  // 1-based round whose digits are being exchanged.
  std::int64_t round() const { return round_; }
  // Coordinate whose digit the buyer sends next (buyer nodes only).
  int coordinate() const { return coord_; }
  bool feasible(std::size_t line) const;
  std::optional<std::size_t> only_line() const;

 private:
  Outcome outcome_from(const std::vector<std::int8_t>& status) const;
  // Index of the threshold's bundle when decided, else -1.
  int decided_bundle(const std::vector<std::int8_t>& status) const;
  bool finished() const;

  std::shared_ptr<const StreamProtocol::Shape> shape_;
  std::int64_t round_ = 1;
  int coord_ = 0;
  bool leaf_ = false;
  std::vector<std::uint64_t> feasible_;
  std::vector<std::uint8_t> sent_;
  // +1: coordinate above the threshold, -1: below, 0: undecided.
  std::vector<std::int8_t> status_;
};

StreamProtocol compile_additive(const NormalizedMenu& menu);
StreamProtocol compile_bundle(const BundleMenu& menu);

// Streams the canonical expansion of one fixed line.
class LineStrategy final : public BuyerStrategy {
 public:
  LineStrategy(const StreamProtocol& protocol, std::size_t line);
  int choose(const ProtocolState& state, const History& history) override;
  std::size_t line() const { return line_; }

 private:
  std::shared_ptr<const StreamTable> table_;
  std::size_t line_;
};

std::size_t best_response(const Valuation& v, const NormalizedMenu& menu);

LineStrategy honest_strategy_additive(const StreamProtocol& protocol,
                                      const NormalizedMenu& menu,
                                      const Valuation& v);

// Coordinates streamed for an additive line: item probabilities then the
// payment probability. Rejects non-dyadic values.
std::vector<Rational> exact_alloc_prob(const NormalizedLine& line);

// Expected number of threshold digits drawn before every coordinate is
// decided: the sum over r >= 0 of the measure of the union of the
// coordinates' 2^-r dyadic cells.
Rational exact_expected_rounds(const std::vector<Rational>& coords);

// Exact conversion; throws NonDyadicInput naming a truncation depth to use
// with Dyadic::truncate.
Dyadic require_dyadic(const Rational& q, const char* what);

// The bundle distribution realized by allocating {i : p_i > t} for a uniform
// threshold t, which is what the additive protocol does.
BundleDist threshold_coupling(const ItemProbs& probs);

}  // namespace auctionwire

#endif  // AUCTIONWIRE_STREAM_COMPILER_H_
