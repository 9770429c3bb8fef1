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

#include "auctionwire/symmetric_compiler.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace auctionwire {

std::vector<Rational> symmetric_grid(int n_items, const Rational& delta) {
  if (delta <= 0 || delta >= 1) throw std::invalid_argument("delta must be in (0,1)");
  const int top = n_items >= 2 ? static_cast<int>(std::floor(
                                     3.0 / to_double(delta) * std::log(n_items)))
                               : 0;
  std::vector<Rational> grid;
  Rational value = 1;
  const Rational ratio = 1 - delta;
  for (int k = 0; k <= top; ++k) {
    grid.push_back(value);
    value *= ratio;
  }
  grid.push_back(Rational(0));
  return grid;
}

SymMenu::SymMenu(int n_items, Rational delta, std::vector<SymMenuLine> lines)
    : n_items_(n_items), delta_(std::move(delta)), lines_(std::move(lines)) {
  if (n_items_ < 1 || n_items_ > kMaxItems) {
    throw std::invalid_argument("item count must be in [1, 64]");
  }
  grid_ = symmetric_grid(n_items_, delta_);
  if (lines_.empty()) throw InvalidMenu("symmetric menu needs a line");
  bool has_zero = false;
  for (std::size_t l = 0; l < lines_.size(); ++l) {
    const auto& line = lines_[l];
    if (line.payment < 0) throw InvalidMenu("negative payment");
    if (line.partition.size() != line.histograms.size()) {
      throw InvalidMenu("one histogram per part is required");
    }
    std::vector<int> owner(n_items_, -1);
    for (std::size_t p = 0; p < line.partition.size(); ++p) {
      if (line.partition[p].empty()) throw InvalidMenu("empty part");
      for (int item : line.partition[p]) {
        if (item < 0 || item >= n_items_ || owner[item] != -1) {
          throw InvalidMenu("partition must cover each item exactly once");
        }
        owner[item] = static_cast<int>(p);
      }
      int count = 0;
      for (const auto& [g, c] : line.histograms[p]) {
        if (g < 0 || g > zero_index() || c < 0) {
          throw InvalidMenu("histogram entry outside the grid");
        }
        count += c;
      }
      if (count != static_cast<int>(line.partition[p].size())) {
        throw InvalidMenu("histogram counts must sum to the part size");
      }
    }
    if (std::find(owner.begin(), owner.end(), -1) != owner.end()) {
      throw InvalidMenu("partition must cover each item exactly once");
    }
    const Rational total = total_mass(l);
    if (total > 1) throw InvalidMenu("allocation mass exceeds 1");
    has_zero = has_zero || (total == 0 && line.payment == 0);
  }
  if (!has_zero) throw InvalidMenu("symmetric menu lacks the zero line");
}

Rational SymMenu::part_mass(std::size_t line, std::size_t part) const {
  Rational mass = 0;
  for (const auto& [g, c] : lines_.at(line).histograms.at(part)) {
    mass += grid_[g] * c;
  }
  return mass;
}

Rational SymMenu::total_mass(std::size_t line) const {
  Rational mass = 0;
  for (std::size_t p = 0; p < lines_.at(line).partition.size(); ++p) {
    mass += part_mass(line, p);
  }
  return mass;
}

std::unique_ptr<ProtocolState> SymmetricProtocol::root() const {
  return std::make_unique<SymmetricState>(shape_);
}

SymmetricState::SymmetricState(
    std::shared_ptr<const SymmetricProtocol::Shape> shape)
    : shape_(std::move(shape)) {
  if (shape_->menu) {
    if (shape_->line_bits == 0) settle_part();
    return;
  }
  items_ = shape_->start_items;
  histogram_ = shape_->start_histogram;
  payment_ = shape_->start_payment;
  enter_histogram();
}

NodeKind SymmetricState::kind() const {
  switch (phase_) {
    case Phase::kLine:
    case Phase::kHistogram:
      return NodeKind::kBuyer;
    case Phase::kPart:
    case Phase::kHalving:
      return NodeKind::kChance;
    case Phase::kLeaf:
      return NodeKind::kLeaf;
  }
  return NodeKind::kLeaf;
}

bool SymmetricState::count_feasible(int prefix, int bits_sent) const {
  const int g = grid_index_;
  const int rest = shape_->count_bits - bits_sent;
  const long lo = static_cast<long>(prefix) << rest;
  const long hi = std::min<long>(lo + (1L << rest) - 1, histogram_[g]);
  const long need = static_cast<long>(half_size()) - left_sum_;
  long tail = 0;
  for (std::size_t k = g + 1; k < histogram_.size(); ++k) tail += histogram_[k];
  return std::max(lo, need - tail) <= std::min(hi, need);
}

unsigned SymmetricState::allowed() const {
  unsigned out = 0;
  if (phase_ == Phase::kLine) {
    const long lines = static_cast<long>(shape_->menu->size());
    const int rest = shape_->line_bits - line_bits_sent_ - 1;
    for (int b = 0; b < 2; ++b) {
      if ((static_cast<long>(line_ * 2 + b) << rest) < lines) out |= 1u << b;
    }
    return out;
  }
  if (phase_ == Phase::kHistogram) {
    for (int b = 0; b < 2; ++b) {
      if (count_feasible(count_prefix_ * 2 + b, count_bits_sent_ + 1)) {
        out |= 1u << b;
      }
    }
    return out;
  }
  throw std::logic_error("not a buyer node");
}

Rational SymmetricState::mass(const std::vector<int>& histogram) const {
  Rational m = 0;
  for (std::size_t g = 0; g < histogram.size(); ++g) {
    if (histogram[g] != 0) m += shape_->grid[g] * histogram[g];
  }
  return m;
}

ChanceSpec SymmetricState::chance() const {
  if (phase_ == Phase::kPart) {
    const SymMenu& menu = *shape_->menu;
    Rational rest = 1 - menu.total_mass(line_);
    for (std::size_t p = part_; p < menu.lines()[line_].partition.size(); ++p) {
      rest += menu.part_mass(line_, p);
    }
    return ChanceSpec::weighted(menu.part_mass(line_, part_) / rest);
  }
  if (phase_ == Phase::kHalving) {
    return ChanceSpec::weighted(mass(left_) / mass(histogram_));
  }
  throw std::logic_error("not a chance node");
}

void SymmetricState::settle_part() {
  const SymMenu& menu = *shape_->menu;
  const auto& line = menu.lines()[line_];
  payment_ = line.payment;
  Rational rest = 1 - menu.total_mass(line_);
  for (std::size_t p = part_; p < line.partition.size(); ++p) {
    rest += menu.part_mass(line_, p);
  }
  while (part_ < line.partition.size()) {
    const Rational m = menu.part_mass(line_, part_);
    if (m == 0) {
      ++part_;
      continue;
    }
    if (m != rest) {
      phase_ = Phase::kPart;
      return;
    }
    items_ = line.partition[part_];
    std::sort(items_.begin(), items_.end());
    histogram_.assign(shape_->grid.size(), 0);
    for (const auto& [g, c] : line.histograms[part_]) histogram_[g] = c;
    enter_histogram();
    return;
  }
  phase_ = Phase::kLeaf;
  allocated_ = -1;
}

void SymmetricState::enter_histogram() {
  if (items_.size() <= 1) {
    phase_ = Phase::kLeaf;
    allocated_ = items_.empty() ? -1 : items_.front();
    return;
  }
  phase_ = Phase::kHistogram;
  left_.assign(histogram_.size(), 0);
  grid_index_ = 0;
  count_bits_sent_ = 0;
  count_prefix_ = 0;
  left_sum_ = 0;
}

void SymmetricState::start_halving() {
  phase_ = Phase::kHalving;
  const Rational p = mass(left_) / mass(histogram_);
  if (p == 0 || p == 1) apply(p == 1 ? 0 : 1);
}

void SymmetricState::apply(int bit) {
  switch (phase_) {
    case Phase::kLine:
      if (!((allowed() >> bit) & 1u)) throw InfeasibleMove("no such menu line");
      line_ = line_ * 2 + bit;
      if (++line_bits_sent_ == shape_->line_bits) settle_part();
      return;
    case Phase::kPart:
      if (bit == 0) {
        const auto& line = shape_->menu->lines()[line_];
        items_ = line.partition[part_];
        std::sort(items_.begin(), items_.end());
        histogram_.assign(shape_->grid.size(), 0);
        for (const auto& [g, c] : line.histograms[part_]) histogram_[g] = c;
        enter_histogram();
      } else {
        ++part_;
        settle_part();
      }
      return;
    case Phase::kHistogram:
      if (!((allowed() >> bit) & 1u)) {
        throw HistogramMismatch("sub-histogram not dominated by the current one");
      }
      count_prefix_ = count_prefix_ * 2 + bit;
      if (++count_bits_sent_ == shape_->count_bits) {
        left_[grid_index_] = count_prefix_;
        left_sum_ += count_prefix_;
        ++grid_index_;
        count_bits_sent_ = 0;
        count_prefix_ = 0;
        if (grid_index_ == static_cast<int>(histogram_.size())) start_halving();
      }
      return;
    case Phase::kHalving:
    case Phase::kLeaf:
      break;
  }
  if (phase_ == Phase::kLeaf) throw std::logic_error("no moves at a leaf");
  const std::size_t half = half_size();
  if (bit == 0) {
    histogram_ = left_;
    items_.resize(half);
  } else {
    for (std::size_t g = 0; g < histogram_.size(); ++g) histogram_[g] -= left_[g];
    items_.erase(items_.begin(), items_.begin() + static_cast<long>(half));
  }
  enter_histogram();
}

Outcome SymmetricState::outcome() const {
  if (phase_ != Phase::kLeaf) throw std::logic_error("not a leaf");
  Outcome o;
  if (allocated_ >= 0) o.alloc_mask = Bundle{1} << allocated_;
  o.payment = payment_;
  return o;
}

SymmetricProtocol compile_symmetric(const SymMenu& menu) {
  auto shape = std::make_shared<SymmetricProtocol::Shape>();
  shape->menu = std::make_shared<const SymMenu>(menu);
  shape->grid = menu.grid();
  shape->line_bits = ceil_log2(menu.size());
  shape->count_bits = ceil_log2(static_cast<std::uint64_t>(menu.n_items()) + 1);
  return SymmetricProtocol(std::move(shape));
}

SymmetricProtocol compile_symmetric_stage2(std::vector<int> items,
                                          std::vector<int> histogram,
                                          std::vector<Rational> grid,
                                          Rational payment) {
  if (histogram.size() != grid.size()) {
    throw std::invalid_argument("histogram must cover the grid");
  }
  if (std::accumulate(histogram.begin(), histogram.end(), 0) !=
      static_cast<int>(items.size())) {
    throw std::invalid_argument("histogram counts must sum to the part size");
  }
  Rational mass = 0;
  for (std::size_t g = 0; g < grid.size(); ++g) mass += grid[g] * histogram[g];
  if (mass <= 0) throw std::invalid_argument("part needs positive mass");
  auto shape = std::make_shared<SymmetricProtocol::Shape>();
  shape->grid = std::move(grid);
  shape->count_bits = ceil_log2(items.size() + 1);
  std::sort(items.begin(), items.end());
  shape->start_items = std::move(items);
  shape->start_histogram = std::move(histogram);
  shape->start_payment = std::move(payment);
  return SymmetricProtocol(std::move(shape));
}

SymmetricStrategy::SymmetricStrategy(int line, std::vector<int> assignment)
    : line_(line), assignment_(std::move(assignment)) {}

int SymmetricStrategy::choose(const ProtocolState& state, const History&) {
  const auto* s = dynamic_cast<const SymmetricState*>(&state);
  if (s == nullptr) throw std::invalid_argument("not a symmetric protocol");
  if (s->phase() == SymmetricState::Phase::kLine) {
    const int total = s->line_bits_total();
    return (line_ >> (total - s->line_bits_sent() - 1)) & 1;
  }
  int count = 0;
  for (std::size_t k = 0; k < s->half_size(); ++k) {
    if (assignment_.at(s->items()[k]) == s->grid_index()) ++count;
  }
  const int total = s->count_bits_total();
  return (count >> (total - s->count_bits_sent() - 1)) & 1;
}

SymmetricChoice best_symmetric_assignment(const SymMenu& menu, std::size_t line,
                                          const Valuation& v) {
  const auto& l = menu.lines().at(line);
  SymmetricChoice out;
  out.line = line;
  out.assignment.assign(menu.n_items(), menu.zero_index());
  out.utility = -l.payment;
  for (std::size_t p = 0; p < l.partition.size(); ++p) {
    std::vector<int> items = l.partition[p];
    std::vector<Rational> values;
    for (int item : items) values.push_back(v.value(Bundle{1} << item));
    std::vector<std::size_t> order(items.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (values[a] != values[b]) return values[a] > values[b];
      return items[a] < items[b];
    });
    // Grid indices ascend as probabilities descend.
    std::vector<int> probs;
    for (const auto& [g, c] : l.histograms[p]) probs.insert(probs.end(), c, g);
    for (std::size_t k = 0; k < order.size(); ++k) {
      const int g = probs[k];
      out.assignment[items[order[k]]] = g;
      out.utility += menu.grid()[g] * values[order[k]];
    }
  }
  return out;
}

SymmetricChoice best_symmetric_response(const SymMenu& menu, const Valuation& v) {
  SymmetricChoice best = best_symmetric_assignment(menu, 0, v);
  for (std::size_t l = 1; l < menu.size(); ++l) {
    SymmetricChoice c = best_symmetric_assignment(menu, l, v);
    if (c.utility > best.utility) best = std::move(c);
  }
  return best;
}

SymmetricStrategy honest_strategy_symmetric(const SymMenu& menu,
                                            std::size_t line,
                                            std::vector<int> assignment) {
  const auto& l = menu.lines().at(line);
  if (static_cast<int>(assignment.size()) != menu.n_items()) {
    throw std::invalid_argument("assignment needs one grid index per item");
  }
  for (std::size_t p = 0; p < l.partition.size(); ++p) {
    std::map<int, int> induced;
    for (int item : l.partition[p]) ++induced[assignment[item]];
    std::map<int, int> expected;
    for (const auto& [g, c] : l.histograms[p]) {
      if (c != 0) expected[g] = c;
    }
    if (induced != expected) {
      throw HistogramMismatch("assignment does not match the line's histogram");
    }
  }
  return SymmetricStrategy(static_cast<int>(line), std::move(assignment));
}

}  // namespace auctionwire
