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

#include "auctionwire/stream_compiler.h"

#include <algorithm>
#include <bit>
#include <set>
#include <string>

namespace auctionwire {

namespace {

constexpr int kSlots = 66;  // digits 1..64, then slot 65 for every later digit

std::vector<std::uint8_t> prefix_digits(const Dyadic& d, std::int64_t r) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(r));
  for (std::int64_t k = 1; k <= r; ++k) out[k - 1] = d.bit(k);
  return out;
}

}  // namespace

Dyadic require_dyadic(const Rational& q, const char* what) {
  if (auto d = Dyadic::from_rational(q)) return *d;
  if (q < 0 || q > 1) {
    throw std::invalid_argument(std::string(what) + " " + to_string(q) +
                                " is outside [0,1]");
  }
  const int suggested = std::min(
      64, ceil_log2(mpz_sizeinbase(q.get_den().get_mpz_t(), 2)) + 16);
  throw NonDyadicInput(std::string(what) + " " + to_string(q) +
                       " has no finite binary expansion; truncate it, e.g. to " +
                       std::to_string(suggested) + " bits");
}

BundleDist threshold_coupling(const ItemProbs& probs) {
  std::set<Rational> levels(probs.begin(), probs.end());
  levels.insert(Rational(0));
  levels.insert(Rational(1));
  BundleDist out;
  Rational lower = 0;
  for (const auto& level : levels) {
    if (level == 0) continue;
    // Threshold in [lower, level): items whose probability exceeds it.
    Bundle bundle = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (probs[i] >= level) bundle |= Bundle{1} << i;
    }
    out[bundle] += level - lower;
    lower = level;
  }
  return out;
}

BundleDist BundleMenu::distribution(std::size_t line) const {
  const auto& l = lines.at(line);
  BundleDist out;
  Rational prev = 0;
  for (std::size_t b = 0; b < bundles.size(); ++b) {
    const Rational next = b + 1 < bundles.size() ? l.boundaries[b] : Rational(1);
    if (next != prev) out[bundles[b]] += next - prev;
    prev = next;
  }
  return out;
}

BundleMenu BundleMenu::from_normalized(const NormalizedMenu& menu) {
  std::vector<BundleDist> dists;
  std::set<Bundle> support;
  for (const auto& line : menu.lines) {
    BundleDist d = std::holds_alternative<ItemProbs>(line.allocation)
                       ? threshold_coupling(std::get<ItemProbs>(line.allocation))
                       : std::get<BundleDist>(line.allocation);
    for (const auto& [bundle, p] : d) {
      if (p != 0) support.insert(bundle);
    }
    dists.push_back(std::move(d));
  }
  BundleMenu out;
  out.n_items = menu.n_items;
  out.cap = menu.cap;
  out.bundles.assign(support.rbegin(), support.rend());
  if (out.bundles.empty()) out.bundles.push_back(0);
  for (std::size_t i = 0; i < menu.lines.size(); ++i) {
    BundleMenuLine line;
    line.pay_prob = menu.lines[i].pay_prob;
    Rational cumulative = 0;
    for (std::size_t b = 0; b + 1 < out.bundles.size(); ++b) {
      auto it = dists[i].find(out.bundles[b]);
      if (it != dists[i].end()) cumulative += it->second;
      line.boundaries.push_back(cumulative);
    }
    out.lines.push_back(std::move(line));
  }
  out.validate();
  return out;
}

void BundleMenu::validate() const {
  if (bundles.empty()) throw InvalidMenu("bundle menu needs a bundle");
  if (lines.empty()) throw InvalidMenu("bundle menu needs a line");
  std::set<Bundle> seen(bundles.begin(), bundles.end());
  if (seen.size() != bundles.size()) throw InvalidMenu("repeated bundle");
  for (const auto& line : lines) {
    if (line.boundaries.size() + 1 != bundles.size()) {
      throw InvalidMenu("a line needs B-1 boundaries");
    }
    Rational prev = 0;
    for (const auto& q : line.boundaries) {
      if (q < prev || q > 1) throw InvalidMenu("boundaries must be sorted in [0,1]");
      prev = q;
    }
    if (line.pay_prob < 0 || line.pay_prob > 1) {
      throw InvalidMenu("pay_prob outside [0,1]");
    }
  }
}

StreamTable::StreamTable(std::vector<std::vector<Dyadic>> lines)
    : lines_(std::move(lines)) {
  if (lines_.empty()) throw InvalidMenu("no lines to stream");
  coords_ = static_cast<int>(lines_.front().size());
  if (coords_ == 0) throw InvalidMenu("no coordinates to stream");
  for (const auto& l : lines_) {
    if (static_cast<int>(l.size()) != coords_) {
      throw InvalidMenu("lines stream different coordinate counts");
    }
  }
  words_ = static_cast<int>((lines_.size() + 63) / 64);
  precision_.reserve(lines_.size());
  for (const auto& l : lines_) {
    int p = 0;
    for (const auto& d : l) {
      if (!d.is_one()) p = std::max(p, d.precision());
    }
    precision_.push_back(p);
  }
  ones_.assign(static_cast<std::size_t>(coords_) * kSlots * words_, 0);
  for (std::size_t line = 0; line < lines_.size(); ++line) {
    for (int c = 0; c < coords_; ++c) {
      for (int slot = 1; slot < kSlots; ++slot) {
        if (lines_[line][c].bit(slot)) {
          ones_[(static_cast<std::size_t>(c) * kSlots + slot) * words_ +
                line / 64] |= std::uint64_t{1} << (line % 64);
        }
      }
    }
  }
}

const std::uint64_t* StreamTable::ones(int c, std::int64_t round) const {
  const int slot = static_cast<int>(std::min<std::int64_t>(round, kSlots - 1));
  return &ones_[(static_cast<std::size_t>(c) * kSlots + slot) * words_];
}

StreamProtocol::StreamProtocol(Mode mode, int n_items, Rational cap,
                               std::vector<Bundle> bundles,
                               std::shared_ptr<const StreamTable> table)
    : shape_(std::make_shared<const Shape>(Shape{
          mode, n_items, std::move(cap), std::move(bundles), std::move(table)})) {
  const int expected = shape_->mode == Mode::kAdditive
                           ? shape_->n_items + 1
                           : static_cast<int>(shape_->bundles.size());
  if (shape_->table->coord_count() != expected) {
    throw InvalidMenu("coordinate count does not match the protocol shape");
  }
}

std::unique_ptr<ProtocolState> StreamProtocol::root() const {
  return std::make_unique<StreamState>(shape_);
}

StreamState::StreamState(std::shared_ptr<const StreamProtocol::Shape> shape)
    : shape_(std::move(shape)),
      feasible_(shape_->table->words(), 0),
      sent_(shape_->table->coord_count(), 0),
      status_(shape_->table->coord_count(), 0) {
  const std::size_t lines = shape_->table->line_count();
  for (std::size_t w = 0; w < feasible_.size(); ++w) {
    const std::size_t remaining = lines - w * 64;
    feasible_[w] = remaining >= 64 ? ~std::uint64_t{0}
                                   : (std::uint64_t{1} << remaining) - 1;
  }
}

NodeKind StreamState::kind() const {
  if (leaf_) return NodeKind::kLeaf;
  return coord_ < shape_->table->coord_count() ? NodeKind::kBuyer
                                                   : NodeKind::kChance;
}

unsigned StreamState::allowed() const {
  const std::uint64_t* ones = shape_->table->ones(coord_, round_);
  std::uint64_t any_one = 0;
  std::uint64_t any_zero = 0;
  for (std::size_t w = 0; w < feasible_.size(); ++w) {
    any_one |= feasible_[w] & ones[w];
    any_zero |= feasible_[w] & ~ones[w];
  }
  return (any_zero ? kAllowZero : 0u) | (any_one ? kAllowOne : 0u);
}

ChanceSpec StreamState::chance() const { return ChanceSpec::tau(0, round_); }

void StreamState::apply(int bit) {
  if (leaf_) throw std::logic_error("protocol already ended");
  const int coords = shape_->table->coord_count();
  if (coord_ < coords) {
    if (!((allowed() >> bit) & 1u)) {
      throw InfeasibleMove("digit leaves no consistent menu line");
    }
    const std::uint64_t* ones = shape_->table->ones(coord_, round_);
    for (std::size_t w = 0; w < feasible_.size(); ++w) {
      feasible_[w] &= bit ? ones[w] : ~ones[w];
    }
    sent_[coord_] = static_cast<std::uint8_t>(bit);
    ++coord_;
    return;
  }
  for (int c = 0; c < coords; ++c) {
    if (status_[c] == 0 && sent_[c] != bit) status_[c] = sent_[c] ? 1 : -1;
  }
  if (finished()) {
    leaf_ = true;
    return;
  }
  ++round_;
  coord_ = 0;
}

int StreamState::decided_bundle(const std::vector<std::int8_t>& status) const {
  const int boundaries = static_cast<int>(shape_->bundles.size()) - 1;
  int below = -1;          // last boundary known to lie below the threshold
  int above = boundaries;  // first boundary known to lie above it
  for (int j = 0; j < boundaries; ++j) {
    if (status[j] < 0) below = j;
    if (status[j] > 0 && above == boundaries) above = j;
  }
  if (above < below) throw std::logic_error("boundaries out of order");
  return above == below + 1 ? above : -1;
}

bool StreamState::finished() const {
  if (shape_->mode == StreamProtocol::Mode::kAdditive) {
    return std::all_of(status_.begin(), status_.end(),
                       [](std::int8_t s) { return s != 0; });
  }
  return status_.back() != 0 && decided_bundle(status_) >= 0;
}

Outcome StreamState::outcome_from(const std::vector<std::int8_t>& status) const {
  Outcome o;
  if (status.back() > 0) o.payment = shape_->cap;
  if (shape_->mode == StreamProtocol::Mode::kAdditive) {
    for (int i = 0; i < shape_->n_items; ++i) {
      if (status[i] > 0) o.alloc_mask |= Bundle{1} << i;
    }
  } else {
    const int b = decided_bundle(status);
    if (b < 0) throw std::logic_error("bundle not decided");
    o.alloc_mask = shape_->bundles[b];
  }
  return o;
}

Outcome StreamState::outcome() const {
  if (!leaf_) throw std::logic_error("not a leaf");
  return outcome_from(status_);
}

bool StreamState::feasible(std::size_t line) const {
  return (feasible_[line / 64] >> (line % 64)) & 1u;
}

std::optional<std::size_t> StreamState::only_line() const {
  int count = 0;
  std::size_t found = 0;
  for (std::size_t w = 0; w < feasible_.size(); ++w) {
    count += std::popcount(feasible_[w]);
    if (feasible_[w]) found = w * 64 + std::countr_zero(feasible_[w]);
  }
  if (count != 1) return std::nullopt;
  return found;
}

std::optional<Outcome> StreamState::settled() const {
  if (leaf_) return std::nullopt;
  const auto line = only_line();
  if (!line) return std::nullopt;
  const StreamTable& table = *shape_->table;
  if (round_ - 1 < table.precision(*line)) return std::nullopt;
  // Every undecided coordinate matches the threshold so far and repeats one
  // digit from here on, which fixes its comparison almost surely.
  std::vector<std::int8_t> status = status_;
  for (int c = 0; c < table.coord_count(); ++c) {
    if (status[c] == 0) status[c] = table.coord(*line, c).is_one() ? 1 : -1;
  }
  return outcome_from(status);
}

std::unique_ptr<ProtocolState> StreamState::clone() const {
  return std::make_unique<StreamState>(*this);
}

StreamProtocol compile_additive(const NormalizedMenu& menu) {
  std::vector<std::vector<Dyadic>> rows;
  rows.reserve(menu.lines.size());
  for (const auto& line : menu.lines) {
    const auto* probs = std::get_if<ItemProbs>(&line.allocation);
    if (probs == nullptr) {
      throw FormMismatch("additive streaming needs item_probs lines");
    }
    if (static_cast<int>(probs->size()) != menu.n_items) {
      throw InvalidMenu("item_probs length differs from n_items");
    }
    std::vector<Dyadic> row;
    row.reserve(probs->size() + 1);
    for (const auto& p : *probs) row.push_back(require_dyadic(p, "item probability"));
    row.push_back(require_dyadic(line.pay_prob, "pay probability"));
    rows.push_back(std::move(row));
  }
  return StreamProtocol(StreamProtocol::Mode::kAdditive, menu.n_items, menu.cap,
                        {}, std::make_shared<const StreamTable>(std::move(rows)));
}

StreamProtocol compile_bundle(const BundleMenu& menu) {
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
  return StreamProtocol(StreamProtocol::Mode::kBundle, menu.n_items, menu.cap,
                        menu.bundles,
                        std::make_shared<const StreamTable>(std::move(rows)));
}

LineStrategy::LineStrategy(const StreamProtocol& protocol, std::size_t line)
    : table_(protocol.shared_table()), line_(line) {
  if (line_ >= table_->line_count()) throw std::out_of_range("no such line");
}

int LineStrategy::choose(const ProtocolState& state, const History&) {
  const auto* s = dynamic_cast<const StreamState*>(&state);
  if (s == nullptr) throw std::invalid_argument("not a streaming protocol");
  return table_->coord(line_, s->coordinate()).bit(s->round());
}

std::size_t best_response(const Valuation& v, const NormalizedMenu& menu) {
  std::size_t best = 0;
  Rational best_utility;
  for (std::size_t i = 0; i < menu.lines.size(); ++i) {
    const auto& line = menu.lines[i];
    Rational u = expected_value(v, line.allocation) - line.pay_prob * menu.cap;
    if (i == 0 || u > best_utility) {
      best = i;
      best_utility = std::move(u);
    }
  }
  return best;
}

LineStrategy honest_strategy_additive(const StreamProtocol& protocol,
                                      const NormalizedMenu& menu,
                                      const Valuation& v) {
  if (v.value_class() != ValuationClass::kAdditive) {
    throw FormMismatch("honest additive streaming needs an additive valuation");
  }
  return LineStrategy(protocol, best_response(v, menu));
}

std::vector<Rational> exact_alloc_prob(const NormalizedLine& line) {
  const auto* probs = std::get_if<ItemProbs>(&line.allocation);
  if (probs == nullptr) throw FormMismatch("expected an item_probs line");
  std::vector<Rational> out;
  for (const auto& p : *probs) out.push_back(require_dyadic(p, "item probability").value());
  out.push_back(require_dyadic(line.pay_prob, "pay probability").value());
  return out;
}

Rational exact_expected_rounds(const std::vector<Rational>& coords) {
  if (coords.empty()) return 0;
  std::vector<Dyadic> digits;
  int settle = 0;
  for (const auto& q : coords) {
    digits.push_back(require_dyadic(q, "coordinate"));
    if (!digits.back().is_one()) settle = std::max(settle, digits.back().precision());
  }
  // From `settle`+1 digits on, distinct values have distinct prefixes.
  const std::int64_t stable = settle + 1;
  Rational total = 0;
  std::size_t distinct = 0;
  for (std::int64_t r = 0; r <= stable; ++r) {
    std::set<std::vector<std::uint8_t>> cells;
    for (const auto& d : digits) cells.insert(prefix_digits(d, r));
    distinct = cells.size();
    if (r == stable) break;
    mpz_class den = 1;
    den <<= static_cast<unsigned long>(r);
    total += Rational(mpz_class(static_cast<unsigned long>(distinct))) / Rational(den);
  }
  // Tail: sum over r >= stable of distinct * 2^-r.
  mpz_class den = 1;
  den <<= static_cast<unsigned long>(stable - 1);
  total += Rational(mpz_class(static_cast<unsigned long>(distinct))) / Rational(den);
  return total;
}

}  // namespace auctionwire
