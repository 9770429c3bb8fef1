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

#include "auctionwire/menu.h"

#include <algorithm>

namespace auctionwire {

namespace {

void check_item_count(int n) {
  if (n < 0 || n > kMaxItems) {
    throw std::invalid_argument("item count must be in [0, 64]");
  }
}

bool in_unit_interval(const Rational& q) { return q >= 0 && q <= 1; }

void validate_allocation(const Allocation& allocation, int n_items) {
  if (const auto* probs = std::get_if<ItemProbs>(&allocation)) {
    if (static_cast<int>(probs->size()) != n_items) {
      throw InvalidMenu("item_probs length differs from n_items");
    }
    for (const auto& p : *probs) {
      if (!in_unit_interval(p)) throw InvalidMenu("probability outside [0,1]");
    }
    return;
  }
  const auto& dist = std::get<BundleDist>(allocation);
  Rational total = 0;
  const Bundle universe =
      n_items == kMaxItems ? ~Bundle{0} : (Bundle{1} << n_items) - 1;
  for (const auto& [bundle, p] : dist) {
    if ((bundle & ~universe) != 0) throw InvalidMenu("bundle outside [n]");
    if (!in_unit_interval(p)) throw InvalidMenu("probability outside [0,1]");
    total += p;
  }
  if (total != 1) throw InvalidMenu("bundle_dist does not sum to 1");
}

}  // namespace

Valuation Valuation::additive(std::vector<Rational> item_values) {
  check_item_count(static_cast<int>(item_values.size()));
  Valuation v;
  v.class_ = ValuationClass::kAdditive;
  v.n_items_ = static_cast<int>(item_values.size());
  v.values_ = std::move(item_values);
  return v;
}

Valuation Valuation::unit_demand(std::vector<Rational> item_values) {
  check_item_count(static_cast<int>(item_values.size()));
  Valuation v;
  v.class_ = ValuationClass::kUnitDemand;
  v.n_items_ = static_cast<int>(item_values.size());
  v.values_ = std::move(item_values);
  return v;
}

Valuation Valuation::xos(std::vector<std::vector<Rational>> clauses) {
  if (clauses.empty()) throw std::invalid_argument("xos needs a clause");
  const std::size_t n = clauses.front().size();
  check_item_count(static_cast<int>(n));
  for (const auto& clause : clauses) {
    if (clause.size() != n) throw std::invalid_argument("ragged xos clauses");
    for (const auto& w : clause) {
      if (w < 0) throw std::invalid_argument("negative xos weight");
    }
  }
  Valuation v;
  v.class_ = ValuationClass::kXos;
  v.n_items_ = static_cast<int>(n);
  v.clauses_ = std::move(clauses);
  return v;
}

Rational Valuation::value(Bundle bundle) const {
  switch (class_) {
    case ValuationClass::kAdditive: {
      Rational sum = 0;
      for (int i = 0; i < n_items_; ++i) {
        if ((bundle >> i) & 1) sum += values_[i];
      }
      return sum;
    }
    case ValuationClass::kUnitDemand: {
      Rational best = 0;
      for (int i = 0; i < n_items_; ++i) {
        if (((bundle >> i) & 1) && values_[i] > best) best = values_[i];
      }
      return best;
    }
    case ValuationClass::kXos: {
      Rational best = 0;
      for (const auto& clause : clauses_) {
        Rational sum = 0;
        for (int i = 0; i < n_items_; ++i) {
          if ((bundle >> i) & 1) sum += clause[i];
        }
        if (sum > best) best = sum;
      }
      return best;
    }
  }
  return 0;
}

Rational Valuation::max_value() const {
  if (class_ == ValuationClass::kAdditive) {
    Rational sum = 0;
    for (const auto& x : values_) {
      if (x > 0) sum += x;
    }
    return sum;
  }
  const Bundle all =
      n_items_ == kMaxItems ? ~Bundle{0} : (Bundle{1} << n_items_) - 1;
  return value(all);
}

ItemProbs MenuLine::marginals(int n_items) const {
  if (has_item_probs()) return item_probs();
  ItemProbs out(n_items, Rational(0));
  for (const auto& [bundle, p] : bundle_dist()) {
    for (int i = 0; i < n_items; ++i) {
      if ((bundle >> i) & 1) out[i] += p;
    }
  }
  return out;
}

bool MenuLine::is_zero() const {
  if (payment != 0) return false;
  if (has_item_probs()) {
    return std::all_of(item_probs().begin(), item_probs().end(),
                       [](const Rational& p) { return p == 0; });
  }
  for (const auto& [bundle, p] : bundle_dist()) {
    if (bundle != 0 && p != 0) return false;
  }
  return true;
}

Menu::Menu(int n_items, Rational cap, std::vector<MenuLine> lines)
    : n_items_(n_items), cap_(std::move(cap)), lines_(std::move(lines)) {
  check_item_count(n_items_);
  if (cap_ <= 0) throw InvalidMenu("cap must be positive");
  if (lines_.empty()) throw InvalidMenu("menu has no lines");
  bool has_zero = false;
  for (std::size_t i = 0; i < lines_.size(); ++i) {
    const auto& line = lines_[i];
    validate_allocation(line.allocation, n_items_);
    if (line.payment < 0) throw InvalidMenu("negative payment");
    if (line.payment > cap_) {
      throw PaymentExceedsCap("line " + std::to_string(i) +
                              " pays more than the cap");
    }
    has_zero = has_zero || line.is_zero();
    for (std::size_t j = 0; j < i; ++j) {
      if (lines_[j] == line) throw InvalidMenu("duplicate menu line");
    }
  }
  if (!has_zero) throw InvalidMenu("menu lacks the zero line");
}

NormalizedMenu normalize_payments(const Menu& menu) {
  NormalizedMenu out;
  out.n_items = menu.n_items();
  out.cap = menu.cap();
  out.lines.reserve(menu.size());
  for (const auto& line : menu.lines()) {
    if (line.payment > menu.cap()) {
      throw PaymentExceedsCap("payment exceeds the cap");
    }
    out.lines.push_back({line.allocation, line.payment / menu.cap()});
  }
  return out;
}

Menu denormalize(const NormalizedMenu& menu) {
  std::vector<MenuLine> lines;
  lines.reserve(menu.lines.size());
  for (const auto& line : menu.lines) {
    lines.push_back({line.allocation, line.pay_prob * menu.cap});
  }
  return Menu(menu.n_items, menu.cap, std::move(lines));
}

Rational expected_value(const Valuation& v, const Allocation& allocation) {
  if (const auto* probs = std::get_if<ItemProbs>(&allocation)) {
    if (v.value_class() != ValuationClass::kAdditive) {
      throw FormMismatch(
          "item_probs allocations need an additive valuation; use bundle_dist");
    }
    if (static_cast<int>(probs->size()) != v.n_items()) {
      throw FormMismatch("dimension mismatch");
    }
    Rational sum = 0;
    for (int i = 0; i < v.n_items(); ++i) sum += (*probs)[i] * v.item_values()[i];
    return sum;
  }
  Rational sum = 0;
  for (const auto& [bundle, p] : std::get<BundleDist>(allocation)) {
    if (p != 0) sum += p * v.value(bundle);
  }
  return sum;
}

Rational utility(const Valuation& v, const MenuLine& line) {
  return expected_value(v, line.allocation) - line.payment;
}

std::size_t best_response(const Valuation& v, const Menu& menu) {
  std::size_t best = 0;
  Rational best_utility = utility(v, menu.line(0));
  for (std::size_t i = 1; i < menu.size(); ++i) {
    Rational u = utility(v, menu.line(i));
    if (u > best_utility) {
      best = i;
      best_utility = std::move(u);
    }
  }
  return best;
}

Rational Prior::total_weight() const {
  Rational sum = 0;
  for (const auto& t : types) sum += t.weight;
  return sum;
}

}  // namespace auctionwire
