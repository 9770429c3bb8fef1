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

#ifndef AUCTIONWIRE_MENU_H_
#define AUCTIONWIRE_MENU_H_

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "auctionwire/rational.h"

namespace auctionwire {

// A set of items, item 0 in the least significant bit.
using Bundle = std::uint64_t;
inline constexpr int kMaxItems = 64;

class PaymentExceedsCap : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class FormMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidMenu : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ValuationClass { kAdditive, kUnitDemand, kXos };

class Valuation {
 public:
  static Valuation additive(std::vector<Rational> item_values);
  static Valuation unit_demand(std::vector<Rational> item_values);
  // clauses[j][i] is the weight of item i in clause j.
  static Valuation xos(std::vector<std::vector<Rational>> clauses);

  ValuationClass value_class() const { return class_; }
  int n_items() const { return n_items_; }
  const std::vector<Rational>& item_values() const { return values_; }
  const std::vector<std::vector<Rational>>& clauses() const { return clauses_; }

  Rational value(Bundle bundle) const;
  // Largest value over all bundles, v([n]) for monotone classes.
  Rational max_value() const;

 private:
  ValuationClass class_ = ValuationClass::kAdditive;
  int n_items_ = 0;
  std::vector<Rational> values_;
  std::vector<std::vector<Rational>> clauses_;
};

using ItemProbs = std::vector<Rational>;
using BundleDist = std::map<Bundle, Rational>;
using Allocation = std::variant<ItemProbs, BundleDist>;

struct MenuLine {
  Allocation allocation;
  Rational payment;

  bool has_item_probs() const {
    return std::holds_alternative<ItemProbs>(allocation);
  }
  const ItemProbs& item_probs() const { return std::get<ItemProbs>(allocation); }
  const BundleDist& bundle_dist() const {
    return std::get<BundleDist>(allocation);
  }
  // Marginal probability that each item is allocated.
  ItemProbs marginals(int n_items) const;
  bool is_zero() const;

  friend bool operator==(const MenuLine&, const MenuLine&) = default;
};

class Menu {
 public:
  // Validates probabilities, payment cap, distinctness and the zero line.
  Menu(int n_items, Rational cap, std::vector<MenuLine> lines);

  int n_items() const { return n_items_; }
  const Rational& cap() const { return cap_; }
  const std::vector<MenuLine>& lines() const { return lines_; }
  std::size_t size() const { return lines_.size(); }
  const MenuLine& line(std::size_t i) const { return lines_.at(i); }

 private:
  int n_items_;
  Rational cap_;
  std::vector<MenuLine> lines_;
};

struct NormalizedLine {
  Allocation allocation;
  // Probability of paying exactly the cap.
  Rational pay_prob;
};

struct NormalizedMenu {
  int n_items = 0;
  Rational cap;
  std::vector<NormalizedLine> lines;
};

NormalizedMenu normalize_payments(const Menu& menu);
Menu denormalize(const NormalizedMenu& menu);

Rational expected_value(const Valuation& v, const Allocation& allocation);
Rational utility(const Valuation& v, const MenuLine& line);
// Lowest index among the utility maximizers.
std::size_t best_response(const Valuation& v, const Menu& menu);

struct WeightedType {
  Rational weight;
  Valuation valuation;
};

// A finite distribution over buyer types.
struct Prior {
  std::vector<WeightedType> types;

  // Exact total weight; priors are not renormalized implicitly.
  Rational total_weight() const;
};

}  // namespace auctionwire

#endif  // AUCTIONWIRE_MENU_H_
