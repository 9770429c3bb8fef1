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

#include "auctionwire/hard_instances.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "auctionwire/random.h"

namespace auctionwire {

namespace {

int floor_int(const Rational& q) {
  mpz_class out;
  mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return static_cast<int>(out.get_si());
}

Bundle random_subset(std::mt19937_64& rng, int n, int k) {
  std::vector<int> items(n);
  std::iota(items.begin(), items.end(), 0);
  Bundle set = 0;
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(items[i], items[pick(rng)]);
    set |= Bundle{1} << items[i];
  }
  return set;
}

std::vector<int> members(Bundle set) {
  std::vector<int> out;
  for (int i = 0; set != 0; ++i, set >>= 1) {
    if (set & 1) out.push_back(i);
  }
  return out;
}

}  // namespace

Rational WeakDesign::max_overlap_ratio() const {
  Rational worst = 0;
  for (std::size_t a = 0; a < sets.size(); ++a) {
    for (std::size_t b = 0; b < sets.size(); ++b) {
      if (a == b) continue;
      const Rational r = ratio(std::popcount(sets[a] & sets[b]), std::popcount(sets[b]));
      worst = std::max(worst, r);
    }
  }
  return worst;
}

void verify_design(const WeakDesign& d) {
  if (d.set_size != floor_int(d.eps * d.n) ||
      d.intersection_bound != floor_int((1 + d.delta) * d.eps * d.eps * d.n)) {
    throw DesignFailure("design parameters do not match its bounds");
  }
  const Bundle universe = d.n == 64 ? ~Bundle{0} : (Bundle{1} << d.n) - 1;
  for (std::size_t a = 0; a < d.sets.size(); ++a) {
    if ((d.sets[a] & ~universe) != 0) throw DesignFailure("set outside [n]");
    if (std::popcount(d.sets[a]) != d.set_size) {
      throw DesignFailure("set of the wrong size");
    }
    for (std::size_t b = a + 1; b < d.sets.size(); ++b) {
      if (d.sets[a] == d.sets[b]) throw DesignFailure("repeated set");
      if (std::popcount(d.sets[a] & d.sets[b]) > d.intersection_bound) {
        throw DesignFailure("intersection above the bound");
      }
    }
  }
}

WeakDesign gen_weak_design(int n, const Rational& eps, const Rational& delta,
                           int count, std::uint64_t seed) {
  if (n < 1 || n > kMaxItems) throw std::invalid_argument("n must be in [1, 64]");
  if (eps <= 0 || eps > 1 || delta <= 0) {
    throw std::invalid_argument("need 0 < eps <= 1 and delta > 0");
  }
  if (count < 1) throw std::invalid_argument("count must be positive");
  WeakDesign d;
  d.n = n;
  d.eps = eps;
  d.delta = delta;
  d.set_size = floor_int(eps * n);
  d.intersection_bound = floor_int((1 + delta) * eps * eps * n);
  if (d.set_size < 1) throw DesignFailure("eps * n is below one item");
  // A fresh random set clashes with a given one with probability at most
  // exp(-delta^2 eps^2 n / 3); size the budget by the implied acceptance
  // rate once `count` sets are in place, with a floor for tiny n.
  const double tail = std::exp(-delta.get_d() * delta.get_d() * eps.get_d() *
                               eps.get_d() * n / 3.0);
  const double accept = std::max(1.0 / 64.0, 1.0 - count * tail);
  const auto budget = static_cast<std::int64_t>(64.0 * count / accept) + 64;
  std::mt19937_64 rng(mix_seed(seed, 0xde5, static_cast<std::uint64_t>(n)));
  for (std::int64_t attempt = 0;
       attempt < budget && static_cast<int>(d.sets.size()) < count; ++attempt) {
    const Bundle candidate = random_subset(rng, n, d.set_size);
    const bool fits = std::all_of(d.sets.begin(), d.sets.end(), [&](Bundle s) {
      return s != candidate &&
             std::popcount(s & candidate) <= d.intersection_bound;
    });
    if (fits) d.sets.push_back(candidate);
  }
  if (static_cast<int>(d.sets.size()) < count) {
    throw DesignFailure("no design of " + std::to_string(count) +
                        " sets found within the retry budget");
  }
  verify_design(d);
  return d;
}

EqualRevenueDist::EqualRevenueDist(int levels, Rational eps)
    : levels_(levels), eps_(std::move(eps)) {
  if (levels < 1) throw std::invalid_argument("levels must be positive");
  if (eps_ <= 0 || eps_ >= 1) throw std::invalid_argument("eps must be in (0, 1)");
  Rational power = 1;
  std::vector<Rational> powers;
  for (int t = 0; t < levels; ++t) {
    powers.push_back(power);
    power *= eps_;
  }
  const Rational total = std::accumulate(powers.begin(), powers.end(), Rational(0));
  for (int t = 0; t < levels; ++t) {
    values_.push_back(powers[t]);
    probs_.push_back(powers[levels - 1 - t] / total);
  }
}

std::vector<CodeVector> sample_code_vectors(int length,
                                            const EqualRevenueDist& dist,
                                            int count, std::uint64_t seed) {
  if (length < 1 || count < 1) {
    throw std::invalid_argument("length and count must be positive");
  }
  // Refuse requests for more distinct vectors than exist.
  double space = std::pow(static_cast<double>(dist.levels()), length);
  if (space < count) throw std::invalid_argument("not enough distinct vectors");
  std::vector<double> weights;
  for (int t = 0; t < dist.levels(); ++t) weights.push_back(dist.prob(t).get_d());
  std::discrete_distribution<int> level(weights.begin(), weights.end());
  std::mt19937_64 rng(mix_seed(seed, 0xc0de, static_cast<std::uint64_t>(length)));
  std::set<CodeVector> seen;
  std::vector<CodeVector> out;
  const std::int64_t budget = 1000 * static_cast<std::int64_t>(count) + 1000;
  for (std::int64_t attempt = 0;
       attempt < budget && static_cast<int>(out.size()) < count; ++attempt) {
    CodeVector v(length);
    for (auto& x : v) x = level(rng);
    if (seen.insert(v).second) out.push_back(std::move(v));
  }
  if (static_cast<int>(out.size()) < count) {
    throw DesignFailure("too many repeated code vectors");
  }
  return out;
}

Rational low_discrepancy_fraction(const std::vector<CodeVector>& codes,
                                  const EqualRevenueDist& dist, int m,
                                  const Rational& eta) {
  if (m < 1 || m > static_cast<int>(codes.size())) {
    throw std::invalid_argument("m must be in [1, number of codes]");
  }
  const std::size_t length = codes.front().size();
  int good = 0;
  for (std::size_t j = 0; j < length; ++j) {
    std::vector<int> counts(dist.levels(), 0);
    for (int k = 0; k < m; ++k) ++counts.at(codes[k].at(j));
    bool ok = true;
    for (int t = 0; t < dist.levels(); ++t) {
      const Rational expected = dist.prob(t) * m;
      if (abs(Rational(counts[t]) - expected) > eta * expected) ok = false;
    }
    if (ok) ++good;
  }
  return ratio(good, static_cast<long>(length));
}

Rational HardPrior::welfare() const {
  Rational total = 0;
  for (const auto& t : prior.types) total += t.weight * t.valuation.max_value();
  return total;
}

std::vector<HardPrior> build_unit_demand_family(const WeakDesign& design,
                                                const std::vector<CodeVector>& codes,
                                                const EqualRevenueDist& dist) {
  verify_design(design);
  // A buyer naming another set reaches its own set with probability at most
  // the overlap ratio, which must stay below the cheapest price.
  if (design.max_overlap_ratio() >= dist.value(dist.levels() - 1)) {
    throw ParameterGuard("design overlaps too much for the value scale");
  }
  const Rational weight(1, static_cast<long>(design.size()));
  std::vector<HardPrior> family;
  for (const auto& code : codes) {
    if (code.size() != design.size()) {
      throw std::invalid_argument("code length differs from the design size");
    }
    HardPrior p;
    p.family = HardFamily::kUnitDemand;
    p.n_items = design.n;
    p.design = design;
    p.code = code;
    for (int t = 0; t < dist.levels(); ++t) p.level_values.push_back(dist.value(t));
    for (std::size_t k = 0; k < design.size(); ++k) {
      const Rational c = dist.value(code[k]);
      p.set_values.push_back(c);
      std::vector<Rational> values(design.n, Rational(0));
      for (int i : members(design.sets[k])) values[i] = c;
      p.prior.types.push_back({weight, Valuation::unit_demand(std::move(values))});
    }
    family.push_back(std::move(p));
  }
  return family;
}

MessageProtocol::MessageProtocol(int message_bits,
                                 std::map<Bundle, Lottery> lotteries) {
  if (message_bits < 0 || message_bits > kMaxItems) {
    throw std::invalid_argument("message length must be in [0, 64]");
  }
  for (const auto& [message, lottery] : lotteries) {
    Rational total = 0;
    for (const auto& [w, o] : lottery) {
      if (w < 0) throw std::invalid_argument("negative lottery weight");
      total += w;
    }
    if (total != 1) throw std::invalid_argument("lottery weights must sum to 1");
  }
  auto shape = std::make_shared<Shape>();
  shape->message_bits = message_bits;
  shape->lotteries = std::move(lotteries);
  shape->empty = {{Rational(1), Outcome{}}};
  shape_ = std::move(shape);
}

std::unique_ptr<ProtocolState> MessageProtocol::root() const {
  return std::make_unique<MessageState>(shape_);
}

const MessageProtocol::Lottery& MessageProtocol::lottery(Bundle message) const {
  auto it = shape_->lotteries.find(message);
  return it == shape_->lotteries.end() ? shape_->empty : it->second;
}

const MessageProtocol::Lottery& MessageState::current() const {
  auto it = shape_->lotteries.find(message_);
  return it == shape_->lotteries.end() ? shape_->empty : it->second;
}

void MessageState::skip_empty() {
  const auto& lottery = current();
  while (entry_ < lottery.size() && lottery[entry_].first == 0) ++entry_;
}

Rational MessageState::remaining() const {
  const auto& lottery = current();
  Rational total = 0;
  for (std::size_t k = entry_; k < lottery.size(); ++k) total += lottery[k].first;
  return total;
}

NodeKind MessageState::kind() const {
  if (bits_sent_ < shape_->message_bits) return NodeKind::kBuyer;
  if (resolved_) return NodeKind::kLeaf;
  return current()[entry_].first == remaining() ? NodeKind::kLeaf
                                                : NodeKind::kChance;
}

ChanceSpec MessageState::chance() const {
  return ChanceSpec::weighted(Rational(current()[entry_].first / remaining()));
}

void MessageState::apply(int bit) {
  if (bits_sent_ < shape_->message_bits) {
    if (bit) message_ |= Bundle{1} << bits_sent_;
    if (++bits_sent_ == shape_->message_bits) skip_empty();
    return;
  }
  if (kind() != NodeKind::kChance) throw std::logic_error("apply at a leaf");
  if (bit == 0) {
    resolved_ = true;
  } else {
    ++entry_;
    skip_empty();
  }
}

Outcome MessageState::outcome() const {
  if (kind() != NodeKind::kLeaf) throw std::logic_error("not a leaf");
  return current()[entry_].second;
}

int MessageStrategy::choose(const ProtocolState& state, const History&) {
  const auto* s = dynamic_cast<const MessageState*>(&state);
  if (s == nullptr) throw std::invalid_argument("not a message protocol state");
  return static_cast<int>((message_ >> s->bits_sent()) & 1u);
}

MessageProtocol optimal_protocol_unit_demand(const HardPrior& prior) {
  if (prior.family != HardFamily::kUnitDemand) {
    throw FormMismatch("unit-demand prior expected");
  }
  std::map<Bundle, MessageProtocol::Lottery> lotteries;
  for (std::size_t k = 0; k < prior.design.size(); ++k) {
    const Bundle set = prior.design.sets[k];
    const auto items = members(set);
    MessageProtocol::Lottery lottery;
    const Rational w(1, static_cast<long>(items.size()));
    for (int i : items) {
      lottery.push_back({w, Outcome{Bundle{1} << i, prior.set_values[k], false}});
    }
    lotteries.emplace(set, std::move(lottery));
  }
  return MessageProtocol(prior.n_items, std::move(lotteries));
}

std::unique_ptr<ProtocolState> NontruthfulUnitDemand::root() const {
  return std::make_unique<NontruthfulState>(shape_);
}

NontruthfulState::NontruthfulState(
    std::shared_ptr<const NontruthfulUnitDemand::Shape> shape)
    : shape_(std::move(shape)), picked_(shape_->set_size <= 1) {}

NodeKind NontruthfulState::kind() const {
  if (!picked_) return NodeKind::kChance;
  if (item_bits_sent_ < shape_->item_bits || level_bits_sent_ < shape_->level_bits) {
    return NodeKind::kBuyer;
  }
  return NodeKind::kLeaf;
}

unsigned NontruthfulState::allowed() const {
  // Keep the item below n and the level below the level count.
  auto fits = [](int prefix, int sent, int total, std::size_t limit) {
    const std::uint64_t with_one = (static_cast<std::uint64_t>(prefix) * 2 + 1)
                                   << (total - sent - 1);
    return with_one < limit;
  };
  const bool ok =
      item_bits_sent_ < shape_->item_bits
          ? fits(item_, item_bits_sent_, shape_->item_bits,
                 static_cast<std::size_t>(shape_->n_items))
          : fits(level_, level_bits_sent_, shape_->level_bits,
                 shape_->level_values.size());
  return ok ? (kAllowZero | kAllowOne) : kAllowZero;
}

ChanceSpec NontruthfulState::chance() const {
  return ChanceSpec::weighted(Rational(1, shape_->set_size - position_));
}

void NontruthfulState::apply(int bit) {
  if (!picked_) {
    if (bit == 0) {
      picked_ = true;
    } else if (++position_ == shape_->set_size - 1) {
      picked_ = true;
    }
    return;
  }
  if ((allowed() & (bit ? kAllowOne : kAllowZero)) == 0) {
    throw InfeasibleMove("index out of range");
  }
  if (item_bits_sent_ < shape_->item_bits) {
    item_ = item_ * 2 + bit;
    ++item_bits_sent_;
  } else if (level_bits_sent_ < shape_->level_bits) {
    level_ = level_ * 2 + bit;
    ++level_bits_sent_;
  } else {
    throw std::logic_error("apply at a leaf");
  }
}

Outcome NontruthfulState::outcome() const {
  if (kind() != NodeKind::kLeaf) throw std::logic_error("not a leaf");
  return {Bundle{1} << item_, shape_->level_values.at(level_), false};
}

NontruthfulUnitDemand nontruthful_impl_unit_demand(const HardPrior& prior) {
  if (prior.family != HardFamily::kUnitDemand) {
    throw FormMismatch("unit-demand prior expected");
  }
  auto shape = std::make_shared<NontruthfulUnitDemand::Shape>();
  shape->n_items = prior.n_items;
  shape->set_size = prior.design.set_size;
  shape->item_bits = ceil_log2(static_cast<std::uint64_t>(prior.n_items));
  shape->level_values = prior.level_values;
  shape->level_bits = ceil_log2(prior.level_values.size());
  return NontruthfulUnitDemand(std::move(shape));
}

int NontruthfulStrategy::choose(const ProtocolState& state, const History&) {
  const auto* s = dynamic_cast<const NontruthfulState*>(&state);
  if (s == nullptr) throw std::invalid_argument("not a nontruthful protocol state");
  const auto& shape = s->shape();
  if (s->item_bits_sent() < shape.item_bits) {
    const int item = members(set_).at(s->position());
    return (item >> (shape.item_bits - s->item_bits_sent() - 1)) & 1;
  }
  return (level_ >> (shape.level_bits - s->level_bits_sent() - 1)) & 1;
}

std::vector<HardPrior> build_xos_family(const XosParams& params) {
  const int n = params.n;
  if (n < 2 || n > kMaxItems) throw std::invalid_argument("n must be in [2, 64]");
  if (params.gamma <= 0 || params.gamma >= 1) {
    throw std::invalid_argument("gamma must be in (0, 1)");
  }
  const Rational slack = 1 / (2 - params.gamma) - Rational(1, 2);
  if (params.eps1 * (1 + params.delta1) + params.eps0 * (1 + params.delta0) >= slack) {
    throw ParameterGuard("eps1(1+delta1) + eps0(1+delta0) must stay below "
                         "1/(2-gamma) - 1/2");
  }
  if (params.clause_count > kMaxItems) {
    throw std::invalid_argument("at most 64 clauses");
  }
  const WeakDesign clauses = gen_weak_design(n - 1, params.eps0, params.delta0,
                                             params.clause_count, params.seed);
  const WeakDesign patterns =
      gen_weak_design(params.clause_count, params.eps1, params.delta1,
                      params.pattern_count, mix_seed(params.seed, 0x9a7, 1));
  // The realized overlaps must respect the same guard.
  if (clauses.max_overlap_ratio() + patterns.max_overlap_ratio() >= slack) {
    throw ParameterGuard("realized designs overlap too much for gamma");
  }
  const EqualRevenueDist dist(2, Rational(1, 2));
  const auto codes = sample_code_vectors(params.pattern_count, dist,
                                         params.prior_count,
                                         mix_seed(params.seed, 0xc0de, 2));
  const Rational weight(1, params.pattern_count);
  std::vector<HardPrior> family;
  for (const auto& code : codes) {
    HardPrior p;
    p.family = HardFamily::kXos;
    p.n_items = n;
    p.design = patterns;
    p.clauses = clauses;
    p.gamma = params.gamma;
    p.code = code;
    p.level_values = {dist.value(0), dist.value(1)};
    for (std::size_t j = 0; j < patterns.size(); ++j) {
      const Rational w = dist.value(code[j]);
      p.set_values.push_back(w);
      std::vector<std::vector<Rational>> table;
      for (std::size_t t = 0; t < clauses.size(); ++t) {
        std::vector<Rational> row(n, Rational(0));
        const auto items = members(clauses.sets[t]);
        const Rational share =
            1 / ((2 - params.gamma) * static_cast<long>(items.size()));
        for (int r : items) row[r] = share;
        if ((patterns.sets[j] >> t) & 1) row[n - 1] = w;
        table.push_back(std::move(row));
      }
      p.prior.types.push_back({weight, Valuation::xos(std::move(table))});
    }
    family.push_back(std::move(p));
  }
  return family;
}

MessageProtocol optimal_protocol_xos(const HardPrior& prior) {
  if (prior.family != HardFamily::kXos) throw FormMismatch("XOS prior expected");
  const Bundle last = Bundle{1} << (prior.n_items - 1);
  const Rational base = 1 / (2 - prior.gamma);
  std::map<Bundle, MessageProtocol::Lottery> lotteries;
  for (std::size_t j = 0; j < prior.design.size(); ++j) {
    const Bundle pattern = prior.design.sets[j];
    const auto marked = members(pattern);
    const Rational w(1, static_cast<long>(marked.size()));
    MessageProtocol::Lottery lottery;
    for (int t : marked) {
      lottery.push_back(
          {w, Outcome{prior.clauses.sets[t] | last, prior.set_values[j] + base, false}});
    }
    lotteries.emplace(pattern, std::move(lottery));
  }
  return MessageProtocol(static_cast<int>(prior.clauses.size()), std::move(lotteries));
}

Bundle honest_message(const HardPrior& prior, std::size_t type) {
  return prior.design.sets.at(type);
}

UnitDemandPreset unit_demand_preset(const std::string& name) {
  if (name == "ud16") return {name, 16, Rational(1, 4), Rational(1, 2), Rational(1, 2), 2, 8};
  if (name == "ud32") return {name, 32, Rational(1, 8), Rational(1), Rational(1, 2), 2, 8};
  if (name == "ud64") return {name, 64, Rational(1, 10), Rational(1, 10), Rational(1, 2), 2, 8};
  throw std::invalid_argument("unknown unit-demand preset: " + name);
}

XosParams xos_preset(const std::string& name) {
  if (name != "xos64") throw std::invalid_argument("unknown XOS preset: " + name);
  XosParams p;
  p.n = 64;
  p.eps0 = Rational(1, 50);
  p.delta0 = Rational(1, 10);
  p.eps1 = Rational(1, 50);
  p.delta1 = Rational(1, 10);
  p.eta = Rational(1, 10);
  p.gamma = Rational(1, 5);
  p.clause_count = 50;
  p.pattern_count = 8;
  p.prior_count = 8;
  return p;
}

void check_unit_demand_guard(const UnitDemandPreset& preset) {
  Rational cheapest = 1;
  for (int t = 1; t < preset.levels; ++t) cheapest *= preset.eps2;
  if (preset.eps1 * (1 + preset.delta1) >= cheapest) {
    throw ParameterGuard("eps1(1+delta1) must stay below eps2^(levels-1)");
  }
}

std::vector<HardPrior> unit_demand_family(const UnitDemandPreset& preset,
                                          int priors, std::uint64_t seed) {
  check_unit_demand_guard(preset);
  const WeakDesign design =
      gen_weak_design(preset.n, preset.eps1, preset.delta1, preset.sets, seed);
  const EqualRevenueDist dist(preset.levels, preset.eps2);
  const auto codes = sample_code_vectors(preset.sets, dist, priors,
                                         mix_seed(seed, 0xc0de, 1));
  return build_unit_demand_family(design, codes, dist);
}

}  // namespace auctionwire
