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

#include "auctionwire/auditor.h"

#include <algorithm>
#include <cmath>

#include "auctionwire/random.h"

namespace auctionwire {

namespace {

// Streams a sample mean and variance (Welford).
class Accumulator {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  Estimate estimate() const {
    Estimate e;
    e.mean = mean_;
    if (n_ > 1) {
      e.std_error = std::sqrt(m2_ / static_cast<double>(n_ - 1) / static_cast<double>(n_));
    }
    return e;
  }

 private:
  std::int64_t n_ = 0;
  double mean_ = 0;
  double m2_ = 0;
};

// Standardized distance of an observed frequency from an exact probability.
// Degenerate probabilities admit no deviation at all.
double z_score(double observed, const Rational& exact, std::int64_t trials) {
  const double p = to_double(exact);
  const double sd = std::sqrt(p * (1 - p) / static_cast<double>(trials));
  const double diff = std::abs(observed - p);
  if (sd == 0) return diff == 0 ? 0 : INFINITY;
  return diff / sd;
}

Rational lottery_utility(const Valuation& v, const MessageProtocol::Lottery& lottery) {
  Rational u = 0;
  for (const auto& [w, o] : lottery) u += w * (v.value(o.alloc_mask) - o.payment);
  return u;
}

std::string bits_string(const std::vector<std::uint8_t>& bits) {
  std::string s;
  for (auto b : bits) s.push_back(b ? '1' : '0');
  return s;
}

void finish(AuditReport& report, const Rational& tol) {
  report.verdict = Verdict::kIc;
  bool inconclusive = false;
  for (const auto& t : report.types) {
    if (t.gap > tol || t.honest_utility < -tol) {
      report.verdict = Verdict::kNonIc;
      return;
    }
    inconclusive = inconclusive || t.inconclusive;
  }
  if (inconclusive) report.verdict = Verdict::kInconclusive;
}

Rational exact_utility(const Protocol& protocol, BuyerStrategy& strategy,
                       const Valuation& v, const EvalOptions& options,
                       bool& inconclusive) {
  const OutcomeLaw law = evaluate(protocol, strategy, options);
  if (law.unexplored > 0) inconclusive = true;
  return law.expected_utility(v);
}

// Best utility over strategies that choose their next `left` unforced bits
// freely and then follow the best line still consistent.
class PrefixSearch {
 public:
  PrefixSearch(const StreamProtocol& protocol, const Valuation& v,
               const EvalOptions& eval)
      : protocol_(protocol), v_(v), eval_(eval) {}

  Rational solve(ProtocolState& state, History& history, KnownTau& known, int left) {
    const NodeKind kind = state.kind();
    if (kind == NodeKind::kLeaf) return utility(state.outcome());
    if (auto fixed = state.settled()) return utility(*fixed);
    if (kind == NodeKind::kBuyer) {
      if (state.forced()) {
        return step(state, history, known, left, state.allowed() == kAllowOne ? 1 : 0);
      }
      if (left == 0) return continuation(state, history, known);
      auto other = state.clone();
      const Rational zero = step(*other, history, known, left - 1, 0);
      const Rational one = step(state, history, known, left - 1, 1);
      return std::max(zero, one);
    }
    const ChanceSpec spec = state.chance();
    if (spec.kind == ChanceSpec::Kind::kTauBit) {
      const auto key = std::make_pair(spec.stream, spec.index);
      if (auto it = known.find(key); it != known.end()) {
        return step(state, history, known, left, it->second);
      }
      auto other = state.clone();
      known[key] = 0;
      const Rational zero = step(*other, history, known, left, 0);
      known[key] = 1;
      const Rational one = step(state, history, known, left, 1);
      known.erase(key);
      return (zero + one) / 2;
    }
    const Rational p0 = spec.p_zero();
    if (p0 == 1) return step(state, history, known, left, 0);
    if (p0 == 0) return step(state, history, known, left, 1);
    auto other = state.clone();
    const Rational zero = step(*other, history, known, left, 0);
    const Rational one = step(state, history, known, left, 1);
    return p0 * zero + (1 - p0) * one;
  }

  std::int64_t deviations() const { return deviations_; }
  bool inconclusive() const { return inconclusive_; }

 private:
  Rational step(ProtocolState& state, History& history, KnownTau& known, int left,
                int bit) {
    push_event(history, state, bit);
    state.apply(bit);
    Rational out = solve(state, history, known, left);
    history.pop_back();
    return out;
  }

  Rational utility(const Outcome& o) const { return v_.value(o.alloc_mask) - o.payment; }

  Rational continuation(const ProtocolState& state, const History& history,
                        const KnownTau& known) {
    const auto* s = dynamic_cast<const StreamState*>(&state);
    if (s == nullptr) throw std::logic_error("stream state expected");
    std::optional<Rational> best;
    for (std::size_t line = 0; line < protocol_.table().line_count(); ++line) {
      if (!s->feasible(line)) continue;
      LineStrategy follow(protocol_, line);
      const OutcomeLaw law = evaluate_from(state, follow, history, known, eval_);
      if (law.unexplored > 0) inconclusive_ = true;
      const Rational u = law.expected_utility(v_);
      ++deviations_;
      if (!best || u > *best) best = u;
    }
    if (!best) throw std::logic_error("no menu line consistent with the digits sent");
    return *best;
  }

  const StreamProtocol& protocol_;
  const Valuation& v_;
  EvalOptions eval_;
  std::int64_t deviations_ = 0;
  bool inconclusive_ = false;
};

}  // namespace

McStats mc_outcome(const Protocol& protocol, BuyerStrategy& strategy, int n_items,
                   std::int64_t trials, std::uint64_t seed, const RunOptions& options) {
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (n_items < 0 || n_items > kMaxItems) throw std::invalid_argument("bad n_items");
  std::vector<std::int64_t> item_hits(n_items, 0);
  std::map<Bundle, std::int64_t> bundle_hits;
  Accumulator payment, rounds, bits;
  std::int64_t flagged = 0;
  for (std::int64_t i = 0; i < trials; ++i) {
    const Transcript t = run(protocol, strategy,
                             mix_seed(seed, kMcStream, static_cast<std::uint64_t>(i)),
                             options);
    for (int item = 0; item < n_items; ++item) {
      if ((t.outcome.alloc_mask >> item) & 1) ++item_hits[item];
    }
    ++bundle_hits[t.outcome.alloc_mask];
    payment.add(to_double(t.outcome.payment));
    rounds.add(static_cast<double>(t.rounds));
    bits.add(static_cast<double>(t.buyer_bits.size()));
    if (t.outcome.flagged) ++flagged;
  }
  const double n = static_cast<double>(trials);
  auto freq = [n](std::int64_t hits) {
    const double p = static_cast<double>(hits) / n;
    return Estimate{p, std::sqrt(p * (1 - p) / n)};
  };
  McStats stats;
  stats.trials = trials;
  stats.seed = seed;
  for (auto hits : item_hits) stats.item_freq.push_back(freq(hits));
  for (const auto& [bundle, hits] : bundle_hits) stats.bundle_freq[bundle] = freq(hits);
  stats.payment = payment.estimate();
  stats.rounds = rounds.estimate();
  stats.buyer_bits = bits.estimate();
  stats.flagged = freq(flagged);
  return stats;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kIc:
      return "IC";
    case Verdict::kNonIc:
      return "non-IC";
    case Verdict::kInconclusive:
      return "inconclusive";
  }
  return "?";
}

std::int64_t AuditReport::deviations() const {
  std::int64_t total = 0;
  for (const auto& t : types) total += t.deviations;
  return total;
}

Rational AuditReport::max_gap() const {
  if (types.empty()) return 0;
  Rational worst = types.front().gap;
  for (const auto& t : types) worst = std::max(worst, t.gap);
  return worst;
}

Rational line_utility(const Valuation& v, const NormalizedLine& line,
                      const Rational& cap) {
  return expected_value(v, line.allocation) - line.pay_prob * cap;
}

AuditReport equivalence_check(const Protocol& protocol, const NormalizedMenu& menu,
                              const Prior& prior, const LineStrategyFactory& honest,
                              const EquivalenceOptions& options) {
  AuditReport report;
  report.deviation_space = "none (outcome comparison)";
  Accumulator rounds, bits;
  for (std::size_t k = 0; k < prior.types.size(); ++k) {
    const Valuation& v = prior.types[k].valuation;
    TypeAudit audit;
    audit.type = k;
    audit.honest_line = best_response(v, menu);
    const NormalizedLine& line = menu.lines[audit.honest_line];
    audit.honest_utility = line_utility(v, line, menu.cap);
    audit.best_deviation = audit.honest_utility;
    auto strategy = honest(audit.honest_line);
    const std::uint64_t seed = mix_seed(options.seed, 0xe9, k);
    const McStats stats =
        mc_outcome(protocol, *strategy, menu.n_items, options.trials, seed, options.run);
    double worst = 0;
    const ItemProbs marginals = MenuLine{line.allocation, 0}.marginals(menu.n_items);
    for (int i = 0; i < menu.n_items; ++i) {
      worst = std::max(worst, z_score(stats.item_freq[i].mean, marginals[i], options.trials));
    }
    if (const auto* dist = std::get_if<BundleDist>(&line.allocation)) {
      std::map<Bundle, Rational> exact(dist->begin(), dist->end());
      for (const auto& [bundle, est] : stats.bundle_freq) exact.try_emplace(bundle, 0);
      for (const auto& [bundle, p] : exact) {
        auto it = stats.bundle_freq.find(bundle);
        const double observed = it == stats.bundle_freq.end() ? 0 : it->second.mean;
        worst = std::max(worst, z_score(observed, p, options.trials));
      }
    }
    // Payments are the cap or nothing, so the paying frequency is binomial.
    const double pay_freq = menu.cap == 0 ? 0 : stats.payment.mean / to_double(menu.cap);
    worst = std::max(worst, z_score(pay_freq, line.pay_prob, options.trials));
    audit.max_z = worst;
    if (worst > options.z_tol) report.equivalent = false;
    rounds.add(stats.rounds.mean);
    bits.add(stats.buyer_bits.mean);
    report.types.push_back(std::move(audit));
  }
  report.rounds = rounds.estimate();
  report.buyer_bits = bits.estimate();
  return report;
}

AuditReport ic_audit_menu(const StreamProtocol& protocol, const NormalizedMenu& menu,
                          const Prior& prior, const IcOptions& options) {
  if (options.depth < 0) throw std::invalid_argument("depth must be non-negative");
  if (protocol.table().line_count() != menu.lines.size()) {
    throw std::invalid_argument("protocol was not compiled from this menu");
  }
  AuditReport report;
  report.deviation_space = "audited subset: all menu lines, plus depth-" +
                           std::to_string(options.depth) +
                           " free prefixes followed by any consistent line";
  for (std::size_t k = 0; k < prior.types.size(); ++k) {
    const Valuation& v = prior.types[k].valuation;
    TypeAudit audit;
    audit.type = k;
    audit.honest_line = best_response(v, menu);
    LineStrategy honest(protocol, audit.honest_line);
    audit.honest_utility =
        exact_utility(protocol, honest, v, options.eval, audit.inconclusive);
    audit.max_exact_delta =
        abs(audit.honest_utility - line_utility(v, menu.lines[audit.honest_line], menu.cap));
    std::optional<Rational> best;
    for (std::size_t l = 0; l < menu.lines.size(); ++l) {
      if (l == audit.honest_line) continue;
      const Rational u = line_utility(v, menu.lines[l], menu.cap);
      ++audit.deviations;
      if (!best || u > *best) {
        best = u;
        audit.deviation = "line " + std::to_string(l);
      }
    }
    PrefixSearch search(protocol, v, options.eval);
    auto root = protocol.root();
    History history;
    KnownTau known;
    const Rational prefix = search.solve(*root, history, known, options.depth);
    audit.deviations += search.deviations();
    audit.inconclusive = audit.inconclusive || search.inconclusive();
    if (!best || prefix > *best) {
      best = prefix;
      audit.deviation = "depth-" + std::to_string(options.depth) + " prefix";
    }
    audit.best_deviation = *best;
    audit.gap = audit.best_deviation - audit.honest_utility;
    report.types.push_back(std::move(audit));
  }
  finish(report, options.tol);
  return report;
}

AuditReport ic_audit_symmetric(const SymmetricProtocol& protocol, const SymMenu& menu,
                               const Prior& prior, const IcOptions& options) {
  AuditReport report;
  report.deviation_space = "all strategies (backward induction)";
  for (std::size_t k = 0; k < prior.types.size(); ++k) {
    const Valuation& v = prior.types[k].valuation;
    TypeAudit audit;
    audit.type = k;
    const SymmetricChoice choice = best_symmetric_response(menu, v);
    audit.honest_line = choice.line;
    SymmetricStrategy honest =
        honest_strategy_symmetric(menu, choice.line, choice.assignment);
    audit.honest_utility =
        exact_utility(protocol, honest, v, options.eval, audit.inconclusive);
    audit.max_exact_delta = abs(audit.honest_utility - choice.utility);
    try {
      const BestResponse br = tree_best_response(protocol, v, options.search);
      audit.best_deviation = br.value;
      audit.deviations = static_cast<std::int64_t>(br.strategy.choices().size());
      audit.deviation = "backward induction";
    } catch (const SearchBudgetExceeded&) {
      audit.best_deviation = audit.honest_utility;
      audit.inconclusive = true;
    }
    audit.gap = audit.best_deviation - audit.honest_utility;
    report.types.push_back(std::move(audit));
  }
  finish(report, options.tol);
  return report;
}

AuditReport ic_audit_nonic(const NonicProtocol& protocol, const Prior& prior,
                           const IcOptions& options) {
  if (options.depth < 0) throw std::invalid_argument("depth must be non-negative");
  const BundleMenu& menu = protocol.shape().menu;
  std::vector<NormalizedLine> lines;
  for (std::size_t l = 0; l < menu.lines.size(); ++l) {
    lines.push_back({menu.distribution(l), menu.lines[l].pay_prob});
  }
  const NormalizedMenu normalized{menu.n_items, menu.cap, lines};
  // Every trigger prefix up to the depth, shortest first.
  std::vector<std::vector<std::uint8_t>> triggers{{}};
  for (std::size_t i = 0; i < triggers.size(); ++i) {
    if (static_cast<int>(triggers[i].size()) == options.depth) continue;
    for (std::uint8_t b : {0, 1}) {
      auto t = triggers[i];
      t.push_back(b);
      triggers.push_back(std::move(t));
    }
  }
  AuditReport report;
  report.deviation_space = "audited subset: switch to another line once the threshold "
                           "prefix matches a trigger of length <= " +
                           std::to_string(options.depth);
  for (std::size_t k = 0; k < prior.types.size(); ++k) {
    const Valuation& v = prior.types[k].valuation;
    TypeAudit audit;
    audit.type = k;
    audit.honest_line = best_response(v, normalized);
    NonicLineStrategy honest(audit.honest_line);
    audit.honest_utility =
        exact_utility(protocol, honest, v, options.eval, audit.inconclusive);
    audit.max_exact_delta = abs(audit.honest_utility -
                                line_utility(v, lines[audit.honest_line], menu.cap));
    std::optional<Rational> best;
    for (std::size_t l = 0; l < lines.size(); ++l) {
      if (l == audit.honest_line) continue;
      for (const auto& trigger : triggers) {
        SwitchStrategy deviation(audit.honest_line, l, trigger);
        const OutcomeLaw law = evaluate(protocol, deviation, options.eval);
        if (law.unexplored > 0) audit.inconclusive = true;
        const Rational u = law.expected_utility(v);
        ++audit.deviations;
        if (!best || u > *best) {
          best = u;
          audit.deviation = "switch to line " + std::to_string(l) + " after prefix '" +
                            bits_string(trigger) + "'";
        }
      }
    }
    audit.best_deviation = best.value_or(audit.honest_utility);
    audit.gap = audit.best_deviation - audit.honest_utility;
    report.types.push_back(std::move(audit));
  }
  finish(report, options.tol);
  return report;
}

AuditReport ic_audit_messages(const MessageProtocol& protocol, const HardPrior& prior,
                              const IcOptions& options) {
  AuditReport report;
  report.deviation_space = "every listed message; unlisted messages yield nothing";
  for (std::size_t k = 0; k < prior.prior.types.size(); ++k) {
    const Valuation& v = prior.prior.types[k].valuation;
    const Bundle own = honest_message(prior, k);
    TypeAudit audit;
    audit.type = k;
    audit.honest_line = k;
    audit.honest_utility = lottery_utility(v, protocol.lottery(own));
    std::optional<Rational> best;
    for (const auto& [message, lottery] : protocol.lotteries()) {
      if (message == own) continue;
      const Rational u = lottery_utility(v, lottery);
      ++audit.deviations;
      if (!best || u > *best) {
        best = u;
        audit.deviation = "message " + std::to_string(message);
      }
    }
    audit.best_deviation = best.value_or(audit.honest_utility);
    audit.gap = audit.best_deviation - audit.honest_utility;
    report.types.push_back(std::move(audit));
  }
  finish(report, options.tol);
  return report;
}

AuditReport ic_audit_tree(const Protocol& protocol, const Prior& prior,
                          const TypeStrategyFactory& honest, const IcOptions& options) {
  AuditReport report;
  report.deviation_space = "all strategies (backward induction)";
  for (std::size_t k = 0; k < prior.types.size(); ++k) {
    const Valuation& v = prior.types[k].valuation;
    TypeAudit audit;
    audit.type = k;
    audit.honest_line = k;
    auto strategy = honest(k);
    audit.honest_utility =
        exact_utility(protocol, *strategy, v, options.eval, audit.inconclusive);
    try {
      const BestResponse br = tree_best_response(protocol, v, options.search);
      audit.best_deviation = br.value;
      audit.deviations = static_cast<std::int64_t>(br.strategy.choices().size());
      audit.deviation = "backward induction";
    } catch (const SearchBudgetExceeded&) {
      audit.best_deviation = audit.honest_utility;
      audit.inconclusive = true;
    }
    audit.gap = audit.best_deviation - audit.honest_utility;
    report.types.push_back(std::move(audit));
  }
  finish(report, options.tol);
  return report;
}

int RevenueReport::count_at_least(const Rational& fraction) const {
  return static_cast<int>(std::count_if(priors.begin(), priors.end(),
                                        [&](const PriorRevenue& p) {
                                          return p.fraction >= fraction;
                                        }));
}

RevenueReport revenue_audit(const Protocol& protocol, const std::vector<HardPrior>& priors,
                            const BestResponseOptions& options) {
  RevenueReport report;
  Rational total = 0;
  for (const auto& prior : priors) {
    PriorRevenue r;
    for (const auto& t : prior.prior.types) {
      r.revenue += t.weight * tree_best_response(protocol, t.valuation, options).revenue;
    }
    r.welfare = prior.welfare();
    r.fraction = r.welfare == 0 ? Rational(0) : Rational(r.revenue / r.welfare);
    total += r.fraction;
    if (report.priors.empty() || r.fraction < report.min_fraction) {
      report.min_fraction = r.fraction;
    }
    report.priors.push_back(std::move(r));
  }
  if (!priors.empty()) report.mean_fraction = total / static_cast<long>(priors.size());
  return report;
}

}  // namespace auctionwire
