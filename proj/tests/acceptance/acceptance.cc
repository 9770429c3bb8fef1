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

// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only if
// every criterion passes. All seeds and tolerances are fixed here.

#include <bit>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "auctionwire/auditor.h"
#include "auctionwire/ddt.h"
#include "auctionwire/expost_ir.h"
#include "auctionwire/random.h"
#include "json.hpp"
#include "oracles.h"

namespace aw = auctionwire;
using aw::Rational;

namespace {

// Tolerances.
constexpr double kZ = 4;                    // standard errors for Monte Carlo checks
constexpr double kEquivalenceSeconds = 60;  // criterion 1 budget
constexpr double kDdtSeconds = 300;         // criterion 4 budget
constexpr double kDdtPrelim = 1.99;
constexpr double kDdtPrelimTol = 0.005;
constexpr double kDdtAbBound = 0.94 + 0.01 + 1.02;
constexpr double kDdtOverall = 2.00;
const Rational kExpostEps = aw::ratio(1, 1024);
const Rational kRevenueThreshold = aw::ratio(99, 100);

struct Result {
  bool pass = true;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double x, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << x;
  return s.str();
}

aw::LineStrategyFactory stream_lines(const aw::StreamProtocol& p) {
  return [&p](std::size_t line) { return std::make_unique<aw::LineStrategy>(p, line); };
}

// Mean and standard error of a sample.
struct Moments {
  double sum = 0, sq = 0;
  std::int64_t n = 0;
  void add(double x) {
    sum += x;
    sq += x * x;
    ++n;
  }
  double mean() const { return sum / static_cast<double>(n); }
  double se() const {
    const double m = mean();
    return std::sqrt(std::max(0.0, sq / static_cast<double>(n) - m * m) /
                     static_cast<double>(n));
  }
};

Result outcome_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1001);
  int failed = 0;
  double worst = 0;
  for (int m = 0; m < 50; ++m) {
    const int n = 1 + static_cast<int>(rng() % 8);
    const int lines = 2 + static_cast<int>(rng() % 31);
    const aw::NormalizedMenu menu =
        aw::normalize_payments(aw::testing::random_dyadic_menu(rng, n, lines, 16));
    const aw::StreamProtocol p = aw::compile_additive(menu);
    aw::Prior prior;
    prior.types.push_back({1, aw::testing::random_additive(rng, n, 8)});
    aw::EquivalenceOptions options;
    options.trials = 100'000;
    options.seed = aw::mix_seed(1001, 1, static_cast<std::uint64_t>(m));
    options.z_tol = kZ;
    const aw::AuditReport r = aw::equivalence_check(p, menu, prior, stream_lines(p), options);
    if (!r.equivalent) ++failed;
    for (const auto& t : r.types) worst = std::max(worst, t.max_z);
  }
  const double elapsed = seconds_since(start);
  Result out;
  out.pass = failed == 0 && elapsed < kEquivalenceSeconds;
  out.detail = "50 menus x 1e5 runs, " + std::to_string(failed) + " outside " + fmt(kZ) +
               " sigma, worst z " + fmt(worst) + ", " + fmt(elapsed, 3) + " s";
  return out;
}

Result round_oracle() {
  std::mt19937_64 rng(2002);
  int failed = 0;
  double worst = 0;
  for (int m = 0; m < 100; ++m) {
    const int n = m < 50 ? 1 : 2 + static_cast<int>(rng() % 3);
    const int bits = 1 + static_cast<int>(rng() % 12);
    const int lines = 2 + static_cast<int>(rng() % 6);
    const aw::NormalizedMenu menu =
        aw::normalize_payments(aw::testing::random_dyadic_menu(rng, n, lines, bits));
    const aw::StreamProtocol p = aw::compile_additive(menu);
    const std::size_t line = 1 + rng() % (menu.lines.size() - 1);
    aw::LineStrategy s(p, line);
    Moments rounds;
    for (int i = 0; i < 20'000; ++i) {
      rounds.add(static_cast<double>(
          aw::run(p, s, aw::mix_seed(2002, static_cast<std::uint64_t>(m),
                                     static_cast<std::uint64_t>(i)))
              .rounds));
    }
    const double exact =
        aw::to_double(aw::exact_expected_rounds(aw::exact_alloc_prob(menu.lines[line])));
    const double z = std::abs(rounds.mean() - exact) / rounds.se();
    worst = std::max(worst, z);
    if (z > kZ) ++failed;
  }
  // Recurrence bound on measured means.
  std::string recurrence;
  bool bound_ok = true;
  for (int n : {2, 4, 8, 16}) {
    double highest = 0;
    for (int m = 0; m < 10; ++m) {
      const aw::NormalizedMenu menu =
          aw::normalize_payments(aw::testing::random_dyadic_menu(rng, n, 4, 16));
      const aw::StreamProtocol p = aw::compile_additive(menu);
      aw::LineStrategy s(p, 1 + rng() % 3);
      Moments rounds;
      for (int i = 0; i < 20'000; ++i) {
        rounds.add(static_cast<double>(
            aw::run(p, s, aw::mix_seed(2003, static_cast<std::uint64_t>(n * 100 + m),
                                       static_cast<std::uint64_t>(i)))
                .rounds));
      }
      const double r = rounds.mean();
      if (r > 2 * std::log2(n) + r / n) bound_ok = false;
      highest = std::max(highest, r);
    }
    recurrence += " n=" + std::to_string(n) + ":" + fmt(highest, 3) + "<=" +
                  fmt(2 * std::log2(n) * n / (n - 1), 3);
  }
  Result out;
  out.pass = failed == 0 && bound_ok;
  out.detail = "100 menus, " + std::to_string(failed) + " outside " + fmt(kZ) +
               " sigma, worst z " + fmt(worst) + "; highest mean rounds" + recurrence;
  return out;
}

aw::SymMenu random_symmenu(std::mt19937_64& rng, int n, const Rational& delta, int lines) {
  const std::vector<Rational> grid = aw::symmetric_grid(n, delta);
  const int zero = static_cast<int>(grid.size()) - 1;
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  std::vector<aw::SymMenuLine> out = {{0, {all}, {{{zero, n}}}}};
  while (static_cast<int>(out.size()) < lines) {
    std::vector<int> items = all;
    std::shuffle(items.begin(), items.end(), rng);
    aw::SymMenuLine line;
    line.payment = aw::testing::dyadic(rng() % 9, 3);
    std::size_t at = 0;
    while (at < items.size()) {
      const std::size_t size = 1 + rng() % (items.size() - at);
      std::map<int, int> hist;
      for (std::size_t k = 0; k < size; ++k) ++hist[static_cast<int>(rng() % grid.size())];
      line.partition.emplace_back(items.begin() + at, items.begin() + at + size);
      line.histograms.push_back(hist);
      at += size;
    }
    Rational mass = 0;
    for (const auto& h : line.histograms) {
      for (const auto& [g, c] : h) mass += grid[g] * c;
    }
    if (mass <= 1) out.push_back(line);
  }
  return aw::SymMenu(n, delta, out);
}

aw::Prior random_prior(std::mt19937_64& rng, int n, int types) {
  aw::Prior prior;
  for (int k = 0; k < types; ++k) {
    prior.types.push_back({aw::ratio(1, types), aw::testing::random_additive(rng, n, 3)});
  }
  return prior;
}

Result ic_audits() {
  std::mt19937_64 rng(3003);
  int stream_bad = 0;
  std::int64_t stream_deviations = 0;
  for (int m = 0; m < 8; ++m) {
    const int n = 1 + m % 2;
    const aw::NormalizedMenu menu = aw::normalize_payments(
        aw::testing::random_dyadic_menu(rng, n, 3 + static_cast<int>(rng() % 4), 3));
    const aw::StreamProtocol p = aw::compile_additive(menu);
    aw::IcOptions options;
    options.depth = 6;
    const aw::AuditReport r = aw::ic_audit_menu(p, menu, random_prior(rng, n, 4), options);
    stream_deviations += r.deviations();
    if (r.verdict != aw::Verdict::kIc || r.max_gap() > 0) ++stream_bad;
  }
  int sym_bad = 0;
  for (int m = 0; m < 6; ++m) {
    const aw::SymMenu menu = random_symmenu(rng, 2, Rational(1, 2), 4);
    const aw::SymmetricProtocol p = aw::compile_symmetric(menu);
    const aw::AuditReport r = aw::ic_audit_symmetric(p, menu, random_prior(rng, 2, 4));
    if (r.verdict != aw::Verdict::kIc || r.max_gap() > 0) ++sym_bad;
  }
  // Negative controls.
  aw::Prior cheater;
  cheater.types.push_back({1, aw::Valuation::additive({Rational(4, 3)})});
  aw::IcOptions nonic_options;
  nonic_options.depth = 6;
  const aw::AuditReport nonic = aw::ic_audit_nonic(
      aw::compile_nonic(aw::quadratic_price_menu(3)), cheater, nonic_options);
  const auto family = aw::unit_demand_family(aw::unit_demand_preset("ud16"), 1, 3003);
  const aw::HardPrior& prior = family[0];
  const aw::AuditReport cheap = aw::ic_audit_tree(
      aw::nontruthful_impl_unit_demand(prior), prior.prior, [&](std::size_t k) {
        return std::make_unique<aw::NontruthfulStrategy>(prior.design.sets[k], prior.code[k]);
      });
  Result out;
  out.pass = stream_bad == 0 && sym_bad == 0 && nonic.verdict == aw::Verdict::kNonIc &&
             cheap.verdict == aw::Verdict::kNonIc;
  out.detail = "stream " + std::to_string(8 - stream_bad) + "/8 IC (" +
               std::to_string(stream_deviations) + " deviations, depth 6), symmetric " +
               std::to_string(6 - sym_bad) + "/6 IC; controls: announce-last " +
               aw::verdict_name(nonic.verdict) + " gap " + nonic.max_gap().get_str() +
               ", short unit-demand " + aw::verdict_name(cheap.verdict) + " gap " +
               cheap.max_gap().get_str();
  return out;
}

Result ddt_numbers() {
  const auto start = std::chrono::steady_clock::now();
  const aw::SyntheticDdtOracle oracle;
  const aw::DdtProtocol p = aw::build_ddt(oracle, Rational(1 << 20));
  const aw::DdtBitReport r = aw::estimate_ddt_bits(p, oracle, 1'000'000, 4004);
  const double elapsed = seconds_since(start);
  Result out;
  out.pass = std::abs(r.signal_z.mean - kDdtPrelim) <= kDdtPrelimTol &&
             std::abs(r.signal_w.mean - kDdtPrelim) <= kDdtPrelimTol &&
             r.a_or_b.mean <= kDdtAbBound && r.overall.mean < kDdtOverall &&
             elapsed < kDdtSeconds;
  out.detail = "Z " + fmt(r.signal_z.mean) + ", W " + fmt(r.signal_w.mean) + ", A|B " +
               fmt(r.a_or_b.mean) + " (naming " + fmt(r.signal_a_or_b.mean) +
               "), overall " + fmt(r.overall.mean) + ", " + fmt(elapsed, 3) + " s";
  return out;
}

Result conditional_cheat() {
  const aw::CheatReport r = aw::demonstrate_cheat();
  Result out;
  out.pass = r.honest_low == Rational(4, 9) && r.deviation_low == Rational(5, 6);
  out.detail = "after a low first digit: honest " + r.honest_low.get_str() + ", deviation " +
               r.deviation_low.get_str();
  return out;
}

Result expost() {
  std::mt19937_64 rng(6006);
  const Rational big_u = 2;  // two items worth at most 1 each; payments at most 1
  const double log_ratio = std::log2(aw::to_double(big_u / kExpostEps));
  int tested = 0, utility_bad = 0, payment_bad = 0, bits_bad = 0;
  double worst_z = 0;
  std::int64_t worst_slack = std::numeric_limits<std::int64_t>::max();
  while (tested < 20) {
    aw::RandomTreeOptions options;
    options.depth = 6;
    const aw::ExplicitTree tree = aw::random_tree(rng, options);
    const int c = tree.chance_count();
    if (c < 1 || c > 8) continue;
    ++tested;
    auto inner = std::make_shared<aw::ExplicitTree>(tree);
    const aw::Valuation v = aw::testing::random_additive(rng, options.n_items, 3);
    aw::BestResponse br = aw::tree_best_response(*inner, v);
    const aw::OutcomeLaw base = aw::evaluate(*inner, br.strategy);
    const Rational u_bar = base.expected_utility(v);
    aw::ExpostProtocol p(inner, kExpostEps, big_u);
    aw::ExpostStrategy s(br.strategy, v);
    const auto bound = static_cast<std::int64_t>(std::floor(2 * (c * log_ratio + c * c)));
    Moments payment;
    for (int i = 0; i < 4000; ++i) {
      const std::uint64_t seed = aw::mix_seed(6006, static_cast<std::uint64_t>(tested),
                                              static_cast<std::uint64_t>(i));
      const aw::Transcript t = aw::run(p, s, seed);
      const aw::Transcript plain = aw::run(*inner, br.strategy, seed);
      const Rational u = v.value(t.outcome.alloc_mask) - t.outcome.payment;
      if (abs(u - u_bar) > kExpostEps) ++utility_bad;
      payment.add(aw::to_double(t.outcome.payment));
      const std::int64_t extra =
          static_cast<std::int64_t>(t.buyer_bits.size()) + t.forced_bits -
          static_cast<std::int64_t>(plain.buyer_bits.size()) - plain.forced_bits;
      if (extra > bound) ++bits_bad;
      worst_slack = std::min(worst_slack, bound - extra);
    }
    const double expected = aw::to_double(base.expected_payment);
    const double z = payment.se() == 0 ? (payment.mean() == expected ? 0 : 1e9)
                                       : std::abs(payment.mean() - expected) / payment.se();
    worst_z = std::max(worst_z, z);
    if (z > kZ) ++payment_bad;
  }
  Result out;
  out.pass = utility_bad == 0 && payment_bad == 0 && bits_bad == 0;
  out.detail = "20 trees x 4000 runs, eps 2^-10: " + std::to_string(utility_bad) +
               " runs off by more than eps, payment worst z " + fmt(worst_z) + ", " +
               std::to_string(bits_bad) + " runs over 2(C log2(U/eps) + C^2), least slack " +
               std::to_string(worst_slack) + " bits";
  return out;
}

bool design_ok(const aw::WeakDesign& d, int size, int bound) {
  for (std::size_t a = 0; a < d.size(); ++a) {
    if (std::popcount(d.sets[a]) != size) return false;
    for (std::size_t b = a + 1; b < d.size(); ++b) {
      if (d.sets[a] == d.sets[b] || std::popcount(d.sets[a] & d.sets[b]) > bound) return false;
    }
  }
  return true;
}

int floor_of(const Rational& q) {
  mpz_class out;
  mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return static_cast<int>(out.get_si());
}

Rational honest_revenue(const aw::MessageProtocol& p, const aw::HardPrior& prior) {
  Rational revenue = 0;
  for (std::size_t k = 0; k < prior.prior.types.size(); ++k) {
    aw::MessageStrategy honest(aw::honest_message(prior, k));
    revenue += prior.prior.types[k].weight * aw::evaluate(p, honest).expected_payment;
  }
  return revenue;
}

// Prepends a buyer choice between walking away with nothing and playing
// `tree`, so every type has a nonnegative interim utility.
aw::ExplicitTree with_opt_out(const aw::ExplicitTree& tree) {
  std::vector<aw::TreeNode> nodes;
  for (int id = 0; id < tree.size(); ++id) nodes.push_back(tree.node(id));
  const int walk = static_cast<int>(nodes.size());
  nodes.push_back(aw::TreeNode{});
  aw::TreeNode root;
  root.kind = aw::NodeKind::kBuyer;
  root.children = {walk, tree.root_id()};
  nodes.push_back(root);
  return aw::ExplicitTree(std::move(nodes), walk + 1);
}

// The soft revenue property: random IR depth-6 trees on 32 priors of the n=16
// preset, compared against the frozen golden when one exists.
std::string revenue_property(bool& golden_ok) {
  const auto priors = aw::unit_demand_family(aw::unit_demand_preset("ud16"), 32, 7007);
  nlohmann::json trees = nlohmann::json::array();
  int worst = 0;
  for (std::uint64_t seed = 1; seed <= 16; ++seed) {
    std::mt19937_64 rng(aw::mix_seed(7007, 2, seed));
    aw::RandomTreeOptions options;
    options.depth = 6;
    options.n_items = 16;
    const aw::RevenueReport r = aw::revenue_audit(with_opt_out(aw::random_tree(rng, options)), priors);
    const int count = r.count_at_least(kRevenueThreshold);
    worst = std::max(worst, count);
    Rational best = 0;
    for (const auto& pr : r.priors) best = std::max(best, pr.fraction);
    trees.push_back({{"seed", seed}, {"count", count}, {"max_fraction", best.get_str()}});
  }
  const nlohmann::json report = {{"preset", "ud16"}, {"priors", 32}, {"prior_seed", 7007},
                                 {"threshold", kRevenueThreshold.get_str()},
                                 {"trees", trees}};
  const std::filesystem::path golden =
      std::filesystem::path(AUCTIONWIRE_GOLDEN_DIR) / "revenue_ud16.json";
  std::string status;
  if (std::filesystem::exists(golden)) {
    std::ifstream in(golden);
    golden_ok = nlohmann::json::parse(in) == report;
    status = golden_ok ? "matches golden" : "DIFFERS from golden";
  } else {
    std::filesystem::create_directories(golden.parent_path());
    std::ofstream(golden) << report.dump(2) << "\n";
    golden_ok = true;
    status = "golden written";
  }
  return "revenue property (soft): priors >= 0.99 for one tree " + std::to_string(worst) +
         " of 32 over 16 seeded trees" + (worst <= 1 ? "" : " [property violated]") + ", " +
         status;
}

Result hard_families() {
  bool designs = true;
  for (const char* name : {"ud16", "ud32", "ud64"}) {
    const aw::UnitDemandPreset preset = aw::unit_demand_preset(name);
    const aw::WeakDesign d =
        aw::gen_weak_design(preset.n, preset.eps1, preset.delta1, preset.sets, 7001);
    const int size = floor_of(preset.eps1 * preset.n);
    const int bound = floor_of((1 + preset.delta1) * preset.eps1 * preset.eps1 * preset.n);
    designs = designs && static_cast<int>(d.size()) == preset.sets && design_ok(d, size, bound);
  }

  // Unit demand at n = 64: exact deviation utilities against the closed form.
  const aw::UnitDemandPreset ud64 = aw::unit_demand_preset("ud64");
  const Rational overlap = ud64.eps1 * (1 + ud64.delta1);
  bool ud_ic = true, ud_full = true, closed_form = true;
  Rational worst_gap = -1;
  for (const auto& prior : aw::unit_demand_family(ud64, 4, 7002)) {
    const aw::MessageProtocol p = aw::optimal_protocol_unit_demand(prior);
    const aw::AuditReport r = aw::ic_audit_messages(p, prior);
    ud_ic = ud_ic && r.verdict == aw::Verdict::kIc && r.max_gap() < 0;
    worst_gap = std::max(worst_gap, r.max_gap());
    for (std::size_t k = 0; k < prior.design.size(); ++k) {
      const aw::Valuation& v = prior.prior.types[k].valuation;
      const Rational honest = aw::evaluate(p, *std::make_unique<aw::MessageStrategy>(
                                                  aw::honest_message(prior, k)))
                                  .expected_utility(v);
      for (std::size_t j = 0; j < prior.design.size(); ++j) {
        if (j == k) continue;
        aw::MessageStrategy deviation(prior.design.sets[j]);
        const Rational gap = aw::evaluate(p, deviation).expected_utility(v) - honest;
        if (gap > overlap * prior.set_values[k] - prior.set_values[j]) closed_form = false;
      }
    }
    ud_full = ud_full && honest_revenue(p, prior) == prior.welfare();
  }
  // Revenue through backward induction where the message space allows it.
  const auto ud16 = aw::unit_demand_family(aw::unit_demand_preset("ud16"), 4, 7003);
  for (const auto& prior : ud16) {
    const aw::RevenueReport r = aw::revenue_audit(aw::optimal_protocol_unit_demand(prior), {prior});
    ud_full = ud_full && r.min_fraction == 1;
  }

  bool xos_ok = true;
  for (const auto& prior : aw::build_xos_family(aw::xos_preset("xos64"))) {
    const aw::MessageProtocol p = aw::optimal_protocol_xos(prior);
    const aw::AuditReport r = aw::ic_audit_messages(p, prior);
    xos_ok = xos_ok && r.verdict == aw::Verdict::kIc && r.max_gap() < 0 &&
             honest_revenue(p, prior) == prior.welfare();
  }

  bool laws_match = true;
  for (const auto& prior : ud16) {
    const aw::NontruthfulUnitDemand cheap = aw::nontruthful_impl_unit_demand(prior);
    const aw::MessageProtocol full = aw::optimal_protocol_unit_demand(prior);
    for (std::size_t k = 0; k < prior.design.size(); ++k) {
      aw::NontruthfulStrategy honest(prior.design.sets[k], prior.code[k]);
      aw::MessageStrategy named(aw::honest_message(prior, k));
      const aw::OutcomeLaw a = aw::evaluate(cheap, honest);
      const aw::OutcomeLaw b = aw::evaluate(full, named);
      laws_match = laws_match && a.alloc == b.alloc && a.expected_payment == b.expected_payment;
    }
  }

  bool golden_ok = true;
  const std::string soft = revenue_property(golden_ok);
  Result out;
  out.pass = designs && ud_ic && closed_form && ud_full && xos_ok && laws_match && golden_ok;
  out.detail = std::string("designs n=16/32/64 ") + (designs ? "ok" : "BAD") +
               "; unit demand IC " + (ud_ic ? "yes" : "NO") + " (worst gap " +
               worst_gap.get_str() + ", closed form " + (closed_form ? "held" : "VIOLATED") +
               "), full welfare " + (ud_full ? "yes" : "NO") + "; XOS IC and full welfare " +
               (xos_ok ? "yes" : "NO") + "; short implementation laws " +
               (laws_match ? "match" : "DIFFER") + "; " + soft;
  return out;
}

Result best_response_oracle() {
  std::mt19937_64 rng(8008);
  int compared = 0, mismatched = 0, skipped = 0;
  while (compared < 200) {
    aw::RandomTreeOptions options;
    options.depth = 6;
    const aw::ExplicitTree tree = aw::random_tree(rng, options);
    if (tree.leaf_count() > 64) continue;
    const aw::Valuation v = aw::testing::random_additive(rng, options.n_items, 3);
    std::vector<aw::testing::StrategyValue> values;
    if (!aw::testing::enumerate_strategies(tree, v, 1'000'000, values)) {
      ++skipped;
      continue;
    }
    ++compared;
    const aw::BestResponse br = aw::tree_best_response(tree, v);
    const aw::testing::StrategyValue best = aw::testing::brute_force_best(values);
    if (br.value != best.utility || br.revenue != best.revenue) ++mismatched;
  }
  Result out;
  out.pass = mismatched == 0;
  out.detail = "200 trees, " + std::to_string(mismatched) + " mismatches, " +
               std::to_string(skipped) + " redrawn for exceeding 1e6 strategies";
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Result()>>> criteria = {
      {"outcome equivalence", outcome_equivalence},
      {"exact round oracle", round_oracle},
      {"incentive audits", ic_audits},
      {"two-item example bits", ddt_numbers},
      {"conditional deviation", conditional_cheat},
      {"ex-post hedging", expost},
      {"hard families", hard_families},
      {"backward induction oracle", best_response_oracle},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Result r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    all = all && r.pass;
    std::cout << (r.pass ? "PASS" : "FAIL") << " " << i + 1 << " " << criteria[i].first
              << ": " << r.detail << std::endl;
  }
  return all ? 0 : 1;
}
