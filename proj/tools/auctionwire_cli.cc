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

// Command-line front end. Exit codes: 0 success, 1 audit failure or runtime
// error, 2 usage or input error.

#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "auctionwire/auditor.h"
#include "auctionwire/ddt.h"
#include "auctionwire/expost_ir.h"
#include "auctionwire/hard_instances.h"
#include "auctionwire/json_io.h"
#include "auctionwire/nonic.h"
#include "auctionwire/random.h"
#include "auctionwire/stream_compiler.h"
#include "auctionwire/symmetric_compiler.h"

namespace aw = auctionwire;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Output {
  std::string path;
  std::string format = "json";
};

void emit(const Output& out, const std::string& text) {
  if (out.path.empty() || out.path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream file(out.path);
  if (!file) throw std::runtime_error("cannot write " + out.path);
  file << text;
}

void emit_json(const Output& out, const aw::Json& j) { emit(out, j.dump(2) + "\n"); }

std::string csv_number(double x) {
  std::ostringstream s;
  s.precision(17);
  s << x;
  return s.str();
}

void require_json(const Output& out, const char* command) {
  if (out.format != "json") {
    throw UsageError(std::string(command) + " only writes JSON");
  }
}

aw::Rational parse_arg(const std::string& text, const char* name) {
  try {
    return aw::parse_rational(text);
  } catch (const std::exception&) {
    throw UsageError(std::string("--") + name + " is not a number: " + text);
  }
}

// A compiled menu with its honest strategies.
struct Compiled {
  std::shared_ptr<const aw::Protocol> protocol;
  std::shared_ptr<const aw::StreamProtocol> stream;
  std::shared_ptr<const aw::NonicProtocol> nonic;
  aw::NormalizedMenu menu;

  std::unique_ptr<aw::BuyerStrategy> honest(std::size_t line) const {
    if (nonic) return std::make_unique<aw::NonicLineStrategy>(line);
    return std::make_unique<aw::LineStrategy>(*stream, line);
  }
};

Compiled compile(const aw::Menu& menu, std::string compiler) {
  Compiled c;
  c.menu = aw::normalize_payments(menu);
  if (compiler == "auto") {
    const bool item_probs = std::all_of(menu.lines().begin(), menu.lines().end(),
                                        [](const aw::MenuLine& l) { return l.has_item_probs(); });
    compiler = item_probs ? "additive" : "bundle";
  }
  if (compiler == "additive") {
    c.stream = std::make_shared<aw::StreamProtocol>(aw::compile_additive(c.menu));
    c.protocol = c.stream;
  } else if (compiler == "bundle") {
    c.stream = std::make_shared<aw::StreamProtocol>(
        aw::compile_bundle(aw::BundleMenu::from_normalized(c.menu)));
    c.protocol = c.stream;
  } else if (compiler == "nonic") {
    c.nonic = std::make_shared<aw::NonicProtocol>(
        aw::compile_nonic(aw::BundleMenu::from_normalized(c.menu)));
    c.protocol = c.nonic;
  } else {
    throw UsageError("--compiler must be auto, additive, bundle or nonic");
  }
  return c;
}

aw::Json exact_line_json(const aw::NormalizedMenu& menu, std::size_t line,
                         const aw::Valuation& v) {
  const auto& l = menu.lines[line];
  const aw::ItemProbs marginals = aw::MenuLine{l.allocation, 0}.marginals(menu.n_items);
  aw::Json probs = aw::Json::array();
  for (const auto& p : marginals) probs.push_back(aw::rational_to_json(p));
  return {{"line", line},
          {"item_probs", probs},
          {"payment", aw::rational_to_json(l.pay_prob * menu.cap)},
          {"utility", aw::rational_to_json(aw::line_utility(v, l, menu.cap))}};
}

// ---- run -------------------------------------------------------------------

struct RunArgs {
  std::string mechanism, tree, prior, compiler = "auto", transcripts, expost_eps;
  std::int64_t trials = 100'000;
  std::uint64_t seed = 0;
  Output out;
};

int cmd_run(const RunArgs& a) {
  if (a.trials < 1) throw UsageError("--trials must be at least 1");
  if (a.mechanism.empty() == a.tree.empty()) {
    throw UsageError("give exactly one of --mechanism and --tree");
  }
  const aw::Prior prior = aw::prior_from_json(aw::read_json_file(a.prior));
  std::optional<Compiled> compiled;
  std::shared_ptr<const aw::ExplicitTree> tree;
  int n_items = 0;
  aw::Rational cap;
  if (!a.mechanism.empty()) {
    compiled = compile(aw::menu_from_json(aw::read_json_file(a.mechanism)), a.compiler);
    n_items = compiled->menu.n_items;
    cap = compiled->menu.cap;
  } else {
    tree = std::make_shared<aw::ExplicitTree>(aw::tree_from_json(aw::read_json_file(a.tree)));
    n_items = prior.types.front().valuation.n_items();
    for (int id = 0; id < tree->size(); ++id) cap = std::max(cap, tree->node(id).payment);
  }
  std::optional<aw::Rational> eps;
  if (!a.expost_eps.empty()) {
    eps = parse_arg(a.expost_eps, "expost-eps");
    if (*eps <= 0) throw UsageError("--expost-eps must be positive");
  }
  std::ofstream transcripts;
  if (!a.transcripts.empty()) {
    transcripts.open(a.transcripts);
    if (!transcripts) throw std::runtime_error("cannot write " + a.transcripts);
  }

  aw::Json types = aw::Json::array();
  std::string csv = "type,line,metric,mean,std_error\n";
  for (std::size_t k = 0; k < prior.types.size(); ++k) {
    const aw::Valuation& v = prior.types[k].valuation;
    std::shared_ptr<const aw::Protocol> protocol =
        compiled ? compiled->protocol : std::shared_ptr<const aw::Protocol>(tree);
    std::unique_ptr<aw::BuyerStrategy> inner;
    aw::Json record;
    std::size_t line = 0;
    if (compiled) {
      line = aw::best_response(v, compiled->menu);
      inner = compiled->honest(line);
      record["exact"] = exact_line_json(compiled->menu, line, v);
    } else {
      aw::BestResponse br = aw::tree_best_response(*tree, v);
      record["exact"] = {{"utility", aw::rational_to_json(br.value)},
                         {"payment", aw::rational_to_json(br.revenue)}};
      inner = std::make_unique<aw::PathStrategy>(std::move(br.strategy));
    }
    std::unique_ptr<aw::BuyerStrategy> strategy;
    if (eps) {
      protocol = std::make_shared<aw::ExpostProtocol>(protocol, *eps, cap == 0 ? 1 : cap);
      strategy = std::make_unique<aw::ExpostStrategy>(*inner, v);
    }
    aw::BuyerStrategy& play = strategy ? *strategy : *inner;
    const std::uint64_t seed = aw::mix_seed(a.seed, 0x7e, k);
    const aw::McStats stats = aw::mc_outcome(*protocol, play, n_items, a.trials, seed);
    record["type"] = k;
    record["stats"] = aw::mc_stats_to_json(stats);
    if (eps || transcripts.is_open()) {
      // Replays the same seeds to report per-run utilities.
      double low = INFINITY, high = -INFINITY;
      for (std::int64_t i = 0; i < a.trials; ++i) {
        const aw::Transcript t = aw::run(
            *protocol, play, aw::mix_seed(seed, aw::kMcStream, static_cast<std::uint64_t>(i)));
        if (transcripts.is_open()) {
          aw::Json j = aw::transcript_to_json(t);
          j["type"] = k;
          transcripts << j.dump() << "\n";
        }
        const double u = aw::to_double(v.value(t.outcome.alloc_mask) - t.outcome.payment);
        low = std::min(low, u);
        high = std::max(high, u);
      }
      if (eps) {
        record["expost"] = {{"eps", aw::rational_to_json(*eps)},
                            {"min_utility", low},
                            {"max_utility", high}};
      }
    }
    for (std::size_t i = 0; i < stats.item_freq.size(); ++i) {
      csv += std::to_string(k) + "," + std::to_string(line) + ",item" + std::to_string(i) +
             "," + csv_number(stats.item_freq[i].mean) + "," +
             csv_number(stats.item_freq[i].std_error) + "\n";
    }
    for (const auto& [name, e] : {std::pair{"payment", stats.payment},
                                  std::pair{"rounds", stats.rounds},
                                  std::pair{"buyer_bits", stats.buyer_bits}}) {
      csv += std::to_string(k) + "," + std::to_string(line) + "," + name + "," +
             csv_number(e.mean) + "," + csv_number(e.std_error) + "\n";
    }
    types.push_back(std::move(record));
  }
  if (a.out.format == "csv") {
    emit(a.out, csv);
  } else {
    emit_json(a.out, {{"seed", a.seed}, {"trials", a.trials}, {"types", types}});
  }
  return kExitOk;
}

// ---- audit-ic --------------------------------------------------------------

struct AuditArgs {
  std::string mechanism, symmenu, hard, prior, compiler = "auto";
  std::string protocol = "optimal";
  int depth = 6;
  std::string tol = "0";
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  Output out;
};

std::string audit_csv(const aw::AuditReport& r) {
  std::string csv = "type,honest_line,honest_utility,best_deviation,gap,deviation\n";
  for (const auto& t : r.types) {
    csv += std::to_string(t.type) + "," + std::to_string(t.honest_line) + "," +
           aw::to_string(t.honest_utility) + "," + aw::to_string(t.best_deviation) + "," +
           aw::to_string(t.gap) + ",\"" + t.deviation + "\"\n";
  }
  return csv;
}

int cmd_audit_ic(const AuditArgs& a) {
  if (a.depth < 0 || a.depth > 12) throw UsageError("--depth must be in [0, 12]");
  const int sources = !a.mechanism.empty() + !a.symmenu.empty() + !a.hard.empty();
  if (sources != 1) throw UsageError("give exactly one of --mechanism, --symmenu, --hard");
  aw::IcOptions options;
  options.depth = a.depth;
  options.tol = parse_arg(a.tol, "tol");
  aw::AuditReport report;
  if (!a.hard.empty()) {
    const auto priors = aw::hard_priors_from_json(aw::read_json_file(a.hard));
    const aw::HardPrior& hp = priors.front();
    if (a.protocol == "optimal") {
      const aw::MessageProtocol p = hp.family == aw::HardFamily::kUnitDemand
                                        ? aw::optimal_protocol_unit_demand(hp)
                                        : aw::optimal_protocol_xos(hp);
      report = aw::ic_audit_messages(p, hp, options);
    } else if (a.protocol == "nontruthful") {
      const aw::NontruthfulUnitDemand p = aw::nontruthful_impl_unit_demand(hp);
      report = aw::ic_audit_tree(p, hp.prior, [&](std::size_t k) {
        return std::make_unique<aw::NontruthfulStrategy>(hp.design.sets[k], hp.code[k]);
      }, options);
    } else {
      throw UsageError("--protocol must be optimal or nontruthful");
    }
  } else {
    if (a.prior.empty()) throw UsageError("--prior is required");
    const aw::Prior prior = aw::prior_from_json(aw::read_json_file(a.prior));
    if (!a.symmenu.empty()) {
      const aw::SymMenu menu = aw::symmenu_from_json(aw::read_json_file(a.symmenu));
      report = aw::ic_audit_symmetric(aw::compile_symmetric(menu), menu, prior, options);
    } else {
      const Compiled c = compile(aw::menu_from_json(aw::read_json_file(a.mechanism)), a.compiler);
      report = c.nonic ? aw::ic_audit_nonic(*c.nonic, prior, options)
                       : aw::ic_audit_menu(*c.stream, c.menu, prior, options);
      if (a.trials > 0) {
        aw::EquivalenceOptions eq;
        eq.trials = a.trials;
        eq.seed = a.seed;
        const aw::AuditReport equiv = aw::equivalence_check(
            *c.protocol, c.menu, prior, [&](std::size_t l) { return c.honest(l); }, eq);
        report.equivalent = equiv.equivalent;
        report.rounds = equiv.rounds;
        report.buyer_bits = equiv.buyer_bits;
        for (std::size_t k = 0; k < report.types.size(); ++k) {
          report.types[k].max_z = equiv.types[k].max_z;
        }
      }
    }
  }
  if (a.out.format == "csv") {
    emit(a.out, audit_csv(report));
  } else {
    emit_json(a.out, aw::audit_report_to_json(report));
  }
  return report.verdict == aw::Verdict::kIc && report.equivalent ? kExitOk : kExitFail;
}

// ---- audit-revenue ---------------------------------------------------------

struct RevenueArgs {
  std::string tree, priors;
  int random_depth = 0;
  std::uint64_t seed = 0;
  std::string threshold = "99/100";
  Output out;
};

int cmd_audit_revenue(const RevenueArgs& a) {
  if (a.priors.empty()) throw UsageError("--priors is required");
  const auto priors = aw::hard_priors_from_json(aw::read_json_file(a.priors));
  std::shared_ptr<const aw::Protocol> protocol;
  aw::Json source;
  if (!a.tree.empty()) {
    if (a.tree == "optimal") {
      const aw::HardPrior& hp = priors.front();
      protocol = std::make_shared<aw::MessageProtocol>(
          hp.family == aw::HardFamily::kUnitDemand ? aw::optimal_protocol_unit_demand(hp)
                                                   : aw::optimal_protocol_xos(hp));
      source = "optimal protocol of the first prior";
    } else {
      protocol = std::make_shared<aw::ExplicitTree>(aw::tree_from_json(aw::read_json_file(a.tree)));
      source = a.tree;
    }
  } else if (a.random_depth > 0) {
    std::mt19937_64 rng(aw::mix_seed(a.seed, 0x7ee, static_cast<std::uint64_t>(a.random_depth)));
    aw::RandomTreeOptions opt;
    opt.depth = a.random_depth;
    opt.n_items = priors.front().n_items;
    protocol = std::make_shared<aw::ExplicitTree>(aw::random_tree(rng, opt));
    source = {{"random_depth", a.random_depth}, {"seed", a.seed}};
  } else {
    throw UsageError("give --tree (file or 'optimal') or --random-depth");
  }
  const aw::Rational threshold = parse_arg(a.threshold, "threshold");
  const aw::RevenueReport report = aw::revenue_audit(*protocol, priors);
  if (a.out.format == "csv") {
    std::string csv = "prior,revenue,welfare,fraction\n";
    for (std::size_t i = 0; i < report.priors.size(); ++i) {
      const auto& p = report.priors[i];
      csv += std::to_string(i) + "," + aw::to_string(p.revenue) + "," +
             aw::to_string(p.welfare) + "," + csv_number(aw::to_double(p.fraction)) + "\n";
    }
    emit(a.out, csv);
  } else {
    aw::Json j = aw::revenue_report_to_json(report);
    j["tree"] = source;
    j["threshold"] = aw::rational_to_json(threshold);
    j["priors_at_threshold"] = report.count_at_least(threshold);
    emit_json(a.out, j);
  }
  return kExitOk;
}

// ---- gen-hard --------------------------------------------------------------

struct GenArgs {
  std::string family = "unit-demand", preset;
  int n = 16, levels = 2, sets = 8, priors = 1;
  std::string eps1 = "1/4", delta1 = "1/2", eps2 = "1/2";
  std::uint64_t seed = 0;
  Output out;
};

int cmd_gen_hard(const GenArgs& a) {
  require_json(a.out, "gen-hard");
  if (a.priors < 1) throw UsageError("--priors must be at least 1");
  std::vector<aw::HardPrior> family;
  if (a.family == "unit-demand") {
    aw::UnitDemandPreset preset;
    if (!a.preset.empty()) {
      preset = aw::unit_demand_preset(a.preset);
    } else {
      preset = {"custom", a.n, parse_arg(a.eps1, "eps1"), parse_arg(a.delta1, "delta1"),
                parse_arg(a.eps2, "eps2"), a.levels, a.sets};
    }
    family = aw::unit_demand_family(preset, a.priors, a.seed);
  } else if (a.family == "xos") {
    aw::XosParams params = aw::xos_preset(a.preset.empty() ? "xos64" : a.preset);
    params.prior_count = a.priors;
    params.seed = a.seed;
    family = aw::build_xos_family(params);
  } else {
    throw UsageError("--family must be unit-demand or xos");
  }
  aw::Json list = aw::Json::array();
  for (const auto& p : family) list.push_back(aw::hard_prior_to_json(p));
  emit_json(a.out, {{"seed", a.seed}, {"priors", list}});
  return kExitOk;
}

// ---- ddt -------------------------------------------------------------------

struct DdtArgs {
  std::int64_t samples = 1'000'000;
  std::string big_u = "1048576";
  std::uint64_t seed = 0;
  Output out;
};

aw::Json ddt_stats_json(const aw::DdtBitStats& s) {
  return {{"samples", s.samples}, {"mean", s.mean}, {"half_width_95", s.half_width}};
}

int cmd_ddt(const DdtArgs& a) {
  if (a.samples < 1) throw UsageError("--samples must be at least 1");
  const aw::SyntheticDdtOracle oracle;
  const aw::DdtProtocol protocol = aw::build_ddt(oracle, parse_arg(a.big_u, "bigU"));
  const aw::DdtBitReport r = aw::estimate_ddt_bits(protocol, oracle, a.samples, a.seed);
  const std::pair<const char*, const aw::DdtBitStats*> rows[] = {
      {"overall", &r.overall},   {"Z", &r.z},
      {"AB", &r.a_or_b},         {"W", &r.w},
      {"signal_Z", &r.signal_z}, {"signal_AB", &r.signal_a_or_b},
      {"signal_W", &r.signal_w}};
  if (a.out.format == "csv") {
    std::string csv = "region,samples,mean,half_width_95\n";
    for (const auto& [name, s] : rows) {
      csv += std::string(name) + "," + std::to_string(s->samples) + "," +
             csv_number(s->mean) + "," + csv_number(s->half_width) + "\n";
    }
    emit(a.out, csv);
  } else {
    aw::Json j = {{"samples", r.samples}, {"seed", a.seed}, {"bigU", a.big_u}};
    for (const auto& [name, s] : rows) j[name] = ddt_stats_json(*s);
    emit_json(a.out, j);
  }
  return kExitOk;
}

// ---- nonic-demo ------------------------------------------------------------

struct NonicArgs {
  std::string value = "4/3";
  int grid_bits = 3;
  int depth = 2;
  Output out;
};

int cmd_nonic_demo(const NonicArgs& a) {
  const aw::Rational v = parse_arg(a.value, "value");
  const aw::CheatReport c = aw::demonstrate_cheat(v);
  auto r = [](const aw::Rational& q) { return aw::rational_to_json(q); };
  aw::Json j = {{"value", r(c.value)},
                {"honest_q", r(c.honest_q)},
                {"honest_pay", r(c.honest_pay)},
                {"deviation_q", r(c.deviation_q)},
                {"deviation_pay", r(c.deviation_pay)},
                {"honest_low", r(c.honest_low)},
                {"deviation_low", r(c.deviation_low)},
                {"honest_high", r(c.honest_high)},
                {"deviation_high", r(c.deviation_high)},
                {"gap_low", r(c.gap_low)},
                {"improves", c.improves}};
  // The same effect on the compiled grid menu.
  if (a.grid_bits < 1 || a.grid_bits > 8) throw UsageError("--grid-bits must be in [1, 8]");
  const aw::NonicProtocol protocol = aw::compile_nonic(aw::quadratic_price_menu(a.grid_bits));
  aw::Prior prior;
  prior.types.push_back({1, aw::Valuation::additive({v})});
  aw::IcOptions options;
  options.depth = a.depth;
  const aw::AuditReport audit = aw::ic_audit_nonic(protocol, prior, options);
  j["grid_audit"] = aw::audit_report_to_json(audit);
  if (a.out.format == "csv") {
    std::string csv = "key,value\n";
    for (const auto& [key, val] : j.items()) {
      if (key == "grid_audit") continue;
      csv += key + "," + (val.is_string() ? val.get<std::string>() : val.dump()) + "\n";
    }
    csv += "grid_verdict," + std::string(aw::verdict_name(audit.verdict)) + "\n";
    emit(a.out, csv);
  } else {
    emit_json(a.out, j);
  }
  return kExitOk;
}

void add_output(CLI::App* cmd, Output& out) {
  cmd->add_option("--out", out.path, "Output file (default stdout)");
  cmd->add_option("--format", out.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interactive auction protocols: compile, run and audit"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Simulate honest play for every prior type");
  run_cmd->add_option("--mechanism", run.mechanism, "Menu JSON");
  run_cmd->add_option("--tree", run.tree, "Explicit tree JSON (best-response play)");
  run_cmd->add_option("--prior", run.prior, "Prior JSON")->required();
  run_cmd->add_option("--compiler", run.compiler, "auto, additive, bundle or nonic");
  run_cmd->add_option("--trials", run.trials, "Runs per type");
  run_cmd->add_option("--seed", run.seed, "Seed")->required();
  run_cmd->add_option("--expost-eps", run.expost_eps, "Wrap with ex-post hedging at eps");
  run_cmd->add_option("--transcripts", run.transcripts, "JSON-lines transcript log");
  add_output(run_cmd, run.out);

  AuditArgs audit;
  auto* audit_cmd = app.add_subcommand("audit-ic", "Incentive audit");
  audit_cmd->add_option("--mechanism", audit.mechanism, "Menu JSON");
  audit_cmd->add_option("--symmenu", audit.symmenu, "Symmetric menu JSON");
  audit_cmd->add_option("--hard", audit.hard, "Hard prior JSON (first prior used)");
  audit_cmd->add_option("--prior", audit.prior, "Prior JSON");
  audit_cmd->add_option("--compiler", audit.compiler, "auto, additive, bundle or nonic");
  audit_cmd->add_option("--protocol", audit.protocol, "optimal or nontruthful (with --hard)");
  audit_cmd->add_option("--depth", audit.depth, "Prefix deviation depth");
  audit_cmd->add_option("--tol", audit.tol, "Exact gap tolerance");
  audit_cmd->add_option("--trials", audit.trials, "Also run an outcome check with this many runs");
  audit_cmd->add_option("--seed", audit.seed, "Seed for the outcome check");
  add_output(audit_cmd, audit.out);

  RevenueArgs revenue;
  auto* rev_cmd = app.add_subcommand("audit-revenue", "Revenue of a tree on hard priors");
  rev_cmd->add_option("--tree", revenue.tree, "Tree JSON, or 'optimal'");
  rev_cmd->add_option("--random-depth", revenue.random_depth, "Audit a random tree");
  rev_cmd->add_option("--priors", revenue.priors, "Output of gen-hard");
  rev_cmd->add_option("--seed", revenue.seed, "Seed for the random tree");
  rev_cmd->add_option("--threshold", revenue.threshold, "Fraction counted as near optimal");
  add_output(rev_cmd, revenue.out);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-hard", "Generate a hard prior family");
  gen_cmd->add_option("--family", gen.family, "unit-demand or xos");
  gen_cmd->add_option("--preset", gen.preset, "ud16, ud32, ud64 or xos64");
  gen_cmd->add_option("--n", gen.n, "Items");
  gen_cmd->add_option("--eps1", gen.eps1, "Design density");
  gen_cmd->add_option("--delta1", gen.delta1, "Design intersection slack");
  gen_cmd->add_option("--eps2", gen.eps2, "Value ratio between levels");
  gen_cmd->add_option("--levels", gen.levels, "Value levels");
  gen_cmd->add_option("--sets", gen.sets, "Design sets");
  gen_cmd->add_option("--priors", gen.priors, "Priors in the family");
  gen_cmd->add_option("--seed", gen.seed, "Seed")->required();
  add_output(gen_cmd, gen.out);

  DdtArgs ddt;
  auto* ddt_cmd = app.add_subcommand("ddt", "Communication of the two-item example");
  ddt_cmd->add_option("--samples", ddt.samples, "Sampled types");
  ddt_cmd->add_option("--bigU", ddt.big_u, "Integer U");
  ddt_cmd->add_option("--seed", ddt.seed, "Seed")->required();
  add_output(ddt_cmd, ddt.out);

  NonicArgs nonic;
  auto* nonic_cmd = app.add_subcommand("nonic-demo", "Profitable deviation in the announce-last protocol");
  nonic_cmd->add_option("--value", nonic.value, "Buyer value");
  nonic_cmd->add_option("--grid-bits", nonic.grid_bits, "Menu grid resolution");
  nonic_cmd->add_option("--depth", nonic.depth, "Trigger prefix depth for the grid audit");
  add_output(nonic_cmd, nonic.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*audit_cmd) return cmd_audit_ic(audit);
    if (*rev_cmd) return cmd_audit_revenue(revenue);
    if (*gen_cmd) return cmd_gen_hard(gen);
    if (*ddt_cmd) return cmd_ddt(ddt);
    if (*nonic_cmd) return cmd_nonic_demo(nonic);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
  return kExitUsage;
}
