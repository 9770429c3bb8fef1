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

#include "auctionwire/json_io.h"

#include <fstream>
#include <functional>
#include <sstream>

namespace auctionwire {

namespace {

// Builds a DOM like nlohmann's own parser, except that floats are stored as
// their literal text so they can be read back exactly.
class ExactSax {
 public:
  using number_integer_t = Json::number_integer_t;
  using number_unsigned_t = Json::number_unsigned_t;
  using number_float_t = Json::number_float_t;
  using string_t = Json::string_t;
  using binary_t = Json::binary_t;

  explicit ExactSax(Json& root) : root_(root) {}

  bool null() { return put(nullptr); }
  bool boolean(bool b) { return put(b); }
  bool number_integer(number_integer_t v) { return put(v); }
  bool number_unsigned(number_unsigned_t v) { return put(v); }
  bool number_float(number_float_t, const string_t& text) { return put(text); }
  bool string(string_t& s) { return put(s); }
  bool binary(binary_t&) { return put(nullptr); }
  bool start_object(std::size_t) {
    stack_.push_back(put_container(Json::object()));
    return true;
  }
  bool key(string_t& k) {
    key_ = k;
    return true;
  }
  bool end_object() {
    stack_.pop_back();
    return true;
  }
  bool start_array(std::size_t) {
    stack_.push_back(put_container(Json::array()));
    return true;
  }
  bool end_array() {
    stack_.pop_back();
    return true;
  }
  bool parse_error(std::size_t position, const std::string&,
                   const nlohmann::detail::exception& e) {
    throw JsonFormatError("JSON parse error at byte " + std::to_string(position) +
                          ": " + e.what());
  }

 private:
  Json* put_container(Json value) {
    if (stack_.empty()) {
      root_ = std::move(value);
      return &root_;
    }
    Json& top = *stack_.back();
    if (top.is_array()) {
      top.push_back(std::move(value));
      return &top.back();
    }
    top[key_] = std::move(value);
    return &top[key_];
  }
  bool put(Json value) {
    put_container(std::move(value));
    return true;
  }

  Json& root_;
  std::vector<Json*> stack_;
  std::string key_;
};

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) {
    throw JsonFormatError(std::string("missing field '") + name + "'");
  }
  return j.at(name);
}

int int_field(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_number_integer()) {
    throw JsonFormatError(std::string("field '") + name + "' must be an integer");
  }
  return v.get<int>();
}

Bundle bundle_from_json(const Json& j) {
  if (j.is_number_unsigned() || j.is_number_integer()) return j.get<Bundle>();
  if (j.is_string()) return std::stoull(j.get<std::string>());
  throw JsonFormatError("bundle must be an integer bitmask");
}

std::vector<Rational> rationals(const Json& j) {
  if (!j.is_array()) throw JsonFormatError("expected an array of numbers");
  std::vector<Rational> out;
  for (const auto& x : j) out.push_back(rational_from_json(x));
  return out;
}

Json rationals_to_json(const std::vector<Rational>& qs) {
  Json out = Json::array();
  for (const auto& q : qs) out.push_back(rational_to_json(q));
  return out;
}

Json design_to_json(const WeakDesign& d) {
  Json sets = Json::array();
  for (Bundle s : d.sets) sets.push_back(s);
  return {{"n", d.n},
          {"eps", rational_to_json(d.eps)},
          {"delta", rational_to_json(d.delta)},
          {"set_size", d.set_size},
          {"intersection_bound", d.intersection_bound},
          {"sets", sets}};
}

WeakDesign design_from_json(const Json& j) {
  WeakDesign d;
  d.n = int_field(j, "n");
  d.eps = rational_from_json(field(j, "eps"));
  d.delta = rational_from_json(field(j, "delta"));
  d.set_size = int_field(j, "set_size");
  d.intersection_bound = int_field(j, "intersection_bound");
  for (const auto& s : field(j, "sets")) d.sets.push_back(bundle_from_json(s));
  return d;
}

}  // namespace

Json parse_json(std::string_view text) {
  Json root;
  ExactSax sax(root);
  Json::sax_parse(text.begin(), text.end(), &sax);
  return root;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_json(buffer.str());
}

Rational rational_from_json(const Json& j) {
  try {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_unsigned()) return Rational(mpz_class(std::to_string(j.get<std::uint64_t>())));
    if (j.is_number_integer()) return Rational(mpz_class(std::to_string(j.get<std::int64_t>())));
    if (j.is_number_float()) return rational_from_double(j.get<double>());
  } catch (const JsonFormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw JsonFormatError(std::string("bad number: ") + e.what());
  }
  throw JsonFormatError("expected a number");
}

Json rational_to_json(const Rational& q) { return to_string(q); }

Menu menu_from_json(const Json& j) {
  const int n = int_field(j, "n_items");
  const Rational cap = rational_from_json(field(j, "U"));
  std::vector<MenuLine> lines;
  for (const auto& l : field(j, "lines")) {
    MenuLine line;
    line.payment = rational_from_json(field(l, "payment"));
    if (l.contains("item_probs")) {
      line.allocation = rationals(l.at("item_probs"));
    } else if (l.contains("bundle_dist")) {
      BundleDist dist;
      for (const auto& [mask, p] : l.at("bundle_dist").items()) {
        dist[std::stoull(mask)] += rational_from_json(p);
      }
      line.allocation = std::move(dist);
    } else {
      throw JsonFormatError("menu line needs item_probs or bundle_dist");
    }
    lines.push_back(std::move(line));
  }
  return Menu(n, cap, std::move(lines));
}

Json menu_to_json(const Menu& menu) {
  Json lines = Json::array();
  for (const auto& line : menu.lines()) {
    Json l;
    if (line.has_item_probs()) {
      l["item_probs"] = rationals_to_json(line.item_probs());
    } else {
      Json dist = Json::object();
      for (const auto& [mask, p] : line.bundle_dist()) {
        dist[std::to_string(mask)] = rational_to_json(p);
      }
      l["bundle_dist"] = dist;
    }
    l["payment"] = rational_to_json(line.payment);
    lines.push_back(std::move(l));
  }
  return {{"n_items", menu.n_items()}, {"U", rational_to_json(menu.cap())}, {"lines", lines}};
}

Valuation valuation_from_json(const Json& j) {
  const std::string cls = field(j, "class").get<std::string>();
  if (cls == "additive") return Valuation::additive(rationals(field(j, "values")));
  if (cls == "unit_demand") return Valuation::unit_demand(rationals(field(j, "values")));
  if (cls == "xos") {
    std::vector<std::vector<Rational>> clauses;
    for (const auto& c : field(j, "clauses")) clauses.push_back(rationals(c));
    return Valuation::xos(std::move(clauses));
  }
  throw JsonFormatError("unknown valuation class '" + cls + "'");
}

Json valuation_to_json(const Valuation& v) {
  switch (v.value_class()) {
    case ValuationClass::kAdditive:
      return {{"class", "additive"}, {"values", rationals_to_json(v.item_values())}};
    case ValuationClass::kUnitDemand:
      return {{"class", "unit_demand"}, {"values", rationals_to_json(v.item_values())}};
    case ValuationClass::kXos: {
      Json clauses = Json::array();
      for (const auto& c : v.clauses()) clauses.push_back(rationals_to_json(c));
      return {{"class", "xos"}, {"clauses", clauses}};
    }
  }
  throw std::logic_error("unknown valuation class");
}

Prior prior_from_json(const Json& j) {
  Prior prior;
  if (j.is_array()) {
    for (const auto& v : j) {
      prior.types.push_back({Rational(1, static_cast<long>(j.size())), valuation_from_json(v)});
    }
  } else {
    for (const auto& t : field(j, "types")) {
      prior.types.push_back(
          {rational_from_json(field(t, "weight")), valuation_from_json(field(t, "valuation"))});
    }
  }
  if (prior.types.empty()) throw JsonFormatError("prior has no types");
  return prior;
}

Json prior_to_json(const Prior& prior) {
  Json types = Json::array();
  for (const auto& t : prior.types) {
    types.push_back({{"weight", rational_to_json(t.weight)},
                     {"valuation", valuation_to_json(t.valuation)}});
  }
  return {{"types", types}};
}

SymMenu symmenu_from_json(const Json& j) {
  const int n = int_field(j, "n_items");
  const Rational delta = rational_from_json(field(j, "delta"));
  std::vector<SymMenuLine> lines;
  for (const auto& l : field(j, "lines")) {
    SymMenuLine line;
    line.payment = rational_from_json(field(l, "payment"));
    for (const auto& part : field(l, "partition")) {
      line.partition.push_back(part.get<std::vector<int>>());
    }
    for (const auto& h : field(l, "histograms")) {
      std::map<int, int> histogram;
      for (const auto& [g, count] : h.items()) histogram[std::stoi(g)] = count.get<int>();
      line.histograms.push_back(std::move(histogram));
    }
    lines.push_back(std::move(line));
  }
  return SymMenu(n, delta, std::move(lines));
}

ExplicitTree tree_from_json(const Json& j) {
  std::vector<TreeNode> nodes;
  std::function<int(const Json&, int)> build = [&](const Json& raw, int depth) -> int {
    if (depth > 64) throw JsonFormatError("tree deeper than 64 levels");
    const Json& n = raw.is_object() && raw.contains("node") ? raw.at("node") : raw;
    const std::string kind = field(n, "kind").get<std::string>();
    const int id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    TreeNode node;
    if (kind == "leaf") {
      node.kind = NodeKind::kLeaf;
      node.alloc_mask = n.contains("alloc_mask") ? bundle_from_json(n.at("alloc_mask")) : 0;
      node.payment = n.contains("payment") ? rational_from_json(n.at("payment")) : Rational(0);
    } else if (kind == "B" || kind == "C") {
      node.kind = kind == "B" ? NodeKind::kBuyer : NodeKind::kChance;
      for (const auto& c : field(n, "children")) node.children.push_back(build(c, depth + 1));
      if (node.kind == NodeKind::kChance) node.weights = rationals(field(n, "weights"));
    } else {
      throw JsonFormatError("node kind must be B, C or leaf");
    }
    nodes[id] = std::move(node);
    return id;
  };
  build(j, 0);
  try {
    return ExplicitTree(std::move(nodes), 0);
  } catch (const std::invalid_argument& e) {
    throw JsonFormatError(std::string("invalid tree: ") + e.what());
  }
}

Json tree_to_json(const ExplicitTree& tree) {
  std::function<Json(int)> emit = [&](int id) -> Json {
    const TreeNode& n = tree.node(id);
    Json out;
    if (n.kind == NodeKind::kLeaf) {
      out = {{"kind", "leaf"}, {"alloc_mask", n.alloc_mask},
             {"payment", rational_to_json(n.payment)}};
    } else {
      Json children = Json::array();
      for (int c : n.children) children.push_back(emit(c));
      out = {{"kind", n.kind == NodeKind::kBuyer ? "B" : "C"}, {"children", children}};
      if (n.kind == NodeKind::kChance) out["weights"] = rationals_to_json(n.weights);
    }
    return {{"node", out}};
  };
  return emit(tree.root_id());
}

Json transcript_to_json(const Transcript& t) {
  return {{"seed", t.seed},
          {"rounds", t.rounds},
          {"buyer_bits", t.buyer_bits.size()},
          {"alloc_mask", t.outcome.alloc_mask},
          {"payment", rational_to_json(t.outcome.payment)}};
}

Json hard_prior_to_json(const HardPrior& p) {
  Json out = prior_to_json(p.prior);
  out["family"] = p.family == HardFamily::kUnitDemand ? "unit-demand" : "xos";
  out["n_items"] = p.n_items;
  out["design"] = design_to_json(p.design);
  if (p.family == HardFamily::kXos) {
    out["clauses"] = design_to_json(p.clauses);
    out["gamma"] = rational_to_json(p.gamma);
  }
  out["code"] = p.code;
  out["set_values"] = rationals_to_json(p.set_values);
  out["level_values"] = rationals_to_json(p.level_values);
  out["welfare"] = rational_to_json(p.welfare());
  return out;
}

HardPrior hard_prior_from_json(const Json& j) {
  HardPrior p;
  const std::string family = field(j, "family").get<std::string>();
  if (family == "unit-demand") {
    p.family = HardFamily::kUnitDemand;
  } else if (family == "xos") {
    p.family = HardFamily::kXos;
    p.clauses = design_from_json(field(j, "clauses"));
    p.gamma = rational_from_json(field(j, "gamma"));
  } else {
    throw JsonFormatError("unknown family '" + family + "'");
  }
  p.n_items = int_field(j, "n_items");
  p.design = design_from_json(field(j, "design"));
  p.code = field(j, "code").get<CodeVector>();
  p.set_values = rationals(field(j, "set_values"));
  p.level_values = rationals(field(j, "level_values"));
  p.prior = prior_from_json(j);
  return p;
}

std::vector<HardPrior> hard_priors_from_json(const Json& j) {
  std::vector<HardPrior> out;
  const Json& list = j.is_object() && j.contains("priors") ? j.at("priors") : j;
  if (list.is_array()) {
    for (const auto& p : list) out.push_back(hard_prior_from_json(p));
  } else {
    out.push_back(hard_prior_from_json(list));
  }
  return out;
}

Json estimate_to_json(const Estimate& e) {
  return {{"mean", e.mean}, {"std_error", e.std_error}, {"ci95", {e.low(), e.high()}}};
}

Json mc_stats_to_json(const McStats& s) {
  Json items = Json::array();
  for (const auto& e : s.item_freq) items.push_back(estimate_to_json(e));
  Json bundles = Json::object();
  for (const auto& [mask, e] : s.bundle_freq) bundles[std::to_string(mask)] = estimate_to_json(e);
  return {{"trials", s.trials},
          {"seed", s.seed},
          {"item_freq", items},
          {"bundle_freq", bundles},
          {"payment", estimate_to_json(s.payment)},
          {"rounds", estimate_to_json(s.rounds)},
          {"buyer_bits", estimate_to_json(s.buyer_bits)},
          {"flagged", estimate_to_json(s.flagged)}};
}

Json audit_report_to_json(const AuditReport& r) {
  Json types = Json::array();
  for (const auto& t : r.types) {
    types.push_back({{"type", t.type},
                     {"honest_line", t.honest_line},
                     {"honest_utility", rational_to_json(t.honest_utility)},
                     {"best_deviation", rational_to_json(t.best_deviation)},
                     {"gap", rational_to_json(t.gap)},
                     {"gap_approx", to_double(t.gap)},
                     {"deviation", t.deviation},
                     {"deviations", t.deviations},
                     {"max_z", t.max_z},
                     {"max_exact_delta", rational_to_json(t.max_exact_delta)},
                     {"inconclusive", t.inconclusive}});
  }
  return {{"verdict", verdict_name(r.verdict)},
          {"equivalent", r.equivalent},
          {"deviation_space", r.deviation_space},
          {"deviations", r.deviations()},
          {"max_gap", rational_to_json(r.max_gap())},
          {"rounds", estimate_to_json(r.rounds)},
          {"buyer_bits", estimate_to_json(r.buyer_bits)},
          {"types", types}};
}

Json revenue_report_to_json(const RevenueReport& r) {
  Json priors = Json::array();
  for (const auto& p : r.priors) {
    priors.push_back({{"revenue", rational_to_json(p.revenue)},
                      {"welfare", rational_to_json(p.welfare)},
                      {"fraction", rational_to_json(p.fraction)},
                      {"fraction_approx", to_double(p.fraction)}});
  }
  return {{"priors", priors},
          {"min_fraction", rational_to_json(r.min_fraction)},
          {"mean_fraction", rational_to_json(r.mean_fraction)},
          {"min_fraction_approx", to_double(r.min_fraction)},
          {"mean_fraction_approx", to_double(r.mean_fraction)}};
}

}  // namespace auctionwire
