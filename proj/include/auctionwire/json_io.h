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

// JSON formats. Numbers are read exactly: a decimal literal such as 0.5535
// becomes 5535/10000, and strings of the form "p/q" are accepted wherever a
// number is. Rationals are written as "p/q" strings. Bundles are integer
// bitmasks with item 0 in the least significant bit.

#ifndef AUCTIONWIRE_JSON_IO_H_
#define AUCTIONWIRE_JSON_IO_H_

#include <string>
#include <string_view>
#include <vector>

#include "auctionwire/auditor.h"
#include "auctionwire/explicit_tree.h"
#include "auctionwire/hard_instances.h"
#include "auctionwire/menu.h"
#include "auctionwire/protocol.h"
#include "auctionwire/symmetric_compiler.h"
#include "json.hpp"

namespace auctionwire {

using Json = nlohmann::json;

class JsonFormatError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Parses text keeping every floating-point literal as its source string.
Json parse_json(std::string_view text);
Json read_json_file(const std::string& path);

Rational rational_from_json(const Json& j);
Json rational_to_json(const Rational& q);

// {"n_items", "U", "lines": [{"item_probs": [...] | "bundle_dist":
// {"mask": p}, "payment"}]}
Menu menu_from_json(const Json& j);
Json menu_to_json(const Menu& menu);

// {"class": "additive" | "unit_demand" | "xos", "values": [...] |
// "clauses": [[...]]}
Valuation valuation_from_json(const Json& j);
Json valuation_to_json(const Valuation& v);

// {"types": [{"weight", "valuation"}]}, or a bare array of valuations with
// uniform weights.
Prior prior_from_json(const Json& j);
Json prior_to_json(const Prior& prior);

// {"n_items", "delta", "lines": [{"payment", "partition": [[items]],
// "histograms": [{"grid_index": count}]}]}
SymMenu symmenu_from_json(const Json& j);

// {"node": {"kind": "B" | "C" | "leaf", "children": [...], "weights":
// [...], "alloc_mask", "payment"}}; children are node objects, with or
// without the "node" wrapper.
ExplicitTree tree_from_json(const Json& j);
Json tree_to_json(const ExplicitTree& tree);

// One JSON-lines record: {"seed", "rounds", "buyer_bits", "alloc_mask",
// "payment"}.
Json transcript_to_json(const Transcript& t);

// The prior schema plus the generating family's design and codes.
Json hard_prior_to_json(const HardPrior& prior);
HardPrior hard_prior_from_json(const Json& j);
std::vector<HardPrior> hard_priors_from_json(const Json& j);

Json estimate_to_json(const Estimate& e);
Json mc_stats_to_json(const McStats& stats);
Json audit_report_to_json(const AuditReport& report);
Json revenue_report_to_json(const RevenueReport& report);

}  // namespace auctionwire

#endif  // AUCTIONWIRE_JSON_IO_H_
