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

// Verification harness: seeded Monte Carlo estimates, comparison against
// exact menu lines, incentive audits over enumerated deviation sets, and
// revenue audits of explicit trees on hard priors.

#ifndef AUCTIONWIRE_AUDITOR_H_
#define AUCTIONWIRE_AUDITOR_H_

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "auctionwire/backward_induction.h"
#include "auctionwire/explicit_tree.h"
#include "auctionwire/hard_instances.h"
#include "auctionwire/menu.h"
#include "auctionwire/nonic.h"
#include "auctionwire/protocol.h"
#include "auctionwire/stream_compiler.h"
#include "auctionwire/symmetric_compiler.h"

namespace auctionwire {

// Sample mean with its standard error.
struct Estimate {
  double mean = 0;
  double std_error = 0;

  // 95% normal interval.
  double low() const { return mean - 1.96 * std_error; }
  double high() const { return mean + 1.96 * std_error; }
};

struct McStats {
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<Estimate> item_freq;
  std::map<Bundle, Estimate> bundle_freq;
  Estimate payment;
  Estimate rounds;
  Estimate buyer_bits;
  Estimate flagged;
};

// Run i uses seed mix_seed(seed, kMcStream, i), so stats depend only on
// (protocol, strategy, trials, seed).
inline constexpr std::uint64_t kMcStream = 0x3c;

McStats mc_outcome(const Protocol& protocol, BuyerStrategy& strategy,
                   int n_items, std::int64_t trials, std::uint64_t seed,
                   const RunOptions& options = {});

enum class Verdict { kIc, kNonIc, kInconclusive };
const char* verdict_name(Verdict v);

struct TypeAudit {
  std::size_t type = 0;
  std::size_t honest_line = 0;
  Rational honest_utility;
  Rational best_deviation;  // utility of the best audited deviation
  Rational gap;             // best_deviation - honest_utility
  std::string deviation;    // description of the best deviation
  std::int64_t deviations = 0;
  // Outcome comparison against the reference line, in standard errors
  // (Monte Carlo) or as an exact difference.
  double max_z = 0;
  Rational max_exact_delta;
  bool inconclusive = false;
};

struct AuditReport {
  Verdict verdict = Verdict::kIc;
  // Equivalence checks: whether every compared frequency is within tolerance.
  bool equivalent = true;
  std::string deviation_space;
  std::vector<TypeAudit> types;
  Estimate rounds;
  Estimate buyer_bits;

  std::int64_t deviations() const;
  Rational max_gap() const;
};

// Honest play of menu line `line`.
using LineStrategyFactory =
    std::function<std::unique_ptr<BuyerStrategy>(std::size_t line)>;

struct EquivalenceOptions {
  std::int64_t trials = 100'000;
  std::uint64_t seed = 1;
  double z_tol = 4;  // per-frequency tolerance in standard errors
  RunOptions run;
};

// For each type, runs the honest strategy for its best menu line and
// compares item frequencies, bundle frequencies (bundle_dist lines) and mean
// payment against the line. Reference standard errors come from the exact
// line; an exact 0 or 1 probability must be matched exactly.
AuditReport equivalence_check(const Protocol& protocol, const NormalizedMenu& menu,
                              const Prior& prior, const LineStrategyFactory& honest,
                              const EquivalenceOptions& options = {});

struct IcOptions {
  int depth = 6;  // unforced buyer decisions covered by prefix deviations
  Rational tol = 0;
  EvalOptions eval;
  BestResponseOptions search;
};

Rational line_utility(const Valuation& v, const NormalizedLine& line,
                      const Rational& cap);

// Deviations: every other menu line (closed form), plus every strategy that
// makes its first `depth` unforced decisions freely and then follows any
// line still consistent, integrated exactly over the threshold digits.
AuditReport ic_audit_menu(const StreamProtocol& protocol, const NormalizedMenu& menu,
                          const Prior& prior, const IcOptions& options = {});

// Exact backward induction over the whole compiled tree.
AuditReport ic_audit_symmetric(const SymmetricProtocol& protocol, const SymMenu& menu,
                               const Prior& prior, const IcOptions& options = {});

// Deviations: follow the honest line until the revealed threshold prefix
// equals a trigger of length <= depth, then follow another line.
AuditReport ic_audit_nonic(const NonicProtocol& protocol, const Prior& prior,
                           const IcOptions& options = {});

// Every listed message of a message protocol against the honest one.
AuditReport ic_audit_messages(const MessageProtocol& protocol, const HardPrior& prior,
                              const IcOptions& options = {});

// Exact backward induction against a per-type honest strategy.
using TypeStrategyFactory =
    std::function<std::unique_ptr<BuyerStrategy>(std::size_t type)>;
AuditReport ic_audit_tree(const Protocol& protocol, const Prior& prior,
                          const TypeStrategyFactory& honest,
                          const IcOptions& options = {});

struct PriorRevenue {
  Rational revenue;
  Rational welfare;
  Rational fraction;
};

struct RevenueReport {
  std::vector<PriorRevenue> priors;
  Rational min_fraction;
  Rational mean_fraction;

  int count_at_least(const Rational& fraction) const;
};

// Revenue of `protocol` under every type's best response, per prior.
RevenueReport revenue_audit(const Protocol& protocol,
                            const std::vector<HardPrior>& priors,
                            const BestResponseOptions& options = {});

}  // namespace auctionwire

#endif  // AUCTIONWIRE_AUDITOR_H_
