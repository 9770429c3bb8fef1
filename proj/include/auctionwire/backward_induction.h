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

#ifndef AUCTIONWIRE_BACKWARD_INDUCTION_H_
#define AUCTIONWIRE_BACKWARD_INDUCTION_H_

#include <map>
#include <string>

#include "auctionwire/protocol.h"

namespace auctionwire {

class SearchBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Keys buyer decisions by the full public path (every move's digit, in
// order, as a '0'/'1' string).
std::string path_key(const History& history);

// Plays recorded decisions by path, bit 0 elsewhere.
class PathStrategy final : public BuyerStrategy {
 public:
  explicit PathStrategy(std::map<std::string, int> choices = {})
      : choices_(std::move(choices)) {}
  int choose(const ProtocolState& state, const History& history) override;
  const std::map<std::string, int>& choices() const { return choices_; }

 private:
  std::map<std::string, int> choices_;
};

struct BestResponse {
  Rational value;    // buyer's expected utility
  Rational revenue;  // expected payment under the chosen strategy
  PathStrategy strategy;
};

struct BestResponseOptions {
  std::int64_t node_budget = 20'000'000;
};

// Backward induction over a protocol whose chance moves are all visible and
// whose every path ends (or settles) within the node budget. At a buyer
// node the higher utility wins, then the higher expected payment, then 0.
BestResponse tree_best_response(const Protocol& protocol, const Valuation& v,
                                const BestResponseOptions& options = {});

// The same search started from an interior state.
BestResponse best_response_from(const ProtocolState& state, const Valuation& v,
                                const History& history, const KnownTau& known,
                                const BestResponseOptions& options = {});

}  // namespace auctionwire

#endif  // AUCTIONWIRE_BACKWARD_INDUCTION_H_
