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

// A low-communication protocol for two items whose optimal menu splits types
// into four regions: Z (nothing), W (both items at a fixed price P), and
// A / B (the preferred item for sure, the other with probability
// pi in [1/8, 1/8 + 3/100), and a payment below P).
//
// The buyer first names the region with a randomly rotated prefix code.
// For A and B a hidden uniform threshold tau decides what else is needed:
// nothing when 1/U <= tau < 1/8, the preferred item alone when
// tau >= 1/8 + 3/100, and otherwise a digit stream of
// s = (pi - 1/8) / (3/100) with a digit of q*U every ceil(sqrt U) rounds,
// where q < 1/U is the probability of paying U.

#ifndef AUCTIONWIRE_DDT_H_
#define AUCTIONWIRE_DDT_H_

#include <memory>
#include <random>

#include "auctionwire/protocol.h"

namespace auctionwire {

class OracleInconsistent : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class DdtRegion { kZ, kA, kB, kW };
const char* region_name(DdtRegion region);

struct DdtType {
  DdtRegion region = DdtRegion::kZ;
  int preferred = 0;  // item always received in A / B
  Rational pi;        // probability of the other item
  Rational payment;   // expected payment in A / B, below P
};

// Maps a valuation pair to its place in the optimal menu.
class DdtTypeOracle {
 public:
  virtual ~DdtTypeOracle() = default;
  virtual DdtType classify(double v1, double v2) const = 0;
  virtual Rational price() const = 0;  // P
};

// Fixed thresholds on v1 + v2 and v1 - v2; pi is affine in the lower value
// and the payment in the sum. Values are cut to 20 binary digits.
class SyntheticDdtOracle final : public DdtTypeOracle {
 public:
  DdtType classify(double v1, double v2) const override;
  Rational price() const override;
};

// Throws OracleInconsistent unless `t` respects the region invariants.
void check_ddt_type(const DdtType& t, const Rational& price);

class DdtProtocol final : public Protocol {
 public:
  struct Shape {
    Rational price;
    Rational big_u;
    std::int64_t cadence = 1;  // ceil(sqrt U)
    std::shared_ptr<const Threshold> range_low;    // tau < 1/U
    std::shared_ptr<const Threshold> range_free;   // then tau < 1/8
    std::shared_ptr<const Threshold> range_fine;   // then tau < 1/8 + 3/100
  };

  explicit DdtProtocol(std::shared_ptr<const Shape> shape)
      : shape_(std::move(shape)) {}
  std::unique_ptr<ProtocolState> root() const override;
  const Shape& shape() const { return *shape_; }

 private:
  std::shared_ptr<const Shape> shape_;
};

class DdtState final : public ProtocolState {
 public:
  enum class Phase {
    kEncoding,   // visible: main code (98/100) or a rotation
    kRotation,   // visible: which rotation
    kSignal1,
    kSignal2,
    kRangeLow,   // hidden
    kRangeFree,  // hidden
    kRangeFine,  // hidden
    kItem,
    kDigitS,
    kDigitQ,
    kTauS,       // hidden
    kTauQ,       // hidden
    kLeaf,
  };
  enum class Range { kNone, kLow, kFree, kFine, kCoarse };

  explicit DdtState(std::shared_ptr<const DdtProtocol::Shape> shape)
      : shape_(std::move(shape)) {}

  NodeKind kind() const override;
  ChanceSpec chance() const override;
  void apply(int bit) override;
  Outcome outcome() const override;
  std::unique_ptr<ProtocolState> clone() const override {
    return std::make_unique<DdtState>(*this);
  }

  Phase phase() const { return phase_; }
  // 0: main code, 1 and 2: the rotations.
  int encoding() const { return encoding_; }
  int signal_bits() const { return signal_bits_; }
  std::int64_t round() const { return round_; }
  std::int64_t q_digits() const { return q_digits_; }
  Range range() const { return range_; }
  // Comparison of the streamed values against tau, +1 above, -1 below.
  int s_status() const { return s_status_; }
  int q_status() const { return q_status_; }
  const DdtProtocol::Shape& shape() const { return *shape_; }

 private:
  void after_signal(DdtRegion region);
  void next_round();

  std::shared_ptr<const DdtProtocol::Shape> shape_;
  Phase phase_ = Phase::kEncoding;
  int encoding_ = 0;
  int signal_ = 0;
  int signal_bits_ = 0;
  DdtRegion region_ = DdtRegion::kZ;
  Range range_ = Range::kNone;
  int preferred_ = 0;
  std::int64_t round_ = 0;
  std::int64_t q_digits_ = 0;
  int s_digit_ = 0;
  int q_digit_ = 0;
  int s_status_ = 0;
  int q_status_ = 0;
};

DdtProtocol build_ddt(const DdtTypeOracle& oracle,
                      const Rational& big_u = Rational(1 << 20));

// Names the type's region under the drawn code and streams s and q*U.
class DdtStrategy final : public BuyerStrategy {
 public:
  DdtStrategy(const DdtProtocol& protocol, const DdtType& type);
  int choose(const ProtocolState& state, const History& history) override;
  std::optional<Outcome> settled(const ProtocolState& state,
                                 const History& history) override;

  const Dyadic& s_digits() const { return s_; }
  const Dyadic& q_digits() const { return q_; }

 private:
  DdtType type_;
  Dyadic s_;
  Dyadic q_;  // q * U
};

// Inverse-CDF draw from the density 2(1 - x) on [0, 1].
double sample_beta_1_2(std::mt19937_64& rng);

struct DdtBitStats {
  std::int64_t samples = 0;
  double mean = 0;
  double half_width = 0;  // 95% normal interval
};

struct DdtBitReport {
  std::int64_t samples = 0;
  DdtBitStats overall;
  DdtBitStats z, a_or_b, w;
  // Per region, bits spent naming the region.
  DdtBitStats signal_z, signal_a_or_b, signal_w;
};

DdtBitReport estimate_ddt_bits(const DdtProtocol& protocol,
                               const DdtTypeOracle& oracle,
                               std::int64_t samples, std::uint64_t seed);

}  // namespace auctionwire

#endif  // AUCTIONWIRE_DDT_H_
