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

#include "auctionwire/ddt.h"

#include <cmath>

#include "auctionwire/random.h"
#include "auctionwire/stream_compiler.h"

namespace auctionwire {

namespace {

const Rational kFineLow(1, 8);
const Rational kFineWidth = ratio(3, 100);

// Code words per encoding, indexed by region: Z, A or B, W.
struct Code {
  const char* z;
  const char* ab;
  const char* w;
};
constexpr Code kCodes[3] = {
    {"00", "1", "01"},
    {"00", "01", "1"},
    {"1", "00", "01"},
};

const char* code_word(int encoding, DdtRegion region) {
  const Code& c = kCodes[encoding];
  switch (region) {
    case DdtRegion::kZ:
      return c.z;
    case DdtRegion::kW:
      return c.w;
    default:
      return c.ab;
  }
}

// The region named by a complete code word, or nullopt if more bits follow.
std::optional<DdtRegion> decode(int encoding, int signal, int bits) {
  if (bits == 1 && signal == 0) return std::nullopt;
  const std::string word =
      bits == 1 ? "1" : std::string{'0', static_cast<char>('0' + (signal & 1))};
  const Code& c = kCodes[encoding];
  if (word == c.z) return DdtRegion::kZ;
  if (word == c.w) return DdtRegion::kW;
  return DdtRegion::kA;  // A and B share a code word
}

const DdtState& as_ddt(const ProtocolState& state) {
  const auto* s = dynamic_cast<const DdtState*>(&state);
  if (s == nullptr) throw std::invalid_argument("not a DDT protocol state");
  return *s;
}

Bundle both_items() { return Bundle{3}; }
Bundle item(int i) { return Bundle{1} << i; }

Rational cut(double x) {
  return Dyadic::truncate(rational_from_double(x), 20).value();
}

}  // namespace

const char* region_name(DdtRegion region) {
  switch (region) {
    case DdtRegion::kZ:
      return "Z";
    case DdtRegion::kA:
      return "A";
    case DdtRegion::kB:
      return "B";
    case DdtRegion::kW:
      return "W";
  }
  return "?";
}

Rational SyntheticDdtOracle::price() const { return ratio(5535, 10000); }

DdtType SyntheticDdtOracle::classify(double v1, double v2) const {
  if (!(v1 >= 0 && v1 <= 1 && v2 >= 0 && v2 <= 1)) {
    throw std::invalid_argument("values must lie in [0, 1]");
  }
  const double sum = v1 + v2;
  const double diff = v1 - v2;
  DdtType t;
  if (sum < 0.45) {
    t.region = DdtRegion::kZ;
    return t;
  }
  if (sum >= 0.85 && std::abs(diff) < 0.35) {
    t.region = DdtRegion::kW;
    return t;
  }
  t.region = diff >= 0 ? DdtRegion::kA : DdtRegion::kB;
  t.preferred = diff >= 0 ? 0 : 1;
  const double low = std::min(std::min(v1, v2), 1.0 - 1.0 / (1 << 20));
  t.pi = kFineLow + kFineWidth * cut(low);
  t.payment = cut(sum / 2.0) * price();
  t.payment = Dyadic::truncate(t.payment, 20).value();
  return t;
}

void check_ddt_type(const DdtType& t, const Rational& price) {
  if (t.region == DdtRegion::kZ || t.region == DdtRegion::kW) return;
  const int expected = t.region == DdtRegion::kA ? 0 : 1;
  if (t.preferred != expected) {
    throw OracleInconsistent("region A prefers item 0 and region B item 1");
  }
  if (t.pi < kFineLow || t.pi >= kFineLow + kFineWidth) {
    throw OracleInconsistent("pi outside [1/8, 1/8 + 3/100)");
  }
  if (t.payment < 0 || t.payment >= price || t.payment >= 1) {
    throw OracleInconsistent("payment must lie in [0, min(P, 1))");
  }
}

std::unique_ptr<ProtocolState> DdtProtocol::root() const {
  return std::make_unique<DdtState>(shape_);
}

NodeKind DdtState::kind() const {
  switch (phase_) {
    case Phase::kSignal1:
    case Phase::kSignal2:
    case Phase::kItem:
    case Phase::kDigitS:
    case Phase::kDigitQ:
      return NodeKind::kBuyer;
    case Phase::kLeaf:
      return NodeKind::kLeaf;
    default:
      return NodeKind::kChance;
  }
}

ChanceSpec DdtState::chance() const {
  switch (phase_) {
    case Phase::kEncoding:
      return ChanceSpec::weighted(ratio(98, 100));
    case Phase::kRotation:
      return ChanceSpec::weighted(Rational(1, 2));
    case Phase::kRangeLow:
      return ChanceSpec::weighted(shape_->range_low, false);
    case Phase::kRangeFree:
      return ChanceSpec::weighted(shape_->range_free, false);
    case Phase::kRangeFine:
      return ChanceSpec::weighted(shape_->range_fine, false);
    case Phase::kTauS:
      return ChanceSpec::tau(1, round_, false);
    case Phase::kTauQ:
      return ChanceSpec::tau(2, q_digits_, false);
    default:
      throw std::logic_error("not a chance node");
  }
}

void DdtState::after_signal(DdtRegion region) {
  region_ = region;
  phase_ = region == DdtRegion::kA ? Phase::kRangeLow : Phase::kLeaf;
}

void DdtState::next_round() {
  ++round_;
  phase_ = Phase::kDigitS;
}

void DdtState::apply(int bit) {
  switch (phase_) {
    case Phase::kEncoding:
      if (bit == 0) {
        encoding_ = 0;
        phase_ = Phase::kSignal1;
      } else {
        phase_ = Phase::kRotation;
      }
      return;
    case Phase::kRotation:
      encoding_ = bit == 0 ? 1 : 2;
      phase_ = Phase::kSignal1;
      return;
    case Phase::kSignal1:
    case Phase::kSignal2: {
      signal_ = signal_ * 2 + bit;
      ++signal_bits_;
      if (auto region = decode(encoding_, signal_, signal_bits_)) {
        after_signal(*region);
      } else {
        phase_ = Phase::kSignal2;
      }
      return;
    }
    case Phase::kRangeLow:
      if (bit == 0) {
        range_ = Range::kLow;
        phase_ = Phase::kItem;
      } else {
        phase_ = Phase::kRangeFree;
      }
      return;
    case Phase::kRangeFree:
      if (bit == 0) {
        range_ = Range::kFree;
        phase_ = Phase::kLeaf;
      } else {
        phase_ = Phase::kRangeFine;
      }
      return;
    case Phase::kRangeFine:
      range_ = bit == 0 ? Range::kFine : Range::kCoarse;
      phase_ = Phase::kItem;
      return;
    case Phase::kItem:
      preferred_ = bit;
      if (range_ == Range::kCoarse) {
        phase_ = Phase::kLeaf;
      } else {
        next_round();
      }
      return;
    case Phase::kDigitS:
      s_digit_ = bit;
      if (round_ % shape_->cadence == 0) {
        phase_ = Phase::kDigitQ;
      } else if (range_ == Range::kFine) {
        phase_ = Phase::kTauS;
      } else {
        next_round();
      }
      return;
    case Phase::kDigitQ:
      q_digit_ = bit;
      ++q_digits_;
      phase_ = range_ == Range::kFine ? Phase::kTauS : Phase::kTauQ;
      return;
    case Phase::kTauS:
      if (bit != s_digit_) {
        s_status_ = s_digit_ ? 1 : -1;
        phase_ = Phase::kLeaf;
      } else {
        next_round();
      }
      return;
    case Phase::kTauQ:
      if (bit != q_digit_) {
        q_status_ = q_digit_ ? 1 : -1;
        phase_ = Phase::kLeaf;
      } else {
        next_round();
      }
      return;
    case Phase::kLeaf:
      throw std::logic_error("apply at a leaf");
  }
}

Outcome DdtState::outcome() const {
  if (phase_ != Phase::kLeaf) throw std::logic_error("not a leaf");
  Outcome o;
  switch (region_) {
    case DdtRegion::kZ:
      return o;
    case DdtRegion::kW:
      o.alloc_mask = both_items();
      o.payment = shape_->price;
      return o;
    default:
      break;
  }
  switch (range_) {
    case Range::kLow:
      o.alloc_mask = both_items();
      if (q_status_ > 0) o.payment = shape_->big_u;
      break;
    case Range::kFree:
      o.alloc_mask = both_items();
      break;
    case Range::kFine:
      o.alloc_mask = s_status_ > 0 ? both_items() : item(preferred_);
      break;
    default:
      o.alloc_mask = item(preferred_);
      break;
  }
  return o;
}

DdtProtocol build_ddt(const DdtTypeOracle& oracle, const Rational& big_u) {
  if (big_u <= 8 || big_u.get_den() != 1) {
    throw std::invalid_argument("U must be an integer above 8");
  }
  auto shape = std::make_shared<DdtProtocol::Shape>();
  shape->price = oracle.price();
  shape->big_u = big_u;
  mpz_class root;
  mpz_sqrt(root.get_mpz_t(), big_u.get_num_mpz_t());
  if (root * root < big_u.get_num()) root += 1;
  if (!root.fits_slong_p()) throw std::invalid_argument("U too large");
  shape->cadence = root.get_si();
  // Sequential conditionals splitting tau into its four ranges.
  const Rational low = 1 / big_u;
  const Rational free_end = kFineLow;
  shape->range_low = std::make_shared<const Threshold>(low);
  shape->range_free =
      std::make_shared<const Threshold>(Rational((free_end - low) / (1 - low)));
  shape->range_fine = std::make_shared<const Threshold>(
      Rational(kFineWidth / (1 - free_end)));
  return DdtProtocol(std::move(shape));
}

DdtStrategy::DdtStrategy(const DdtProtocol& protocol, const DdtType& type)
    : type_(type) {
  check_ddt_type(type, protocol.shape().price);
  if (type.region == DdtRegion::kA || type.region == DdtRegion::kB) {
    s_ = require_dyadic((type.pi - kFineLow) / kFineWidth, "pi stream");
    q_ = require_dyadic(type.payment, "payment stream");
  }
}

int DdtStrategy::choose(const ProtocolState& state, const History&) {
  const DdtState& s = as_ddt(state);
  switch (s.phase()) {
    case DdtState::Phase::kSignal1:
    case DdtState::Phase::kSignal2: {
      const char* word = code_word(s.encoding(), type_.region);
      return word[s.signal_bits()] == '1' ? 1 : 0;
    }
    case DdtState::Phase::kItem:
      return type_.preferred;
    case DdtState::Phase::kDigitS:
      return s_.bit(s.round());
    case DdtState::Phase::kDigitQ:
      return q_.bit(s.q_digits() + 1);
    default:
      throw std::logic_error("no buyer move here");
  }
}

std::optional<Outcome> DdtStrategy::settled(const ProtocolState& state,
                                            const History&) {
  const DdtState& s = as_ddt(state);
  if (s.phase() != DdtState::Phase::kDigitS) return std::nullopt;
  // Once a finite expansion has been matched, its trailing zeros lose to
  // the threshold almost surely.
  Outcome o;
  if (s.range() == DdtState::Range::kFine && s.round() - 1 >= s_.precision()) {
    o.alloc_mask = item(type_.preferred);
    return o;
  }
  if (s.range() == DdtState::Range::kLow && s.q_digits() >= q_.precision()) {
    o.alloc_mask = both_items();
    return o;
  }
  return std::nullopt;
}

double sample_beta_1_2(std::mt19937_64& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  return 1.0 - std::sqrt(1.0 - u);
}

namespace {

class Accumulator {
 public:
  void add(double x) {
    ++n_;
    sum_ += x;
    sum_sq_ += x * x;
  }
  DdtBitStats stats() const {
    DdtBitStats s;
    s.samples = n_;
    if (n_ == 0) return s;
    s.mean = sum_ / n_;
    const double var = n_ > 1 ? (sum_sq_ - sum_ * s.mean) / (n_ - 1) : 0.0;
    s.half_width = 1.96 * std::sqrt(std::max(var, 0.0) / n_);
    return s;
  }

 private:
  std::int64_t n_ = 0;
  double sum_ = 0;
  double sum_sq_ = 0;
};

}  // namespace

DdtBitReport estimate_ddt_bits(const DdtProtocol& protocol,
                               const DdtTypeOracle& oracle,
                               std::int64_t samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("samples must be positive");
  std::mt19937_64 rng(mix_seed(seed, 0xdd7, 0));
  Accumulator all, z, ab, w, sig_z, sig_ab, sig_w;
  for (std::int64_t i = 0; i < samples; ++i) {
    const double v1 = sample_beta_1_2(rng);
    const double v2 = sample_beta_1_2(rng);
    const DdtType type = oracle.classify(v1, v2);
    DdtStrategy strategy(protocol, type);
    const Transcript t =
        run(protocol, strategy, mix_seed(seed, 0xdd7, static_cast<std::uint64_t>(i) + 1));
    const double bits = static_cast<double>(t.buyer_bits.size());
    const double signal = t.buyer_bits.at(0) == 1 ? 1.0 : 2.0;
    all.add(bits);
    switch (type.region) {
      case DdtRegion::kZ:
        z.add(bits);
        sig_z.add(signal);
        break;
      case DdtRegion::kW:
        w.add(bits);
        sig_w.add(signal);
        break;
      default:
        ab.add(bits);
        sig_ab.add(signal);
        break;
    }
  }
  DdtBitReport r;
  r.samples = samples;
  r.overall = all.stats();
  r.z = z.stats();
  r.a_or_b = ab.stats();
  r.w = w.stats();
  r.signal_z = sig_z.stats();
  r.signal_a_or_b = sig_ab.stats();
  r.signal_w = sig_w.stats();
  return r;
}

}  // namespace auctionwire
