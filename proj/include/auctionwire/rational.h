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

#ifndef AUCTIONWIRE_RATIONAL_H_
#define AUCTIONWIRE_RATIONAL_H_

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace auctionwire {

// Exact arithmetic for probabilities, payments and utilities.
using Rational = mpq_class;

// Parses "p/q", "p", or a decimal literal such as "0.5535" (taken as the
// exact decimal fraction). Throws std::invalid_argument on malformed input.
// num/den in lowest terms. The two-argument mpq_class constructor does not
// reduce, and GMP arithmetic requires reduced operands.
inline Rational ratio(long num, long den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

Rational parse_rational(std::string_view text);

// Exact conversion; every finite double is a dyadic rational.
Rational rational_from_double(double value);

std::string to_string(const Rational& q);
double to_double(const Rational& q);

bool is_dyadic(const Rational& q);

// A probability in [0, 1] whose binary expansion is finite (at most 64
// fractional bits), or exactly 1, streamed with the all-ones expansion.
//
// Canonical expansion: terminating (suffix of zeros) for p < 1, all ones for
// p = 1. Bits are 1-indexed: bit(1) is the first bit after the binary point.
class Dyadic {
 public:
  Dyadic() = default;

  static Dyadic zero() { return Dyadic(); }
  static Dyadic one();
  // num / 2^log2_den, requires num <= 2^log2_den and log2_den <= 64.
  static Dyadic from_fraction(std::uint64_t num, int log2_den);
  // Exact conversion; nullopt when q is outside [0, 1], not dyadic, or needs
  // more than 64 fractional bits.
  static std::optional<Dyadic> from_rational(const Rational& q);
  // Floor of q to `bits` fractional bits (q clamped into [0, 1]).
  static Dyadic truncate(const Rational& q, int bits);

  int bit(std::int64_t index) const {
    if (one_) return 1;
    if (index > 64 || index < 1) return 0;
    return static_cast<int>((frac_ >> (64 - index)) & 1u);
  }

  bool is_one() const { return one_; }
  std::uint64_t fraction() const { return frac_; }
  // Number of fractional bits after which the expansion is constant.
  int precision() const { return precision_; }

  Rational value() const;
  double to_double() const;

  friend bool operator==(const Dyadic& a, const Dyadic& b) {
    return a.one_ == b.one_ && a.frac_ == b.frac_;
  }
  friend bool operator<(const Dyadic& a, const Dyadic& b) {
    if (a.one_ != b.one_) return b.one_;
    return a.frac_ < b.frac_;
  }

 private:
  std::uint64_t frac_ = 0;  // value * 2^64 for values below 1
  bool one_ = false;
  int precision_ = 0;
};

// Smallest k with 2^k >= n (ceil_log2(1) == 0).
int ceil_log2(std::uint64_t n);

}  // namespace auctionwire

#endif  // AUCTIONWIRE_RATIONAL_H_
