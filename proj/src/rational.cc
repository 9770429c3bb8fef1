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

#include "auctionwire/rational.h"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace auctionwire {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

Rational parse_decimal(std::string_view text) {
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  std::string_view mantissa = text;
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = text.substr(0, e);
    std::string exp_text(text.substr(e + 1));
    std::size_t used = 0;
    exponent = std::stol(exp_text, &used);
    if (used != exp_text.size()) throw std::invalid_argument("bad exponent");
  }
  std::string digits;
  long scale = 0;
  auto dot = mantissa.find('.');
  if (dot == std::string_view::npos) {
    digits = std::string(mantissa);
  } else {
    digits = std::string(mantissa.substr(0, dot)) +
             std::string(mantissa.substr(dot + 1));
    scale = static_cast<long>(mantissa.size() - dot - 1);
  }
  if (!all_digits(digits)) {
    throw std::invalid_argument("not a number: " + std::string(text));
  }
  mpz_class num(digits, 10);
  mpz_class den = 1;
  long shift = exponent - scale;
  mpz_class ten = 10;
  mpz_class power;
  mpz_pow_ui(power.get_mpz_t(), ten.get_mpz_t(),
             static_cast<unsigned long>(std::labs(shift)));
  if (shift >= 0) {
    num *= power;
  } else {
    den = power;
  }
  Rational q(num, den);
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
    text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
    text.remove_suffix(1);
  if (text.empty()) throw std::invalid_argument("empty rational");
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal(text);
  Rational num = parse_decimal(text.substr(0, slash));
  Rational den = parse_decimal(text.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("zero denominator");
  return num / den;
}

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("non-finite value");
  return Rational(value);
}

std::string to_string(const Rational& q) { return q.get_str(); }

double to_double(const Rational& q) { return q.get_d(); }

bool is_dyadic(const Rational& q) {
  const mpz_class& den = q.get_den();
  return mpz_popcount(den.get_mpz_t()) == 1;
}

int ceil_log2(std::uint64_t n) {
  int k = 0;
  while (k < 64 && (std::uint64_t{1} << k) < n) ++k;
  return k;
}

Dyadic Dyadic::one() {
  Dyadic d;
  d.one_ = true;
  return d;
}

Dyadic Dyadic::from_fraction(std::uint64_t num, int log2_den) {
  if (log2_den < 0 || log2_den > 64) {
    throw std::invalid_argument("dyadic denominator out of range");
  }
  if (log2_den < 64 && num > (std::uint64_t{1} << log2_den)) {
    throw std::invalid_argument("dyadic value above one");
  }
  if (log2_den < 64 && num == (std::uint64_t{1} << log2_den)) return one();
  Dyadic d;
  d.frac_ = log2_den == 0 ? 0 : num << (64 - log2_den);
  d.precision_ = 0;
  if (d.frac_ != 0) d.precision_ = 64 - __builtin_ctzll(d.frac_);
  return d;
}

std::optional<Dyadic> Dyadic::from_rational(const Rational& q) {
  if (q < 0 || q > 1 || !is_dyadic(q)) return std::nullopt;
  if (q == 1) return one();
  std::size_t log2_den = mpz_sizeinbase(q.get_den().get_mpz_t(), 2) - 1;
  if (log2_den > 64) return std::nullopt;
  mpz_class num = q.get_num();
  return from_fraction(mpz_get_ui(num.get_mpz_t()), static_cast<int>(log2_den));
}

Dyadic Dyadic::truncate(const Rational& q, int bits) {
  if (bits < 0 || bits > 64) throw std::invalid_argument("truncation depth");
  if (q <= 0) return zero();
  if (q >= 1) return one();
  mpz_class scaled = q.get_num();
  scaled <<= bits;
  scaled /= q.get_den();
  return from_fraction(mpz_get_ui(scaled.get_mpz_t()), bits);
}

Rational Dyadic::value() const {
  if (one_) return Rational(1);
  mpz_class num;
  mpz_import(num.get_mpz_t(), 1, 1, sizeof(frac_), 0, 0, &frac_);
  mpz_class den = 1;
  den <<= 64;
  Rational q(num, den);
  q.canonicalize();
  return q;
}

double Dyadic::to_double() const {
  if (one_) return 1.0;
  return std::ldexp(static_cast<double>(frac_), -64);
}

}  // namespace auctionwire
