#include "momentlab/bigreal.hpp"

#include <algorithm>
#include <cstdio>
#include <vector>

#include "momentlab/error.hpp"

namespace momentlab {
namespace {

mpfr_prec_t checked_precision(long bits) {
  if (bits < MPFR_PREC_MIN || bits > (1L << 24)) {
    throw InvalidArgument("BigReal: precision out of range: " + std::to_string(bits));
  }
  return static_cast<mpfr_prec_t>(bits);
}

long max_precision(const BigReal& a, const BigReal& b) { return std::max(a.precision(), b.precision()); }

}  // namespace

BigReal::BigReal(long precision_bits) {
  mpfr_init2(value_, checked_precision(precision_bits));
  mpfr_set_zero(value_, 1);
}

BigReal::BigReal(double value, long precision_bits) {
  mpfr_init2(value_, checked_precision(precision_bits));
  mpfr_set_d(value_, value, MPFR_RNDN);
}

BigReal::BigReal(const BigInt& value, long precision_bits) {
  mpfr_init2(value_, checked_precision(precision_bits));
  mpfr_set_z(value_, value.get_mpz_t(), MPFR_RNDN);
}

BigReal::BigReal(const BigRational& value, long precision_bits) {
  mpfr_init2(value_, checked_precision(precision_bits));
  mpfr_set_q(value_, value.get_mpq_t(), MPFR_RNDN);
}

BigReal BigReal::from_string(const std::string& decimal, long precision_bits) {
  BigReal r(precision_bits);
  if (mpfr_set_str(r.value_, decimal.c_str(), 10, MPFR_RNDN) != 0) {
    throw InvalidArgument("BigReal: cannot parse '" + decimal + "'");
  }
  return r;
}

BigReal::BigReal(const BigReal& other) {
  mpfr_init2(value_, mpfr_get_prec(other.value_));
  mpfr_set(value_, other.value_, MPFR_RNDN);
}

BigReal::BigReal(BigReal&& other) noexcept {
  // Steal the limbs and leave `other` as a valid 2-bit zero.
  mpfr_init2(value_, MPFR_PREC_MIN);
  mpfr_swap(value_, other.value_);
}

BigReal& BigReal::operator=(const BigReal& other) {
  if (this != &other) {
    mpfr_set_prec(value_, mpfr_get_prec(other.value_));
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }
  return *this;
}

BigReal& BigReal::operator=(BigReal&& other) noexcept {
  if (this != &other) mpfr_swap(value_, other.value_);
  return *this;
}

BigReal::~BigReal() { mpfr_clear(value_); }

void BigReal::set_precision(long precision_bits) {
  mpfr_prec_round(value_, checked_precision(precision_bits), MPFR_RNDN);
}

BigReal BigReal::with_precision(long precision_bits) const {
  BigReal r(precision_bits);
  mpfr_set(r.value_, value_, MPFR_RNDN);
  return r;
}

std::string BigReal::to_string(int digits) const {
  digits = std::max(digits, 1);
  if (mpfr_zero_p(value_)) return "0";
  if (!mpfr_number_p(value_)) return mpfr_nan_p(value_) ? "nan" : (mpfr_sgn(value_) > 0 ? "inf" : "-inf");
  int needed = mpfr_snprintf(nullptr, 0, "%.*Re", digits - 1, value_);
  std::vector<char> buf(static_cast<std::size_t>(needed) + 1);
  mpfr_snprintf(buf.data(), buf.size(), "%.*Re", digits - 1, value_);
  return std::string(buf.data());
}

std::string BigReal::to_string() const { return to_string(static_cast<int>(precision() / 3)); }

BigReal& BigReal::operator+=(const BigReal& rhs) {
  const long p = max_precision(*this, rhs);
  if (p != precision()) mpfr_prec_round(value_, p, MPFR_RNDN);
  mpfr_add(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}

BigReal& BigReal::operator-=(const BigReal& rhs) {
  const long p = max_precision(*this, rhs);
  if (p != precision()) mpfr_prec_round(value_, p, MPFR_RNDN);
  mpfr_sub(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}

BigReal& BigReal::operator*=(const BigReal& rhs) {
  const long p = max_precision(*this, rhs);
  if (p != precision()) mpfr_prec_round(value_, p, MPFR_RNDN);
  mpfr_mul(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}

BigReal& BigReal::operator/=(const BigReal& rhs) {
  const long p = max_precision(*this, rhs);
  if (p != precision()) mpfr_prec_round(value_, p, MPFR_RNDN);
  mpfr_div(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}

BigReal& BigReal::operator*=(long rhs) {
  mpfr_mul_si(value_, value_, rhs, MPFR_RNDN);
  return *this;
}

BigReal& BigReal::operator/=(long rhs) {
  mpfr_div_si(value_, value_, rhs, MPFR_RNDN);
  return *this;
}

BigReal BigReal::operator-() const {
  BigReal r(*this);
  mpfr_neg(r.value_, r.value_, MPFR_RNDN);
  return r;
}

std::partial_ordering operator<=>(const BigReal& a, const BigReal& b) {
  if (mpfr_unordered_p(a.value_, b.value_)) return std::partial_ordering::unordered;
  const int c = mpfr_cmp(a.value_, b.value_);
  if (c < 0) return std::partial_ordering::less;
  if (c > 0) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

BigReal BigReal::pi(long precision_bits) {
  BigReal r(precision_bits);
  mpfr_const_pi(r.value_, MPFR_RNDN);
  return r;
}

BigReal abs(const BigReal& x) {
  BigReal r(x.precision());
  mpfr_abs(r.get(), x.get(), MPFR_RNDN);
  return r;
}

BigReal sqrt(const BigReal& x) {
  BigReal r(x.precision());
  mpfr_sqrt(r.get(), x.get(), MPFR_RNDN);
  return r;
}

BigReal cos(const BigReal& x) {
  BigReal r(x.precision());
  mpfr_cos(r.get(), x.get(), MPFR_RNDN);
  return r;
}

BigReal sin(const BigReal& x) {
  BigReal r(x.precision());
  mpfr_sin(r.get(), x.get(), MPFR_RNDN);
  return r;
}

BigReal exp(const BigReal& x) {
  BigReal r(x.precision());
  mpfr_exp(r.get(), x.get(), MPFR_RNDN);
  return r;
}

BigReal log(const BigReal& x) {
  BigReal r(x.precision());
  mpfr_log(r.get(), x.get(), MPFR_RNDN);
  return r;
}

BigReal pow(const BigReal& base, const BigReal& exponent) {
  BigReal r(std::max(base.precision(), exponent.precision()));
  mpfr_pow(r.get(), base.get(), exponent.get(), MPFR_RNDN);
  return r;
}

BigReal pow(const BigReal& base, long exponent) {
  BigReal r(base.precision());
  mpfr_pow_si(r.get(), base.get(), exponent, MPFR_RNDN);
  return r;
}

BigReal pow_rational(const BigReal& base, long num, long den) {
  if (den <= 0) throw InvalidArgument("pow_rational: denominator must be positive");
  // num/den is exact in binary only for power-of-two denominators; carry the
  // quotient at high precision otherwise.
  BigReal e(base.precision() + 64);
  mpfr_set_si(e.get(), num, MPFR_RNDN);
  mpfr_div_si(e.get(), e.get(), den, MPFR_RNDN);
  BigReal r(base.precision());
  mpfr_pow(r.get(), base.get(), e.get(), MPFR_RNDN);
  return r;
}

Accumulator::Accumulator(long precision_bits, long guard_bits)
    : precision_(precision_bits), sum_(precision_bits + guard_bits), scratch_(precision_bits + guard_bits) {}

void Accumulator::add(const BigReal& term) { mpfr_add(sum_.get(), sum_.get(), term.get(), MPFR_RNDN); }

void Accumulator::add_product(const BigReal& a, const BigReal& b) {
  mpfr_mul(scratch_.get(), a.get(), b.get(), MPFR_RNDN);
  mpfr_add(sum_.get(), sum_.get(), scratch_.get(), MPFR_RNDN);
}

void Accumulator::add(const Accumulator& other) { mpfr_add(sum_.get(), sum_.get(), other.sum_.get(), MPFR_RNDN); }

BigComplex& BigComplex::operator+=(const BigComplex& rhs) {
  re += rhs.re;
  im += rhs.im;
  return *this;
}

BigComplex& BigComplex::operator*=(const BigComplex& rhs) {
  BigReal r = re * rhs.re - im * rhs.im;
  BigReal i = re * rhs.im + im * rhs.re;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

BigComplex& BigComplex::operator*=(const BigReal& rhs) {
  re *= rhs;
  im *= rhs;
  return *this;
}

BigReal BigComplex::norm_squared() const { return re * re + im * im; }

}  // namespace momentlab
