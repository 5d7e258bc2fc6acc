#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <compare>
#include <string>

namespace momentlab {

using BigInt = mpz_class;
using BigRational = mpq_class;

inline constexpr long kDefaultPrecisionBits = 128;

/// Arbitrary-precision binary floating value with an explicit precision.
///
/// Thin value-semantic wrapper around an MPFR variable. Every arithmetic
/// operation rounds to nearest; binary operators produce a result carrying the
/// larger of the two operand precisions.
class BigReal {
 public:
  explicit BigReal(long precision_bits = kDefaultPrecisionBits);
  BigReal(double value, long precision_bits);
  BigReal(const BigInt& value, long precision_bits);
  BigReal(const BigRational& value, long precision_bits);
  static BigReal from_string(const std::string& decimal, long precision_bits);

  BigReal(const BigReal& other);
  BigReal(BigReal&& other) noexcept;
  BigReal& operator=(const BigReal& other);
  BigReal& operator=(BigReal&& other) noexcept;
  ~BigReal();

  long precision() const { return static_cast<long>(mpfr_get_prec(value_)); }
  // Rounds the stored value to a new precision in place.
  void set_precision(long precision_bits);
  BigReal with_precision(long precision_bits) const;

  mpfr_ptr get() { return value_; }
  mpfr_srcptr get() const { return value_; }

  double to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }
  bool is_zero() const { return mpfr_zero_p(value_) != 0; }
  int sign() const { return mpfr_sgn(value_); }
  bool is_finite() const { return mpfr_number_p(value_) != 0; }

  // Scientific notation with `digits` significant digits, round to nearest.
  std::string to_string(int digits) const;
  // Digits matching the precision: precision_bits / 3.
  std::string to_string() const;

  BigReal& operator+=(const BigReal& rhs);
  BigReal& operator-=(const BigReal& rhs);
  BigReal& operator*=(const BigReal& rhs);
  BigReal& operator/=(const BigReal& rhs);
  BigReal& operator*=(long rhs);
  BigReal& operator/=(long rhs);
  BigReal operator-() const;

  friend BigReal operator+(BigReal lhs, const BigReal& rhs) { return lhs += rhs; }
  friend BigReal operator-(BigReal lhs, const BigReal& rhs) { return lhs -= rhs; }
  friend BigReal operator*(BigReal lhs, const BigReal& rhs) { return lhs *= rhs; }
  friend BigReal operator/(BigReal lhs, const BigReal& rhs) { return lhs /= rhs; }
  friend BigReal operator*(BigReal lhs, long rhs) { return lhs *= rhs; }
  friend BigReal operator/(BigReal lhs, long rhs) { return lhs /= rhs; }

  friend bool operator==(const BigReal& a, const BigReal& b) { return mpfr_equal_p(a.value_, b.value_) != 0; }
  friend std::partial_ordering operator<=>(const BigReal& a, const BigReal& b);

  static BigReal pi(long precision_bits);

 private:
  mpfr_t value_;
};

BigReal abs(const BigReal& x);
BigReal sqrt(const BigReal& x);
BigReal cos(const BigReal& x);
BigReal sin(const BigReal& x);
BigReal exp(const BigReal& x);
BigReal log(const BigReal& x);
BigReal pow(const BigReal& base, const BigReal& exponent);
BigReal pow(const BigReal& base, long exponent);
// base^(num/den) with the exponent held exactly.
BigReal pow_rational(const BigReal& base, long num, long den);

/// Running sum carried at extra precision; the result is rounded once.
class Accumulator {
 public:
  explicit Accumulator(long precision_bits, long guard_bits = 64);
  void add(const BigReal& term);
  void add_product(const BigReal& a, const BigReal& b);
  void add(const Accumulator& other);
  const BigReal& raw() const { return sum_; }
  BigReal result() const { return sum_.with_precision(precision_); }

 private:
  long precision_;
  BigReal sum_;
  BigReal scratch_;
};

/// Complex number over BigReal; only what the phasor sums need.
struct BigComplex {
  BigReal re;
  BigReal im;

  explicit BigComplex(long precision_bits) : re(precision_bits), im(precision_bits) {}
  BigComplex(BigReal r, BigReal i) : re(std::move(r)), im(std::move(i)) {}

  BigComplex& operator+=(const BigComplex& rhs);
  BigComplex& operator*=(const BigComplex& rhs);
  BigComplex& operator*=(const BigReal& rhs);
  friend BigComplex operator*(BigComplex lhs, const BigComplex& rhs) { return lhs *= rhs; }
  BigReal norm_squared() const;
  BigComplex conj() const { return {re, -im}; }
};

}  // namespace momentlab
