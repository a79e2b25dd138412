#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace dkit {

/// Arbitrary precision rational; GMP keeps results of arithmetic canonical.
using Rational = mpq_class;
using Complex = std::complex<double>;

enum class Mode { Exact, Float };

std::string_view to_string(Mode mode);

/// Numerical thresholds for float mode. Exact mode ignores all of them.
struct Tolerances {
  /// Relative threshold below which a characteristic polynomial coefficient counts as zero.
  double zero_rel = 1e-9;
  /// Roots closer than this are merged into one eigenvalue.
  double cluster_radius = 1e-7;
  /// Relative singular threshold for rank decisions, scaled by the largest entry.
  double rank_rel = 1e-9;
  /// Max-abs entry at or below which a causality witness counts as zero.
  double causality = 1e-8;
};

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static constexpr Mode mode = Mode::Exact;

  static Rational from_int(long v) { return Rational(v); }
  static double magnitude(const Rational& x) { return std::fabs(x.get_d()); }
  static bool is_zero(const Rational& x, double /*abs_tol*/ = 0.0) { return sgn(x) == 0; }
  static bool equal(const Rational& a, const Rational& b, double /*abs_tol*/ = 0.0) {
    return a == b;
  }
};

template <>
struct ScalarTraits<Complex> {
  static constexpr bool exact = false;
  static constexpr Mode mode = Mode::Float;

  static Complex from_int(long v) { return Complex(static_cast<double>(v), 0.0); }
  static double magnitude(const Complex& x) { return std::abs(x); }
  static bool is_zero(const Complex& x, double abs_tol = 0.0) { return std::abs(x) <= abs_tol; }
  static bool equal(const Complex& a, const Complex& b, double abs_tol = 0.0) {
    return std::abs(a - b) <= abs_tol;
  }
};

template <class T>
concept FieldScalar = requires { ScalarTraits<T>::exact; };

/// Parses "7", "-3/4", "0.125", "1e-3". Throws std::invalid_argument on
/// malformed text or a zero denominator. The result is in lowest terms.
Rational parse_rational(std::string_view text);

/// "num/den", or just "num" when the denominator is one.
std::string format(const Rational& x);

/// Shortest round-trip decimal of each part; "re" when the imaginary part is
/// zero, otherwise "re+imi" / "re-imi".
std::string format(const Complex& x);

std::string format_double(double x);

/// Exact conversion of a finite double to a rational (no rounding).
Rational rational_from_double(double x);

/// Rational from the shortest round-trip decimal spelling of x, so 0.1 maps to 1/10.
Rational rational_from_shortest_decimal(double x);

inline Complex to_complex(const Rational& x) { return Complex(x.get_d(), 0.0); }

}  // namespace dkit
