#pragma once

#include <vector>

#include "dkit/errors.hpp"
#include "dkit/matrix.hpp"

namespace dkit {

/// The matrix pencil sF - G. Both matrices are square with equal size.
template <FieldScalar T>
class Pencil {
 public:
  Pencil(Matrix<T> f, Matrix<T> g) : f_(std::move(f)), g_(std::move(g)) {
    if (!f_.is_square() || !g_.is_square() || f_.rows() != g_.rows())
      throw std::invalid_argument("pencil needs square F and G of equal size, got " + f_.shape() + " and " +
                                  g_.shape());
    if (f_.rows() == 0) throw std::invalid_argument("pencil of size zero");
  }

  const Matrix<T>& F() const { return f_; }
  const Matrix<T>& G() const { return g_; }
  std::size_t n() const { return f_.rows(); }

  /// s F - G at a given s.
  Matrix<T> at(const T& s) const { return s * f_ - g_; }

 private:
  Matrix<T> f_;
  Matrix<T> g_;
};

/// det(sF - G) in ascending powers of s, with leading zeros trimmed. The
/// identically zero determinant is stored as an empty coefficient list.
template <FieldScalar T>
struct CharPoly {
  std::vector<T> coefficients;
  std::size_t n = 0;
  std::size_t p = 0;  // number of finite eigenvalues with multiplicity (degree)
  std::size_t q = 0;  // n - p

  bool identically_zero() const { return coefficients.empty(); }
  T operator()(const T& s) const;
};

template <FieldScalar T>
struct EigenvalueMultiplicity {
  T value;
  std::size_t multiplicity = 0;
};

/// Canonical eigenvalue order: (numerator, denominator) lexicographic in exact
/// mode, (real, imag) in float mode.
bool eigenvalue_less(const Rational& a, const Rational& b);
bool eigenvalue_less(const Complex& a, const Complex& b);

/// Determinant sampled at s = 0, 1, ..., n and interpolated.
template <FieldScalar T>
CharPoly<T> char_poly(const Pencil<T>& pencil, const Tolerances& tol = {});

/// Nonzero characteristic polynomial. Float mode decides zero by comparing
/// every sampled determinant against its Hadamard bound.
template <FieldScalar T>
bool is_regular(const Pencil<T>& pencil, const Tolerances& tol = {});

/// Regularity of a raw matrix pair: false unless F and G are square and of equal size.
template <FieldScalar T>
bool is_regular(const Matrix<T>& f, const Matrix<T>& g, const Tolerances& tol = {}) {
  if (!f.is_square() || !g.is_square() || f.rows() != g.rows() || f.rows() == 0) return false;
  return is_regular(Pencil<T>(f, g), tol);
}

/// Finite spectrum with algebraic multiplicities, in canonical order. Exact
/// mode throws UnresolvableSpectrum if a factor without rational roots remains.
template <FieldScalar T>
std::vector<EigenvalueMultiplicity<T>> finite_eigenvalues(const CharPoly<T>& cp, const Tolerances& tol = {});

extern template struct CharPoly<Rational>;
extern template struct CharPoly<Complex>;
extern template CharPoly<Rational> char_poly(const Pencil<Rational>&, const Tolerances&);
extern template CharPoly<Complex> char_poly(const Pencil<Complex>&, const Tolerances&);
extern template bool is_regular(const Pencil<Rational>&, const Tolerances&);
extern template bool is_regular(const Pencil<Complex>&, const Tolerances&);
extern template std::vector<EigenvalueMultiplicity<Rational>> finite_eigenvalues(const CharPoly<Rational>&,
                                                                                 const Tolerances&);
extern template std::vector<EigenvalueMultiplicity<Complex>> finite_eigenvalues(const CharPoly<Complex>&,
                                                                                const Tolerances&);

}  // namespace dkit
