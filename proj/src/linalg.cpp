#include "dkit/linalg.hpp"

#include <utility>

namespace dkit {

namespace {

template <FieldScalar T>
double zero_threshold(const Matrix<T>& a, double rank_rel) {
  if constexpr (ScalarTraits<T>::exact) {
    return 0.0;
  } else {
    return rank_rel * a.max_abs();
  }
}

template <FieldScalar T>
void swap_rows(Matrix<T>& a, std::size_t r1, std::size_t r2) {
  if (r1 == r2) return;
  for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(r1, j), a(r2, j));
}

// Reduces the first `limit` columns only; used to spot pivots in augmented systems.
template <FieldScalar T>
RowEchelon<T> reduce(Matrix<T> a, double tol, std::size_t limit) {
  using Traits = ScalarTraits<T>;
  RowEchelon<T> out;
  std::size_t row = 0;
  for (std::size_t col = 0; col < limit && row < a.rows(); ++col) {
    std::size_t pivot = a.rows();
    if constexpr (Traits::exact) {
      for (std::size_t i = row; i < a.rows(); ++i)
        if (!Traits::is_zero(a(i, col))) {
          pivot = i;
          break;
        }
    } else {
      double best = tol;
      for (std::size_t i = row; i < a.rows(); ++i) {
        const double mag = Traits::magnitude(a(i, col));
        if (mag > best) {
          best = mag;
          pivot = i;
        }
      }
    }
    if (pivot == a.rows()) {
      if constexpr (!Traits::exact)
        for (std::size_t i = row; i < a.rows(); ++i) a(i, col) = T(0);
      continue;
    }
    swap_rows(a, row, pivot);
    const T inv = T(1) / a(row, col);
    for (std::size_t j = col; j < a.cols(); ++j) a(row, j) *= inv;
    a(row, col) = T(1);
    for (std::size_t i = 0; i < a.rows(); ++i) {
      if (i == row || Traits::is_zero(a(i, col))) continue;
      const T factor = a(i, col);
      for (std::size_t j = col; j < a.cols(); ++j) a(i, j) -= factor * a(row, j);
      a(i, col) = T(0);
    }
    out.pivots.push_back(col);
    ++row;
  }
  out.reduced = std::move(a);
  return out;
}

}  // namespace

template <FieldScalar T>
RowEchelon<T> rref(Matrix<T> a, double rank_rel) {
  const double tol = zero_threshold(a, rank_rel);
  const std::size_t cols = a.cols();
  return reduce(std::move(a), tol, cols);
}

template <FieldScalar T>
std::size_t rank(const Matrix<T>& a, double rank_rel) {
  return rref(a, rank_rel).rank();
}

template <FieldScalar T>
Matrix<T> nullspace(const Matrix<T>& a, double rank_rel) {
  const auto ech = rref(a, rank_rel);
  std::vector<bool> is_pivot(a.cols(), false);
  for (auto p : ech.pivots) is_pivot[p] = true;
  const std::size_t dim = a.cols() - ech.rank();
  Matrix<T> basis(a.cols(), dim);
  std::size_t k = 0;
  for (std::size_t free = 0; free < a.cols(); ++free) {
    if (is_pivot[free]) continue;
    basis(free, k) = T(1);
    for (std::size_t r = 0; r < ech.pivots.size(); ++r) basis(ech.pivots[r], k) = -ech.reduced(r, free);
    ++k;
  }
  return basis;
}

template <FieldScalar T>
std::optional<Matrix<T>> solve_linear(const Matrix<T>& a, const Matrix<T>& b, double rank_rel) {
  if (a.rows() != b.rows()) throw std::invalid_argument("solve_linear: row mismatch");
  const double tol = zero_threshold(hstack(a, b), rank_rel);
  auto ech = reduce(hstack(a, b), tol, a.cols());
  // Rows below the rank must have vanished on the right-hand side too.
  for (std::size_t r = ech.rank(); r < a.rows(); ++r)
    for (std::size_t j = 0; j < b.cols(); ++j)
      if (!ScalarTraits<T>::is_zero(ech.reduced(r, a.cols() + j), tol)) return std::nullopt;
  Matrix<T> x(a.cols(), b.cols());
  for (std::size_t r = 0; r < ech.rank(); ++r)
    for (std::size_t j = 0; j < b.cols(); ++j) x(ech.pivots[r], j) = ech.reduced(r, a.cols() + j);
  return x;
}

template <FieldScalar T>
std::optional<Matrix<T>> inverse(const Matrix<T>& a, double rank_rel) {
  if (!a.is_square()) throw std::invalid_argument("inverse of non-square matrix");
  const std::size_t n = a.rows();
  const double tol = zero_threshold(a, rank_rel);
  auto ech = reduce(hstack(a, Matrix<T>::identity(n)), tol, n);
  if (ech.rank() != n) return std::nullopt;
  return ech.reduced.block(0, n, n, n);
}

template <FieldScalar T>
T determinant(const Matrix<T>& a) {
  using Traits = ScalarTraits<T>;
  if (!a.is_square()) throw std::invalid_argument("determinant of non-square matrix");
  Matrix<T> m = a;
  const std::size_t n = m.rows();
  T det(1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = n;
    if constexpr (Traits::exact) {
      for (std::size_t i = col; i < n; ++i)
        if (!Traits::is_zero(m(i, col))) {
          pivot = i;
          break;
        }
    } else {
      double best = 0.0;
      for (std::size_t i = col; i < n; ++i) {
        const double mag = Traits::magnitude(m(i, col));
        if (mag > best) {
          best = mag;
          pivot = i;
        }
      }
    }
    if (pivot == n) return T(0);
    if (pivot != col) {
      swap_rows(m, col, pivot);
      det = -det;
    }
    det *= m(col, col);
    const T inv = T(1) / m(col, col);
    for (std::size_t i = col + 1; i < n; ++i) {
      if (Traits::is_zero(m(i, col))) continue;
      const T factor = m(i, col) * inv;
      for (std::size_t j = col; j < n; ++j) m(i, j) -= factor * m(col, j);
    }
  }
  return det;
}

template RowEchelon<Rational> rref(Matrix<Rational>, double);
template RowEchelon<Complex> rref(Matrix<Complex>, double);
template std::size_t rank(const Matrix<Rational>&, double);
template std::size_t rank(const Matrix<Complex>&, double);
template Matrix<Rational> nullspace(const Matrix<Rational>&, double);
template Matrix<Complex> nullspace(const Matrix<Complex>&, double);
template std::optional<Matrix<Rational>> solve_linear(const Matrix<Rational>&, const Matrix<Rational>&, double);
template std::optional<Matrix<Complex>> solve_linear(const Matrix<Complex>&, const Matrix<Complex>&, double);
template std::optional<Matrix<Rational>> inverse(const Matrix<Rational>&, double);
template std::optional<Matrix<Complex>> inverse(const Matrix<Complex>&, double);
template Rational determinant(const Matrix<Rational>&);
template Complex determinant(const Matrix<Complex>&);

}  // namespace dkit
