#pragma once

#include <optional>
#include <vector>

#include "dkit/matrix.hpp"

namespace dkit {

/// Reduced row echelon form together with its pivot columns.
template <FieldScalar T>
struct RowEchelon {
  Matrix<T> reduced;
  std::vector<std::size_t> pivots;
  std::size_t rank() const { return pivots.size(); }
};

/// Gauss-Jordan reduction. Exact mode takes the first nonzero pivot in each
/// column, which gives the unique RREF. Float mode uses partial pivoting and
/// treats entries at or below rank_rel * max|a| as zero.
template <FieldScalar T>
RowEchelon<T> rref(Matrix<T> a, double rank_rel = 1e-9);

template <FieldScalar T>
std::size_t rank(const Matrix<T>& a, double rank_rel = 1e-9);

/// Canonical kernel basis read off the RREF: one column per free variable,
/// that variable set to one and the other free variables to zero.
template <FieldScalar T>
Matrix<T> nullspace(const Matrix<T>& a, double rank_rel = 1e-9);

/// A particular solution of a x = b (free variables zero), or nullopt when
/// the system is inconsistent. b may have several columns; all must be solvable.
template <FieldScalar T>
std::optional<Matrix<T>> solve_linear(const Matrix<T>& a, const Matrix<T>& b, double rank_rel = 1e-9);

/// Inverse of a square matrix; nullopt when singular.
template <FieldScalar T>
std::optional<Matrix<T>> inverse(const Matrix<T>& a, double rank_rel = 1e-9);

/// Determinant by elimination (partial pivoting in float mode).
template <FieldScalar T>
T determinant(const Matrix<T>& a);

extern template RowEchelon<Rational> rref(Matrix<Rational>, double);
extern template RowEchelon<Complex> rref(Matrix<Complex>, double);
extern template std::size_t rank(const Matrix<Rational>&, double);
extern template std::size_t rank(const Matrix<Complex>&, double);
extern template Matrix<Rational> nullspace(const Matrix<Rational>&, double);
extern template Matrix<Complex> nullspace(const Matrix<Complex>&, double);
extern template std::optional<Matrix<Rational>> solve_linear(const Matrix<Rational>&, const Matrix<Rational>&,
                                                             double);
extern template std::optional<Matrix<Complex>> solve_linear(const Matrix<Complex>&, const Matrix<Complex>&,
                                                            double);
extern template std::optional<Matrix<Rational>> inverse(const Matrix<Rational>&, double);
extern template std::optional<Matrix<Complex>> inverse(const Matrix<Complex>&, double);
extern template Rational determinant(const Matrix<Rational>&);
extern template Complex determinant(const Matrix<Complex>&);

}  // namespace dkit
