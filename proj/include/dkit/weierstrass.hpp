#pragma once

#include <vector>

#include "dkit/matrix.hpp"
#include "dkit/pencil.hpp"

namespace dkit {

template <FieldScalar T>
struct JordanBlockSpec {
  T eigenvalue;
  std::size_t size = 1;
  friend bool operator==(const JordanBlockSpec&, const JordanBlockSpec&) = default;
};

struct NilpotentBlockSpec {
  std::size_t size = 1;
  friend bool operator==(const NilpotentBlockSpec&, const NilpotentBlockSpec&) = default;
};

template <FieldScalar T>
Matrix<T> assemble_jordan(const std::vector<JordanBlockSpec<T>>& blocks);
template <FieldScalar T>
Matrix<T> assemble_nilpotent(const std::vector<NilpotentBlockSpec>& blocks);

/// P F Q = I_p (+) H_q and P G Q = J_p (+) I_q.
///
/// The first p columns of Q are Jordan chains of the finite eigenvalues,
/// stored bottom (eigenvector) first; the last q columns are chains of the
/// infinite eigenvalue in the same order. Finite blocks are sorted by
/// eigenvalue and then by descending size; nilpotent blocks by descending size.
template <FieldScalar T>
struct WeierstrassDecomposition {
  Matrix<T> P;
  Matrix<T> Q;
  std::vector<JordanBlockSpec<T>> jordan_blocks;
  std::vector<NilpotentBlockSpec> nilpotent_blocks;
  std::size_t p = 0;
  std::size_t q = 0;
  /// Nilpotency index of H_q, the largest nilpotent block (0 when q = 0).
  std::size_t q_star = 0;

  std::size_t n() const { return p + q; }
  Matrix<T> Qp() const { return Q.leading_cols(p); }
  Matrix<T> Qq() const { return Q.trailing_cols(q); }
  Matrix<T> Jp() const { return assemble_jordan(jordan_blocks); }
  Matrix<T> Hq() const { return assemble_nilpotent<T>(nilpotent_blocks); }
  /// I_p (+) H_q
  Matrix<T> Fw() const { return direct_sum(Matrix<T>::identity(p), Hq()); }
  /// J_p (+) I_q
  Matrix<T> Gw() const { return direct_sum(Jp(), Matrix<T>::identity(q)); }
};

/// J_{p_1}(a_1) (+) ... (+) J_{p_v}(a_v): eigenvalue on the diagonal, ones on the superdiagonal.
template <FieldScalar T>
Matrix<T> assemble_jordan(const std::vector<JordanBlockSpec<T>>& blocks) {
  std::size_t total = 0;
  for (const auto& b : blocks) total += b.size;
  Matrix<T> j(total, total);
  std::size_t offset = 0;
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < b.size; ++i) {
      j(offset + i, offset + i) = b.eigenvalue;
      if (i + 1 < b.size) j(offset + i, offset + i + 1) = T(1);
    }
    offset += b.size;
  }
  return j;
}

/// H_{q_1} (+) ... (+) H_{q_s}: ones on the superdiagonal of each block.
template <FieldScalar T>
Matrix<T> assemble_nilpotent(const std::vector<NilpotentBlockSpec>& blocks) {
  std::size_t total = 0;
  for (const auto& b : blocks) total += b.size;
  Matrix<T> h(total, total);
  std::size_t offset = 0;
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i + 1 < b.size; ++i) h(offset + i, offset + i + 1) = T(1);
    offset += b.size;
  }
  return h;
}

/// Weierstrass canonical form of a regular pencil.
///
/// A shift c with det(cF - G) != 0 turns the pencil into M = (cF - G)^-1 F,
/// whose generalized eigenspaces are exactly the deflating subspaces of the
/// pencil (finite a <-> 1/(c - a), infinite <-> 0). On each such subspace W
/// the chain relations (G - aF) v_{r+1} = F v_r and F w_{r+1} = G w_r define
/// a nilpotent operator; its Jordan chains give the columns of Q. Finally
/// P = [F Q_p | G Q_q]^-1.
///
/// Throws IrregularPencil, UnresolvableSpectrum (exact mode) or
/// ChainConstructionFailure.
template <FieldScalar T>
WeierstrassDecomposition<T> decompose(const Pencil<T>& pencil, const Tolerances& tol = {});

struct VerificationReport {
  double residual_f = 0.0;  // max |P F Q - (I_p (+) H_q)|
  double residual_g = 0.0;  // max |P G Q - (J_p (+) I_q)|
  bool exact_zero = false;  // both residuals vanish exactly (exact mode only)
  bool p_nonsingular = false;
  bool q_nonsingular = false;

  bool ok(double abs_tol) const {
    return p_nonsingular && q_nonsingular && residual_f <= abs_tol && residual_g <= abs_tol;
  }
};

/// Checks both block equations and the nonsingularity of P and Q.
template <FieldScalar T>
VerificationReport verify(const Pencil<T>& pencil, const WeierstrassDecomposition<T>& w,
                          const Tolerances& tol = {});

/// Block specs in canonical order, for multiset comparison.
template <FieldScalar T>
std::vector<JordanBlockSpec<T>> canonical_jordan_specs(std::vector<JordanBlockSpec<T>> blocks);
std::vector<NilpotentBlockSpec> canonical_nilpotent_specs(std::vector<NilpotentBlockSpec> blocks);

extern template WeierstrassDecomposition<Rational> decompose(const Pencil<Rational>&, const Tolerances&);
extern template WeierstrassDecomposition<Complex> decompose(const Pencil<Complex>&, const Tolerances&);
extern template VerificationReport verify(const Pencil<Rational>&, const WeierstrassDecomposition<Rational>&,
                                          const Tolerances&);
extern template VerificationReport verify(const Pencil<Complex>&, const WeierstrassDecomposition<Complex>&,
                                          const Tolerances&);

}  // namespace dkit
