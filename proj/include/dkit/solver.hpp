#pragma once

#include <optional>
#include <vector>

#include "dkit/matrix.hpp"
#include "dkit/pencil.hpp"
#include "dkit/weierstrass.hpp"

namespace dkit {

/// F Y_{k+1} = G Y_k + B V_k,  X_k = C Y_k.
template <FieldScalar T>
class DescriptorSystem {
 public:
  /// Validates shapes (F, G n x n; B n x l; C m x n) and regularity of sF - G.
  DescriptorSystem(Matrix<T> f, Matrix<T> g, Matrix<T> b, Matrix<T> c, const Tolerances& tol = {});

  const Matrix<T>& F() const { return pencil_.F(); }
  const Matrix<T>& G() const { return pencil_.G(); }
  const Matrix<T>& B() const { return b_; }
  const Matrix<T>& C() const { return c_; }
  const Pencil<T>& pencil() const { return pencil_; }
  std::size_t n() const { return pencil_.n(); }
  std::size_t inputs() const { return b_.cols(); }
  std::size_t outputs() const { return c_.rows(); }

 private:
  Pencil<T> pencil_;
  Matrix<T> b_;
  Matrix<T> c_;
};

/// Samples V_{k0}, V_{k0+1}, ... held constant between sampling instants.
template <FieldScalar T>
struct InputSignal {
  long k0 = 0;
  std::vector<Matrix<T>> samples;  // each l x 1

  long last_index() const { return k0 + static_cast<long>(samples.size()) - 1; }
  bool covers(long k) const { return k >= k0 && k <= last_index(); }
  /// V_k; throws InputHorizonTooShort when k is outside the stored range.
  const Matrix<T>& at(long k) const;
};

/// P B split into the rows acting on the finite (B_p, p x l) and infinite (B_q, q x l) parts.
template <FieldScalar T>
struct TransformedInput {
  Matrix<T> Bp;
  Matrix<T> Bq;
};

template <FieldScalar T>
TransformedInput<T> transform_input(const WeierstrassDecomposition<T>& w, const Matrix<T>& b);

template <FieldScalar T>
struct Dk {
  Matrix<T> forward;   // sum_{i=k0}^{k-1} J_p^{k-i-1} B_p V_i   (p x 1)
  Matrix<T> backward;  // -sum_{i=0}^{q*-1} H_q^i B_q V_{k+i}    (q x 1)
  Matrix<T> stacked() const { return vstack(forward, backward); }
};

/// Requires V_{k0} .. V_{k+q*-1}; throws InputHorizonTooShort otherwise.
template <FieldScalar T>
Dk<T> compute_dk(const WeierstrassDecomposition<T>& w, const TransformedInput<T>& tin, const InputSignal<T>& input,
                 long k);

template <FieldScalar T>
struct Consistency {
  bool consistent = false;
  std::optional<Matrix<T>> zp0;  // Z^p_{k0} when consistent
  /// Y_{k0} - Q_p a - Q D_{k0} where [a; b] = Q^-1 (Y_{k0} - Q D_{k0}); zero iff consistent.
  Matrix<T> residual;
};

/// Y_{k0} in colspan Q_p + Q D_{k0}?
template <FieldScalar T>
Consistency<T> check_consistency(const DescriptorSystem<T>& sys, const WeierstrassDecomposition<T>& w,
                                 const TransformedInput<T>& tin, const InputSignal<T>& input, const Matrix<T>& y0,
                                 const Tolerances& tol = {});

template <FieldScalar T>
struct Trajectory {
  long k0 = 0;
  std::vector<Matrix<T>> states;   // Y_k, k = k0 .. K
  std::vector<Matrix<T>> outputs;  // X_k
  std::vector<Matrix<T>> zp;       // Z^p_k
  std::vector<Matrix<T>> zq;       // Z^q_k

  long last_index() const { return k0 + static_cast<long>(states.size()) - 1; }
};

/// Unique solution on k0 .. K. Z^p follows the forward recursion, Z^q the
/// backward closed form over future inputs.
///
/// Throws InconsistentInitialCondition or InputHorizonTooShort.
template <FieldScalar T>
Trajectory<T> solve(const DescriptorSystem<T>& sys, const WeierstrassDecomposition<T>& w,
                    const TransformedInput<T>& tin, const InputSignal<T>& input, const Matrix<T>& y0, long horizon,
                    const Tolerances& tol = {});

/// Z^p_k = J_p^{k-k0} Z^p_{k0} + sum_{i=k0}^{k-1} J_p^{k-i-1} B_p V_i, evaluated directly.
template <FieldScalar T>
Matrix<T> finite_state_closed_form(const WeierstrassDecomposition<T>& w, const TransformedInput<T>& tin,
                                   const InputSignal<T>& input, const Matrix<T>& zp0, long k);

struct ResidualReport {
  double max_step_residual = 0.0;   // max_k |F Y_{k+1} - G Y_k - B V_k|
  double initial_mismatch = 0.0;    // |Y_{k0} - given initial state|
  double max_output_residual = 0.0; // max_k |X_k - C Y_k|
  bool exact_zero = false;          // exact mode: every residual vanishes exactly
};

/// Independent check that a trajectory satisfies the descriptor equations.
template <FieldScalar T>
ResidualReport residual_oracle(const DescriptorSystem<T>& sys, const InputSignal<T>& input,
                               const Trajectory<T>& traj, const Matrix<T>& y0);

extern template class DescriptorSystem<Rational>;
extern template class DescriptorSystem<Complex>;

}  // namespace dkit
