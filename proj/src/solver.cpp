#include "dkit/solver.hpp"

#include <algorithm>
#include <cmath>

#include "dkit/linalg.hpp"

namespace dkit {

template <FieldScalar T>
DescriptorSystem<T>::DescriptorSystem(Matrix<T> f, Matrix<T> g, Matrix<T> b, Matrix<T> c, const Tolerances& tol)
    : pencil_(std::move(f), std::move(g)), b_(std::move(b)), c_(std::move(c)) {
  if (b_.rows() != pencil_.n())
    throw std::invalid_argument("B has " + std::to_string(b_.rows()) + " rows, expected " +
                                std::to_string(pencil_.n()));
  if (c_.cols() != pencil_.n())
    throw std::invalid_argument("C has " + std::to_string(c_.cols()) + " columns, expected " +
                                std::to_string(pencil_.n()));
  if (!is_regular(pencil_, tol)) throw IrregularPencil("irregular pencil: det(sF - G) is identically zero");
}

template <FieldScalar T>
const Matrix<T>& InputSignal<T>::at(long k) const {
  if (!covers(k))
    throw InputHorizonTooShort("input sample V_" + std::to_string(k) + " is not available (inputs cover " +
                               std::to_string(k0) + " .. " + std::to_string(last_index()) + ")");
  return samples[static_cast<std::size_t>(k - k0)];
}

template <FieldScalar T>
TransformedInput<T> transform_input(const WeierstrassDecomposition<T>& w, const Matrix<T>& b) {
  const Matrix<T> pb = w.P * b;
  return {pb.leading_rows(w.p), pb.trailing_rows(w.q)};
}

template <FieldScalar T>
Dk<T> compute_dk(const WeierstrassDecomposition<T>& w, const TransformedInput<T>& tin, const InputSignal<T>& input,
                 long k) {
  if (k < input.k0) throw std::invalid_argument("D_k requested before the initial time");
  const long needed = k + static_cast<long>(w.q_star) - 1;
  if (needed > input.last_index())
    throw InputHorizonTooShort("D_" + std::to_string(k) + " needs inputs up to V_" + std::to_string(needed) +
                               ", have up to V_" + std::to_string(input.last_index()));
  Dk<T> d{Matrix<T>(w.p, 1), Matrix<T>(w.q, 1)};
  if (w.p > 0) {
    const Matrix<T> jp = w.Jp();
    // Horner form of sum_{i=k0}^{k-1} J^{k-i-1} B_p V_i.
    for (long i = input.k0; i < k; ++i) d.forward = jp * d.forward + tin.Bp * input.at(i);
  }
  if (w.q > 0) {
    const Matrix<T> hq = w.Hq();
    Matrix<T> h_power = Matrix<T>::identity(w.q);
    for (std::size_t i = 0; i < w.q_star; ++i) {
      d.backward -= h_power * tin.Bq * input.at(k + static_cast<long>(i));
      h_power = h_power * hq;
    }
  }
  return d;
}

template <FieldScalar T>
Consistency<T> check_consistency(const DescriptorSystem<T>& sys, const WeierstrassDecomposition<T>& w,
                                 const TransformedInput<T>& tin, const InputSignal<T>& input, const Matrix<T>& y0,
                                 const Tolerances& tol) {
  if (y0.rows() != sys.n() || y0.cols() != 1) throw std::invalid_argument("initial state must be n x 1");
  const Matrix<T> offset = w.Q * compute_dk(w, tin, input, input.k0).stacked();
  const Matrix<T> rhs = y0 - offset;
  const auto q_inverse = inverse(w.Q, tol.rank_rel);
  if (!q_inverse) throw ChainConstructionFailure("Q is singular");
  const Matrix<T> coords = *q_inverse * rhs;
  const Matrix<T> zp = coords.leading_rows(w.p);

  Consistency<T> out;
  out.residual = rhs - w.Qp() * zp;
  if constexpr (ScalarTraits<T>::exact) {
    out.consistent = out.residual.is_zero();
  } else {
    const double scale = std::max({1.0, y0.max_abs(), offset.max_abs()});
    out.consistent = out.residual.max_abs() <= std::sqrt(tol.rank_rel) * scale;
  }
  if (out.consistent) out.zp0 = zp;
  return out;
}

template <FieldScalar T>
Trajectory<T> solve(const DescriptorSystem<T>& sys, const WeierstrassDecomposition<T>& w,
                    const TransformedInput<T>& tin, const InputSignal<T>& input, const Matrix<T>& y0, long horizon,
                    const Tolerances& tol) {
  const long k0 = input.k0;
  if (horizon < k0) throw std::invalid_argument("horizon K precedes the initial time k0");
  const long needed = horizon + static_cast<long>(w.q_star) - 1;
  if (needed > input.last_index())
    throw InputHorizonTooShort("solving to K=" + std::to_string(horizon) + " needs inputs up to V_" +
                               std::to_string(needed) + ", have up to V_" + std::to_string(input.last_index()));

  const Consistency<T> cons = check_consistency(sys, w, tin, input, y0, tol);
  if (!cons.consistent)
    throw InconsistentInitialCondition("initial state is not in colspan Q_p + Q D_k0");

  const Matrix<T> jp = w.Jp();
  std::vector<Matrix<T>> h_bq;  // H_q^i B_q, i < q*
  {
    Matrix<T> h_power = Matrix<T>::identity(w.q);
    const Matrix<T> hq = w.Hq();
    for (std::size_t i = 0; i < w.q_star; ++i) {
      h_bq.push_back(h_power * tin.Bq);
      h_power = h_power * hq;
    }
  }

  Trajectory<T> traj;
  traj.k0 = k0;
  Matrix<T> zp = *cons.zp0;
  for (long k = k0; k <= horizon; ++k) {
    Matrix<T> zq(w.q, 1);
    for (std::size_t i = 0; i < h_bq.size(); ++i) zq -= h_bq[i] * input.at(k + static_cast<long>(i));
    Matrix<T> y = w.Q * vstack(zp, zq);
    traj.outputs.push_back(sys.C() * y);
    traj.states.push_back(std::move(y));
    traj.zp.push_back(zp);
    traj.zq.push_back(std::move(zq));
    if (k < horizon) zp = jp * zp + tin.Bp * input.at(k);
  }
  return traj;
}

template <FieldScalar T>
Matrix<T> finite_state_closed_form(const WeierstrassDecomposition<T>& w, const TransformedInput<T>& tin,
                                   const InputSignal<T>& input, const Matrix<T>& zp0, long k) {
  const Matrix<T> jp = w.Jp();
  Matrix<T> z = power(jp, static_cast<std::size_t>(k - input.k0)) * zp0;
  for (long i = input.k0; i < k; ++i)
    z += power(jp, static_cast<std::size_t>(k - i - 1)) * tin.Bp * input.at(i);
  return z;
}

template <FieldScalar T>
ResidualReport residual_oracle(const DescriptorSystem<T>& sys, const InputSignal<T>& input,
                               const Trajectory<T>& traj, const Matrix<T>& y0) {
  ResidualReport r;
  bool exact_zero = ScalarTraits<T>::exact;
  if (traj.states.empty()) throw std::invalid_argument("empty trajectory");
  const Matrix<T> d0 = traj.states.front() - y0;
  r.initial_mismatch = d0.max_abs();
  exact_zero = exact_zero && d0.is_zero();
  for (std::size_t i = 0; i + 1 < traj.states.size(); ++i) {
    const long k = traj.k0 + static_cast<long>(i);
    const Matrix<T> step = sys.F() * traj.states[i + 1] - sys.G() * traj.states[i] - sys.B() * input.at(k);
    r.max_step_residual = std::max(r.max_step_residual, step.max_abs());
    exact_zero = exact_zero && step.is_zero();
  }
  for (std::size_t i = 0; i < traj.states.size() && i < traj.outputs.size(); ++i) {
    const Matrix<T> out = traj.outputs[i] - sys.C() * traj.states[i];
    r.max_output_residual = std::max(r.max_output_residual, out.max_abs());
    exact_zero = exact_zero && out.is_zero();
  }
  r.exact_zero = exact_zero;
  return r;
}

#define DKIT_INSTANTIATE_SOLVER(T)                                                                               \
  template class DescriptorSystem<T>;                                                                            \
  template struct InputSignal<T>;                                                                                \
  template TransformedInput<T> transform_input(const WeierstrassDecomposition<T>&, const Matrix<T>&);           \
  template Dk<T> compute_dk(const WeierstrassDecomposition<T>&, const TransformedInput<T>&,                     \
                            const InputSignal<T>&, long);                                                        \
  template Consistency<T> check_consistency(const DescriptorSystem<T>&, const WeierstrassDecomposition<T>&,     \
                                            const TransformedInput<T>&, const InputSignal<T>&, const Matrix<T>&, \
                                            const Tolerances&);                                                  \
  template Trajectory<T> solve(const DescriptorSystem<T>&, const WeierstrassDecomposition<T>&,                  \
                               const TransformedInput<T>&, const InputSignal<T>&, const Matrix<T>&, long,        \
                               const Tolerances&);                                                               \
  template Matrix<T> finite_state_closed_form(const WeierstrassDecomposition<T>&, const TransformedInput<T>&,    \
                                              const InputSignal<T>&, const Matrix<T>&, long);                    \
  template ResidualReport residual_oracle(const DescriptorSystem<T>&, const InputSignal<T>&,                    \
                                          const Trajectory<T>&, const Matrix<T>&);

DKIT_INSTANTIATE_SOLVER(Rational)
DKIT_INSTANTIATE_SOLVER(Complex)

}  // namespace dkit
