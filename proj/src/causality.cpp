#include "dkit/causality.hpp"

#include <algorithm>

namespace dkit {

namespace {

template <FieldScalar T>
double witness_tolerance(const Tolerances& tol) {
  return ScalarTraits<T>::exact ? 0.0 : tol.causality;
}

template <FieldScalar T>
Matrix<T> random_vector(std::size_t rows, std::mt19937_64& rng, bool nonzero) {
  std::uniform_int_distribution<long> dist(-5, 5);
  Matrix<T> v(rows, 1);
  do {
    for (std::size_t i = 0; i < rows; ++i) v[i] = ScalarTraits<T>::from_int(dist(rng));
  } while (nonzero && rows > 0 && v.is_zero());
  return v;
}

}  // namespace

template <FieldScalar T>
StateCausality<T> check_state_causality(const WeierstrassDecomposition<T>& w, const TransformedInput<T>& tin,
                                        const Tolerances& tol) {
  StateCausality<T> out;
  out.witness = w.Hq() * tin.Bq;
  out.causal = out.witness.is_zero(witness_tolerance<T>(tol));
  return out;
}

template <FieldScalar T>
OutputCausality<T> check_output_causality(const DescriptorSystem<T>& sys, const WeierstrassDecomposition<T>& w,
                                          const TransformedInput<T>& tin, const Tolerances& tol) {
  OutputCausality<T> out;
  const Matrix<T> hq = w.Hq();
  const Matrix<T> cqq = sys.C() * w.Qq();
  Matrix<T> h_power_bq = tin.Bq;
  for (std::size_t i = 1; i < w.q_star; ++i) {
    h_power_bq = hq * h_power_bq;
    out.witnesses.push_back(cqq * h_power_bq);
    out.causal = out.causal && out.witnesses.back().is_zero(witness_tolerance<T>(tol));
  }
  return out;
}

template <FieldScalar T>
Matrix<T> nullspace_form(const WeierstrassDecomposition<T>& w, const TransformedInput<T>& tin) {
  const Matrix<T> hq = w.Hq();
  const Matrix<T> qq = w.Qq();
  Matrix<T> stacked(w.n(), 0);
  Matrix<T> h_power_bq = tin.Bq;
  for (std::size_t i = 1; i < w.q_star; ++i) {
    h_power_bq = hq * h_power_bq;
    stacked = hstack(stacked, Matrix<T>(qq * h_power_bq));
  }
  return stacked;
}

template <FieldScalar T>
bool check_output_causality_nullspace(const DescriptorSystem<T>& sys, const WeierstrassDecomposition<T>& w,
                                      const TransformedInput<T>& tin, const Tolerances& tol) {
  const Matrix<T> m = nullspace_form(w, tin);
  if (m.cols() == 0) return true;
  return (sys.C() * m).is_zero(witness_tolerance<T>(tol));
}

template <FieldScalar T>
CausalityReport<T> analyze_causality(const DescriptorSystem<T>& sys, const WeierstrassDecomposition<T>& w,
                                     const TransformedInput<T>& tin, const Tolerances& tol) {
  CausalityReport<T> r;
  auto state = check_state_causality(w, tin, tol);
  auto output = check_output_causality(sys, w, tin, tol);
  r.state_input_causal = state.causal;
  r.criterion_state = std::move(state.witness);
  r.output_input_causal = output.causal;
  r.criteria_output = std::move(output.witnesses);
  r.nullspace_form = nullspace_form(w, tin);
  r.nullspace_form_causal = check_output_causality_nullspace(sys, w, tin, tol);
  r.no_infinite_eigenvalues = w.q == 0;
  r.tolerance = witness_tolerance<T>(tol);
  return r;
}

template <FieldScalar T>
OracleResult<T> brute_force_causality_oracle(const DescriptorSystem<T>& sys, const WeierstrassDecomposition<T>& w,
                                             const TransformedInput<T>& tin, CausalityMode mode, long horizon,
                                             int trials, std::mt19937_64& rng, const Tolerances& tol) {
  OracleResult<T> result;
  const long k0 = 0;
  const long last_input = horizon + static_cast<long>(w.q_star) - 1;
  if (last_input < k0 + 1) return result;  // no future sample to perturb
  std::uniform_int_distribution<long> pick_index(k0 + 1, last_input);

  auto initial_state = [&](const InputSignal<T>& u, const Matrix<T>& zp0) {
    return Matrix<T>(w.Qp() * zp0 + w.Q * compute_dk(w, tin, u, k0).stacked());
  };
  auto response = [&](const Trajectory<T>& traj, std::size_t i) -> const Matrix<T>& {
    return mode == CausalityMode::State ? traj.states[i] : traj.outputs[i];
  };

  for (int t = 0; t < trials; ++t) {
    ++result.trials;
    InputSignal<T> first{k0, {}};
    for (long k = k0; k <= last_input; ++k) first.samples.push_back(random_vector<T>(sys.inputs(), rng, false));
    const Matrix<T> zp0 = random_vector<T>(w.p, rng, false);
    const long j = pick_index(rng);
    InputSignal<T> second = first;
    second.samples[static_cast<std::size_t>(j - k0)] += random_vector<T>(sys.inputs(), rng, true);

    const auto traj_first = solve(sys, w, tin, first, initial_state(first, zp0), horizon, tol);
    const auto traj_second = solve(sys, w, tin, second, initial_state(second, zp0), horizon, tol);

    for (long k = k0; k < j && k <= horizon; ++k) {
      const auto i = static_cast<std::size_t>(k - k0);
      const Matrix<T>& a = response(traj_first, i);
      const Matrix<T>& b = response(traj_second, i);
      const Matrix<T> diff = a - b;
      const double abs_tol =
          ScalarTraits<T>::exact ? 0.0 : tol.causality * std::max({1.0, a.max_abs(), b.max_abs()});
      if (!diff.is_zero(abs_tol)) {
        result.causal = false;
        result.counterexample = CausalityCounterexample<T>{k, j, zp0, first, second, a, b};
        return result;
      }
    }
  }
  return result;
}

#define DKIT_INSTANTIATE_CAUSALITY(T)                                                                            \
  template StateCausality<T> check_state_causality(const WeierstrassDecomposition<T>&,                          \
                                                   const TransformedInput<T>&, const Tolerances&);               \
  template OutputCausality<T> check_output_causality(const DescriptorSystem<T>&,                                \
                                                     const WeierstrassDecomposition<T>&,                         \
                                                     const TransformedInput<T>&, const Tolerances&);             \
  template Matrix<T> nullspace_form(const WeierstrassDecomposition<T>&, const TransformedInput<T>&);           \
  template bool check_output_causality_nullspace(const DescriptorSystem<T>&, const WeierstrassDecomposition<T>&, \
                                                 const TransformedInput<T>&, const Tolerances&);                 \
  template CausalityReport<T> analyze_causality(const DescriptorSystem<T>&, const WeierstrassDecomposition<T>&, \
                                                const TransformedInput<T>&, const Tolerances&);                  \
  template OracleResult<T> brute_force_causality_oracle(const DescriptorSystem<T>&,                             \
                                                        const WeierstrassDecomposition<T>&,                      \
                                                        const TransformedInput<T>&, CausalityMode, long, int,    \
                                                        std::mt19937_64&, const Tolerances&);

DKIT_INSTANTIATE_CAUSALITY(Rational)
DKIT_INSTANTIATE_CAUSALITY(Complex)

}  // namespace dkit
