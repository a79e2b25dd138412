#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "dkit/solver.hpp"

namespace dkit {

template <FieldScalar T>
struct StateCausality {
  bool causal = true;
  Matrix<T> witness;  // H_q B_q, q x l
};

template <FieldScalar T>
struct OutputCausality {
  bool causal = true;
  std::vector<Matrix<T>> witnesses;  // C Q_q H_q^i B_q for i = 1 .. q*-1, each m x l
};

template <FieldScalar T>
struct CausalityReport {
  bool state_input_causal = true;
  bool output_input_causal = true;
  bool nullspace_form_causal = true;
  bool no_infinite_eigenvalues = false;
  Matrix<T> criterion_state;
  std::vector<Matrix<T>> criteria_output;
  /// [Q_q H_q B_q | ... | Q_q H_q^{q*-1} B_q], n x (q*-1) l
  Matrix<T> nullspace_form;
  /// Zero threshold used for witnesses (0 in exact mode).
  double tolerance = 0.0;
};

/// Causal between state and inputs iff H_q B_q = 0.
template <FieldScalar T>
StateCausality<T> check_state_causality(const WeierstrassDecomposition<T>& w, const TransformedInput<T>& tin,
                                        const Tolerances& tol = {});

/// Causal between output and inputs iff C Q_q H_q^i B_q = 0 for i = 1 .. q*-1.
template <FieldScalar T>
OutputCausality<T> check_output_causality(const DescriptorSystem<T>& sys, const WeierstrassDecomposition<T>& w,
                                          const TransformedInput<T>& tin, const Tolerances& tol = {});

template <FieldScalar T>
Matrix<T> nullspace_form(const WeierstrassDecomposition<T>& w, const TransformedInput<T>& tin);

/// Same verdict as check_output_causality, phrased as: every column of the
/// stacked nullspace form lies in the right nullspace of C.
template <FieldScalar T>
bool check_output_causality_nullspace(const DescriptorSystem<T>& sys, const WeierstrassDecomposition<T>& w,
                                      const TransformedInput<T>& tin, const Tolerances& tol = {});

template <FieldScalar T>
CausalityReport<T> analyze_causality(const DescriptorSystem<T>& sys, const WeierstrassDecomposition<T>& w,
                                     const TransformedInput<T>& tin, const Tolerances& tol = {});

enum class CausalityMode { State, Output };

/// A pair of input signals agreeing up to `time` whose responses differ at `time`.
template <FieldScalar T>
struct CausalityCounterexample {
  long time = 0;             // k where the responses differ
  long perturbed_index = 0;  // j > k where the inputs differ
  Matrix<T> zp0;
  InputSignal<T> first;
  InputSignal<T> second;
  Matrix<T> response_first;
  Matrix<T> response_second;
};

template <FieldScalar T>
struct OracleResult {
  bool causal = true;
  int trials = 0;
  std::optional<CausalityCounterexample<T>> counterexample;
};

/// Tests the definition of causality directly. Each trial draws finite
/// initial coordinates Z^p_{k0} and an input signal, perturbs one future
/// sample V_j by a random nonzero vector, solves both runs from their own
/// consistent initial states, and compares Y_k (or X_k) for every
/// k0 <= k < j within the horizon. Any difference is a causality violation.
template <FieldScalar T>
OracleResult<T> brute_force_causality_oracle(const DescriptorSystem<T>& sys, const WeierstrassDecomposition<T>& w,
                                             const TransformedInput<T>& tin, CausalityMode mode, long horizon,
                                             int trials, std::mt19937_64& rng, const Tolerances& tol = {});

}  // namespace dkit
