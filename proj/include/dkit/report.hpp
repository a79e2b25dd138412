#pragma once

#include <optional>
#include <ostream>

#include "json.hpp"

#include "dkit/causality.hpp"
#include "dkit/pencil.hpp"
#include "dkit/solver.hpp"
#include "dkit/weierstrass.hpp"

namespace dkit {

template <FieldScalar T>
struct AnalysisReport {
  Tolerances tolerances;
  bool regular = false;
  CharPoly<T> char_poly;
  std::optional<WeierstrassDecomposition<T>> decomposition;
  std::optional<VerificationReport> verification;
  std::optional<Consistency<T>> consistency;
  std::optional<CausalityReport<T>> causality;
};

template <FieldScalar T>
nlohmann::json to_json(const AnalysisReport<T>& report);

template <FieldScalar T>
nlohmann::json to_json(const CausalityReport<T>& report);

template <FieldScalar T>
void print_report(std::ostream& out, const AnalysisReport<T>& report);

template <FieldScalar T>
void print_causality(std::ostream& out, const CausalityReport<T>& report);

template <FieldScalar T>
void print_matrix(std::ostream& out, const Matrix<T>& m, int indent = 4);

/// Header plus one row per k: k, Y_1..Y_n, X_1..X_m, Zp_1..Zp_p, Zq_1..Zq_q.
template <FieldScalar T>
void write_trajectory_csv(std::ostream& out, const Trajectory<T>& traj);

}  // namespace dkit
