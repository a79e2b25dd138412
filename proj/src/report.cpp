#include "dkit/report.hpp"

#include <algorithm>

#include "dkit/system_file.hpp"

namespace dkit {

using nlohmann::json;

namespace {

std::string bool_verdict(bool causal) { return causal ? "CAUSAL" : "NON-CAUSAL"; }

template <FieldScalar T>
std::string poly_to_string(const std::vector<T>& coefficients) {
  if (coefficients.empty()) return "0";
  std::string s;
  for (std::size_t i = coefficients.size(); i-- > 0;) {
    if (ScalarTraits<T>::is_zero(coefficients[i])) continue;
    if (!s.empty()) s += " + ";
    s += "(" + format(coefficients[i]) + ")";
    if (i >= 1) s += "*s";
    if (i >= 2) s += "^" + std::to_string(i);
  }
  return s.empty() ? "0" : s;
}

}  // namespace

template <FieldScalar T>
json to_json(const CausalityReport<T>& r) {
  json j;
  j["state_input_causal"] = r.state_input_causal;
  j["output_input_causal"] = r.output_input_causal;
  j["nullspace_form_causal"] = r.nullspace_form_causal;
  j["no_infinite_eigenvalues"] = r.no_infinite_eigenvalues;
  j["criterion_state"] = matrix_to_json(r.criterion_state);
  json outputs = json::array();
  for (const auto& w : r.criteria_output) outputs.push_back(matrix_to_json(w));
  j["criteria_output"] = std::move(outputs);
  j["nullspace_form"] = matrix_to_json(r.nullspace_form);
  j["tolerance"] = r.tolerance;
  return j;
}

template <FieldScalar T>
json to_json(const AnalysisReport<T>& r) {
  json j;
  j["mode"] = std::string(to_string(ScalarTraits<T>::mode));
  if constexpr (!ScalarTraits<T>::exact) {
    j["tolerances"] = {{"zero_rel", r.tolerances.zero_rel},
                       {"cluster_radius", r.tolerances.cluster_radius},
                       {"rank_rel", r.tolerances.rank_rel},
                       {"causality", r.tolerances.causality}};
  }
  j["regular"] = r.regular;
  json coefficients = json::array();
  for (const auto& c : r.char_poly.coefficients) coefficients.push_back(scalar_to_json(c));
  j["char_poly"] = std::move(coefficients);
  if (r.decomposition) {
    const auto& w = *r.decomposition;
    j["p"] = w.p;
    j["q"] = w.q;
    j["q_star"] = w.q_star;
    json jordan = json::array();
    for (const auto& b : w.jordan_blocks) jordan.push_back({{"eigenvalue", scalar_to_json(b.eigenvalue)}, {"size", b.size}});
    j["jordan_blocks"] = std::move(jordan);
    json nilpotent = json::array();
    for (const auto& b : w.nilpotent_blocks) nilpotent.push_back({{"size", b.size}});
    j["nilpotent_blocks"] = std::move(nilpotent);
    j["P"] = matrix_to_json(w.P);
    j["Q"] = matrix_to_json(w.Q);
  }
  if (r.verification) {
    j["verification"] = {{"residual_F", r.verification->residual_f},
                         {"residual_G", r.verification->residual_g},
                         {"P_nonsingular", r.verification->p_nonsingular},
                         {"Q_nonsingular", r.verification->q_nonsingular}};
  }
  if (r.consistency) {
    json c;
    c["consistent"] = r.consistency->consistent;
    if (r.consistency->zp0) c["Zp0"] = vector_to_json(*r.consistency->zp0);
    c["residual"] = vector_to_json(r.consistency->residual);
    j["consistency"] = std::move(c);
  }
  if (r.causality) j["causality"] = to_json(*r.causality);
  return j;
}

template <FieldScalar T>
void print_matrix(std::ostream& out, const Matrix<T>& m, int indent) {
  if (m.rows() == 0 || m.cols() == 0) {
    out << std::string(static_cast<std::size_t>(indent), ' ') << "(empty " << m.shape() << ")\n";
    return;
  }
  std::vector<std::string> cells;
  std::size_t width = 0;
  for (const auto& x : m.entries()) {
    cells.push_back(format(x));
    width = std::max(width, cells.back().size());
  }
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out << std::string(static_cast<std::size_t>(indent), ' ') << "[";
    for (std::size_t jj = 0; jj < m.cols(); ++jj) {
      const auto& cell = cells[i * m.cols() + jj];
      out << (jj ? "  " : "") << std::string(width - cell.size(), ' ') << cell;
    }
    out << "]\n";
  }
}

template <FieldScalar T>
void print_causality(std::ostream& out, const CausalityReport<T>& r) {
  if (r.no_infinite_eigenvalues) out << "no infinite eigenvalues: causal\n";
  out << "state-input causality: " << bool_verdict(r.state_input_causal) << "\n";
  if (r.criterion_state.size() > 0) {
    out << "  H_q B_q =\n";
    print_matrix(out, r.criterion_state);
  }
  out << "output-input causality: " << bool_verdict(r.output_input_causal) << "\n";
  for (std::size_t i = 0; i < r.criteria_output.size(); ++i) {
    out << "  C Q_q H_q^" << (i + 1) << " B_q =\n";
    print_matrix(out, r.criteria_output[i]);
  }
  out << "output-input causality (right nullspace of C): " << bool_verdict(r.nullspace_form_causal) << "\n";
  if (r.tolerance > 0.0) out << "  witness zero threshold: " << format_double(r.tolerance) << "\n";
}

template <FieldScalar T>
void print_report(std::ostream& out, const AnalysisReport<T>& r) {
  out << "mode: " << to_string(ScalarTraits<T>::mode) << "\n";
  out << "regular: " << (r.regular ? "yes" : "no") << "\n";
  out << "det(sF - G) = " << poly_to_string(r.char_poly.coefficients) << "\n";
  if (r.decomposition) {
    const auto& w = *r.decomposition;
    out << "p = " << w.p << ", q = " << w.q << ", q_star = " << w.q_star << "\n";
    out << "finite blocks:";
    if (w.jordan_blocks.empty()) out << " none";
    for (const auto& b : w.jordan_blocks) out << " J" << b.size << "(" << format(b.eigenvalue) << ")";
    out << "\ninfinite blocks:";
    if (w.nilpotent_blocks.empty()) out << " none";
    for (const auto& b : w.nilpotent_blocks) out << " H" << b.size;
    out << "\nP =\n";
    print_matrix(out, w.P);
    out << "Q =\n";
    print_matrix(out, w.Q);
  }
  if (r.verification) {
    out << "verification: |PFQ - (I_p + H_q)| = " << format_double(r.verification->residual_f)
        << ", |PGQ - (J_p + I_q)| = " << format_double(r.verification->residual_g) << "\n";
  }
  if (r.consistency) {
    out << "initial condition: " << (r.consistency->consistent ? "consistent" : "INCONSISTENT") << "\n";
    if (r.consistency->zp0) {
      out << "  Zp_k0 =\n";
      print_matrix(out, r.consistency->zp0->transpose());
    } else {
      out << "  Y0 - Q_p Zp - Q D_k0 =\n";
      print_matrix(out, r.consistency->residual.transpose());
    }
  }
  if (r.causality) print_causality(out, *r.causality);
}

template <FieldScalar T>
void write_trajectory_csv(std::ostream& out, const Trajectory<T>& traj) {
  if (traj.states.empty()) return;
  const std::size_t n = traj.states.front().rows();
  const std::size_t m = traj.outputs.front().rows();
  const std::size_t p = traj.zp.front().rows();
  const std::size_t q = traj.zq.front().rows();
  out << "k";
  for (std::size_t i = 1; i <= n; ++i) out << ",Y_" << i;
  for (std::size_t i = 1; i <= m; ++i) out << ",X_" << i;
  for (std::size_t i = 1; i <= p; ++i) out << ",Zp_" << i;
  for (std::size_t i = 1; i <= q; ++i) out << ",Zq_" << i;
  out << "\n";
  for (std::size_t r = 0; r < traj.states.size(); ++r) {
    out << traj.k0 + static_cast<long>(r);
    for (const auto* column : {&traj.states[r], &traj.outputs[r], &traj.zp[r], &traj.zq[r]})
      for (std::size_t i = 0; i < column->rows(); ++i) out << "," << format((*column)[i]);
    out << "\n";
  }
}

#define DKIT_INSTANTIATE_REPORT(T)                                         \
  template json to_json(const AnalysisReport<T>&);                         \
  template json to_json(const CausalityReport<T>&);                        \
  template void print_report(std::ostream&, const AnalysisReport<T>&);     \
  template void print_causality(std::ostream&, const CausalityReport<T>&); \
  template void print_matrix(std::ostream&, const Matrix<T>&, int);        \
  template void write_trajectory_csv(std::ostream&, const Trajectory<T>&);

DKIT_INSTANTIATE_REPORT(Rational)
DKIT_INSTANTIATE_REPORT(Complex)

}  // namespace dkit
