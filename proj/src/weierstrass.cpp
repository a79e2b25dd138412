#include "dkit/weierstrass.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "dkit/linalg.hpp"

namespace dkit {

namespace {

template <FieldScalar T>
using Chain = std::vector<Matrix<T>>;  // bottom (kernel vector) first

Eigen::MatrixXcd to_eigen(const Matrix<Complex>& a) {
  Eigen::MatrixXcd e(static_cast<Eigen::Index>(a.rows()), static_cast<Eigen::Index>(a.cols()));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a(i, j);
  return e;
}

// Right singular vectors of the trailing singular values; `keep(sigma)` says
// whether a singular value counts as zero. Returns an orthonormal basis.
template <typename Keep>
Matrix<Complex> svd_kernel(const Matrix<Complex>& a, Keep keep) {
  const std::size_t cols = a.cols();
  if (a.rows() == 0) return Matrix<Complex>::identity(cols);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_eigen(a), Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  std::size_t r = 0;
  while (r < static_cast<std::size_t>(sigma.size()) && !keep(sigma(static_cast<Eigen::Index>(r)), r)) ++r;
  Matrix<Complex> basis(cols, cols - r);
  for (std::size_t i = 0; i < cols; ++i)
    for (std::size_t j = r; j < cols; ++j)
      basis(i, j - r) = svd.matrixV()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return basis;
}

// Kernel of a matrix known to have a `dim`-dimensional (numerical) kernel.
template <FieldScalar T>
Matrix<T> kernel_of_dimension(const Matrix<T>& a, std::size_t dim) {
  if constexpr (ScalarTraits<T>::exact) {
    return nullspace(a);
  } else {
    const std::size_t rank = a.cols() - dim;
    return svd_kernel(a, [rank](double, std::size_t index) { return index >= rank; });
  }
}

template <FieldScalar T>
double spectral_norm(const Matrix<T>& a) {
  if constexpr (ScalarTraits<T>::exact) {
    return 0.0;
  } else {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_eigen(a));
    return svd.singularValues()(0);
  }
}

Matrix<Complex> from_eigen(const Eigen::MatrixXcd& e) {
  Matrix<Complex> a(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) = e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return a;
}

// X with A X = B; float mode takes the least-squares solution (A has full column rank).
template <FieldScalar T>
std::optional<Matrix<T>> solve_operator(const Matrix<T>& a, const Matrix<T>& b, double rank_rel) {
  if constexpr (ScalarTraits<T>::exact) {
    (void)rank_rel;
    return solve_linear(a, b);
  } else {
    if (a.cols() == 0) return Matrix<T>(0, b.cols());
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(to_eigen(a));
    cod.setThreshold(rank_rel);
    if (static_cast<std::size_t>(cod.rank()) < a.cols()) return std::nullopt;
    return from_eigen(cod.solve(to_eigen(b)));
  }
}

// Rank of a set of columns; float mode normalizes the columns first and
// counts singular values above sqrt(rank_rel).
template <FieldScalar T>
std::size_t column_rank(const Matrix<T>& span, double rank_rel) {
  if constexpr (ScalarTraits<T>::exact) {
    (void)rank_rel;
    return rank(span);
  } else {
    if (span.cols() == 0) return 0;
    Eigen::MatrixXcd e = to_eigen(span);
    for (Eigen::Index j = 0; j < e.cols(); ++j) {
      const double norm = e.col(j).norm();
      if (norm > 0) e.col(j) /= norm;
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(e);
    const auto& sigma = svd.singularValues();
    std::size_t r = 0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i) r += sigma(i) > std::sqrt(rank_rel);
    return r;
  }
}

Matrix<Complex> adjoint(const Matrix<Complex>& a) {
  Matrix<Complex> t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = std::conj(a(i, j));
  return t;
}

double column_norm(const Matrix<Complex>& v) {
  double sum = 0.0;
  for (const auto& x : v.entries()) sum += std::norm(x);
  return std::sqrt(sum);
}

// Orthonormal basis of the column span (normalized columns, SVD cut at sqrt(rank_rel)).
Matrix<Complex> orthonormal_columns(const Matrix<Complex>& span, double rank_rel) {
  if (span.cols() == 0) return span;
  Eigen::MatrixXcd e = to_eigen(span);
  for (Eigen::Index j = 0; j < e.cols(); ++j) {
    const double norm = e.col(j).norm();
    if (norm > 0) e.col(j) /= norm;
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(e, Eigen::ComputeThinU);
  Eigen::Index r = 0;
  while (r < svd.singularValues().size() && svd.singularValues()(r) > std::sqrt(rank_rel)) ++r;
  return from_eigen(svd.matrixU().leftCols(r));
}

// Jordan chains of a nilpotent operator, longest first. Tops are picked
// greedily from the canonical kernel bases of L^j, which keeps the choice
// deterministic.
template <FieldScalar T>
std::vector<Chain<T>> nilpotent_chains(const Matrix<T>& op, double rank_rel) {
  const std::size_t m = op.rows();
  std::vector<Matrix<T>> kernels{Matrix<T>(m, 0)};
  Matrix<T> op_power = Matrix<T>::identity(m);
  const double op_norm = spectral_norm(op);
  for (std::size_t j = 1; j <= m; ++j) {
    if constexpr (ScalarTraits<T>::exact) {
      op_power = op_power * op;
      kernels.push_back(nullspace(op_power));
    } else {
      // ker L^j = ker (I - P) L with P the orthogonal projector onto ker L^(j-1).
      const Matrix<T>& previous = kernels.back();
      const Matrix<T> reduced = op - previous * (adjoint(previous) * op);
      const double threshold = std::sqrt(rank_rel) * std::max(1.0, op_norm);
      kernels.push_back(svd_kernel(reduced, [threshold](double sigma, std::size_t) { return sigma <= threshold; }));
    }
    if (kernels.back().cols() == m) break;
  }
  if (kernels.back().cols() != m)
    throw ChainConstructionFailure("restricted chain operator is not nilpotent (kernel dimension " +
                                   std::to_string(kernels.back().cols()) + " of " + std::to_string(m) + ")");

  // ker L^level / ker L^(level-1) needs d_level - d_(level-1) chain tops, some
  // of them supplied by longer chains already found.
  std::vector<Chain<T>> chains;
  for (std::size_t level = kernels.size() - 1; level >= 1; --level) {
    const std::size_t longer = chains.size();
    const std::size_t grown = kernels[level].cols() - kernels[level - 1].cols();
    if (grown < longer)
      throw ChainConstructionFailure("kernel dimensions of the chain operator are inconsistent");
    std::size_t needed = grown - longer;
    Matrix<T> span = kernels[level - 1];
    for (const auto& chain : chains) span = hstack(span, chain[level - 1]);
    const Matrix<T>& candidates = kernels[level];
    auto add_chain = [&](const Matrix<T>& top) {
      span = hstack(span, top);
      Chain<T> chain(level);
      chain[level - 1] = top;
      for (std::size_t i = level - 1; i-- > 0;) chain[i] = op * chain[i + 1];
      chains.push_back(std::move(chain));
    };
    if constexpr (ScalarTraits<T>::exact) {
      std::size_t span_rank = column_rank(span, rank_rel);
      for (std::size_t c = 0; c < candidates.cols() && needed > 0; ++c) {
        const Matrix<T> top = candidates.col(c);
        const std::size_t extended_rank = column_rank(hstack(span, top), rank_rel);
        if (extended_rank == span_rank) continue;
        span_rank = extended_rank;
        add_chain(top);
        --needed;
      }
    } else {
      // Pivoted selection: take the candidate farthest from the current span.
      for (; needed > 0; --needed) {
        const Matrix<T> basis = orthonormal_columns(span, rank_rel);
        double best = -1.0;
        std::size_t best_index = 0;
        for (std::size_t c = 0; c < candidates.cols(); ++c) {
          const Matrix<T> v = candidates.col(c);
          const double distance = column_norm(Matrix<T>(v - basis * (adjoint(basis) * v))) / column_norm(v);
          if (distance > best) best = distance, best_index = c;
        }
        if (best <= std::sqrt(rank_rel)) break;
        add_chain(candidates.col(best_index));
      }
    }
    if (needed > 0) throw ChainConstructionFailure("no independent chain top at level " + std::to_string(level));
    if (level == 1) break;
  }

  std::size_t total = 0;
  for (const auto& chain : chains) total += chain.size();
  if (total != m)
    throw ChainConstructionFailure("chains cover " + std::to_string(total) + " of " + std::to_string(m) +
                                   " dimensions");
  std::stable_sort(chains.begin(), chains.end(),
                   [](const Chain<T>& a, const Chain<T>& b) { return a.size() > b.size(); });
  return chains;
}

// First of 0, 1, -1, 2, -2, ... that is not a finite eigenvalue (float: at distance >= 1/2).
template <FieldScalar T>
T pick_shift(const CharPoly<T>& cp, const std::vector<EigenvalueMultiplicity<T>>& eigs) {
  for (long k = 0;; ++k) {
    const long candidate = (k % 2 == 0) ? -(k / 2) : (k + 1) / 2;
    const T c = ScalarTraits<T>::from_int(candidate);
    if constexpr (ScalarTraits<T>::exact) {
      if (cp(c) != 0) return c;
    } else {
      bool far = true;
      for (const auto& e : eigs) far = far && std::abs(c - e.value) >= 0.5;
      if (far) return c;
    }
  }
}

template <FieldScalar T>
Matrix<T> append_chains(Matrix<T> columns, const Matrix<T>& basis, const std::vector<Chain<T>>& chains) {
  for (const auto& chain : chains)
    for (const auto& v : chain) columns = hstack(columns, basis * v);
  return columns;
}

}  // namespace

template <FieldScalar T>
std::vector<JordanBlockSpec<T>> canonical_jordan_specs(std::vector<JordanBlockSpec<T>> blocks) {
  std::sort(blocks.begin(), blocks.end(), [](const auto& a, const auto& b) {
    if (eigenvalue_less(a.eigenvalue, b.eigenvalue)) return true;
    if (eigenvalue_less(b.eigenvalue, a.eigenvalue)) return false;
    return a.size > b.size;
  });
  return blocks;
}

std::vector<NilpotentBlockSpec> canonical_nilpotent_specs(std::vector<NilpotentBlockSpec> blocks) {
  std::sort(blocks.begin(), blocks.end(), [](const auto& a, const auto& b) { return a.size > b.size; });
  return blocks;
}

template <FieldScalar T>
WeierstrassDecomposition<T> decompose(const Pencil<T>& pencil, const Tolerances& tol) {
  const auto& F = pencil.F();
  const auto& G = pencil.G();
  const std::size_t n = pencil.n();

  const CharPoly<T> cp = char_poly(pencil, tol);
  if (cp.identically_zero()) throw IrregularPencil("irregular pencil: det(sF - G) is identically zero");
  const auto eigs = finite_eigenvalues(cp, tol);

  const T shift = pick_shift(cp, eigs);
  const auto shifted_inverse = inverse(Matrix<T>(shift * F - G), tol.rank_rel);
  if (!shifted_inverse) throw ChainConstructionFailure("shifted pencil cF - G is numerically singular");
  const Matrix<T> M = *shifted_inverse * F;

  WeierstrassDecomposition<T> w;
  w.p = cp.p;
  w.q = cp.q;

  Matrix<T> qp(n, 0);
  for (const auto& [a, mult] : eigs) {
    const T mu = T(1) / (shift - a);
    const Matrix<T> basis = kernel_of_dimension(power(Matrix<T>(M - mu * Matrix<T>::identity(n)), mult), mult);
    if (basis.cols() != mult)
      throw ChainConstructionFailure("deflating subspace of eigenvalue " + format(a) + " has dimension " +
                                     std::to_string(basis.cols()) + ", expected " + std::to_string(mult));
    // (G - aF) W = F W L defines the chain operator L on this subspace.
    auto op = solve_operator(Matrix<T>(F * basis), Matrix<T>((G - a * F) * basis), tol.rank_rel);
    if (!op) throw ChainConstructionFailure("finite chain operator for eigenvalue " + format(a) + " not found");
    T eigenvalue = a;
    if constexpr (!ScalarTraits<T>::exact) {
      // Center the clustered eigenvalue on the mean eigenvalue of the restriction.
      Complex trace = 0;
      for (std::size_t i = 0; i < mult; ++i) trace += (*op)(i, i);
      const Complex offset = trace / static_cast<double>(mult);
      eigenvalue = a + offset;
      *op = *op - offset * Matrix<T>::identity(mult);
    }
    const auto chains = nilpotent_chains(*op, tol.rank_rel);
    for (const auto& chain : chains) w.jordan_blocks.push_back({eigenvalue, chain.size()});
    qp = append_chains(std::move(qp), basis, chains);
  }

  Matrix<T> qq(n, 0);
  if (w.q > 0) {
    const Matrix<T> basis = kernel_of_dimension(power(M, w.q), w.q);
    if (basis.cols() != w.q)
      throw ChainConstructionFailure("infinite deflating subspace has dimension " + std::to_string(basis.cols()) +
                                     ", expected " + std::to_string(w.q));
    // F W = G W L on the infinite subspace.
    const auto op = solve_operator(Matrix<T>(G * basis), Matrix<T>(F * basis), tol.rank_rel);
    if (!op) throw ChainConstructionFailure("infinite chain operator not found");
    const auto chains = nilpotent_chains(*op, tol.rank_rel);
    for (const auto& chain : chains) w.nilpotent_blocks.push_back({chain.size()});
    qq = append_chains(std::move(qq), basis, chains);
    w.q_star = w.nilpotent_blocks.front().size;
  }

  w.Q = hstack(qp, qq);
  const auto p_inverse = inverse(hstack(Matrix<T>(F * qp), Matrix<T>(G * qq)), tol.rank_rel);
  if (!p_inverse) throw ChainConstructionFailure("[F Q_p | G Q_q] is singular");
  w.P = *p_inverse;

  const VerificationReport report = verify(pencil, w, tol);
  if constexpr (ScalarTraits<T>::exact) {
    if (!report.exact_zero || !report.q_nonsingular)
      throw ChainConstructionFailure("decomposition failed exact verification");
  } else {
    const double scale = std::max(1.0, w.Jp().max_abs());
    if (!report.ok(std::sqrt(tol.rank_rel) * scale))
      throw ChainConstructionFailure("decomposition residual too large: " + format_double(report.residual_f) +
                                     ", " + format_double(report.residual_g));
  }
  return w;
}

template <FieldScalar T>
VerificationReport verify(const Pencil<T>& pencil, const WeierstrassDecomposition<T>& w, const Tolerances& tol) {
  const Matrix<T> df = w.P * pencil.F() * w.Q - w.Fw();
  const Matrix<T> dg = w.P * pencil.G() * w.Q - w.Gw();
  VerificationReport r;
  r.residual_f = df.max_abs();
  r.residual_g = dg.max_abs();
  r.exact_zero = ScalarTraits<T>::exact && df.is_zero() && dg.is_zero();
  r.p_nonsingular = w.P.is_square() && rank(w.P, tol.rank_rel) == w.P.rows();
  r.q_nonsingular = w.Q.is_square() && rank(w.Q, tol.rank_rel) == w.Q.rows();
  return r;
}

template std::vector<JordanBlockSpec<Rational>> canonical_jordan_specs(std::vector<JordanBlockSpec<Rational>>);
template std::vector<JordanBlockSpec<Complex>> canonical_jordan_specs(std::vector<JordanBlockSpec<Complex>>);
template WeierstrassDecomposition<Rational> decompose(const Pencil<Rational>&, const Tolerances&);
template WeierstrassDecomposition<Complex> decompose(const Pencil<Complex>&, const Tolerances&);
template VerificationReport verify(const Pencil<Rational>&, const WeierstrassDecomposition<Rational>&,
                                   const Tolerances&);
template VerificationReport verify(const Pencil<Complex>&, const WeierstrassDecomposition<Complex>&,
                                   const Tolerances&);

}  // namespace dkit
