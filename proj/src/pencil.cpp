#include "dkit/pencil.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "dkit/linalg.hpp"

namespace dkit {

bool eigenvalue_less(const Rational& a, const Rational& b) {
  const int c = cmp(a.get_num(), b.get_num());
  if (c != 0) return c < 0;
  return a.get_den() < b.get_den();
}

bool eigenvalue_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

template <FieldScalar T>
T CharPoly<T>::operator()(const T& s) const {
  T acc(0);
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * s + *it;
  return acc;
}

namespace {

// Newton divided differences on nodes 0..d, expanded into monomial form.
template <FieldScalar T>
std::vector<T> interpolate_on_integers(std::vector<T> values) {
  const std::size_t count = values.size();
  for (std::size_t level = 1; level < count; ++level)
    for (std::size_t i = count - 1; i >= level; --i) {
      values[i] = (values[i] - values[i - 1]) / ScalarTraits<T>::from_int(static_cast<long>(level));
      if (i == level) break;
    }
  std::vector<T> poly{values[count - 1]};
  for (std::size_t k = count - 1; k-- > 0;) {
    // poly <- poly * (s - k) + values[k]
    const T node = ScalarTraits<T>::from_int(static_cast<long>(k));
    std::vector<T> next(poly.size() + 1, T(0));
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i + 1] += poly[i];
      next[i] -= node * poly[i];
    }
    next[0] += values[k];
    poly = std::move(next);
  }
  return poly;
}

double hadamard_bound(const Matrix<Complex>& m) {
  double bound = 1.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) row += std::norm(m(i, j));
    bound *= std::sqrt(row);
  }
  return bound;
}

template <FieldScalar T>
std::vector<T> sampled_determinants(const Pencil<T>& pencil) {
  std::vector<T> values;
  values.reserve(pencil.n() + 1);
  for (std::size_t i = 0; i <= pencil.n(); ++i)
    values.push_back(determinant(pencil.at(ScalarTraits<T>::from_int(static_cast<long>(i)))));
  return values;
}

bool float_determinants_vanish(const Pencil<Complex>& pencil, const std::vector<Complex>& dets, double rel) {
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const double bound = hadamard_bound(pencil.at(Complex(static_cast<double>(i), 0.0)));
    if (std::abs(dets[i]) > rel * bound) return false;
  }
  return true;
}

// ---- exact rational roots -------------------------------------------------

void factor_into(mpz_class n, std::map<mpz_class, unsigned>& primes);

mpz_class pollard_brent(const mpz_class& n) {
  if (n % 2 == 0) return 2;
  for (unsigned long seed = 1;; ++seed) {
    mpz_class y = seed + 1, c = seed, g = 1, r = 1, q = 1, x, ys;
    const unsigned long m = 64;
    auto f = [&](const mpz_class& v) { return mpz_class((v * v + c) % n); };
    do {
      x = y;
      for (mpz_class i = 0; i < r; ++i) y = f(y);
      mpz_class k = 0;
      do {
        ys = y;
        for (unsigned long i = 0; i < m && k + i < r; ++i) {
          y = f(y);
          mpz_class diff = abs(x - y);
          q = (q * diff) % n;
        }
        g = gcd(q, n);
        k += m;
      } while (k < r && g == 1);
      r *= 2;
    } while (g == 1);
    if (g == n) {
      do {
        ys = f(ys);
        g = gcd(mpz_class(abs(x - ys)), n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void factor_into(mpz_class n, std::map<mpz_class, unsigned>& primes) {
  if (n <= 1) return;
  for (unsigned long d = 2; d < 100000; d += (d == 2 ? 1 : 2)) {
    if (mpz_class(d) * d > n) break;
    while (n % d == 0) {
      ++primes[mpz_class(d)];
      n /= d;
    }
  }
  if (n == 1) return;
  if (mpz_probab_prime_p(n.get_mpz_t(), 30) != 0) {
    ++primes[n];
    return;
  }
  mpz_class d = pollard_brent(n);
  factor_into(d, primes);
  factor_into(mpz_class(n / d), primes);
}

std::vector<mpz_class> positive_divisors(const mpz_class& value) {
  std::map<mpz_class, unsigned> primes;
  factor_into(abs(value), primes);
  std::vector<mpz_class> divisors{1};
  for (const auto& [prime, exponent] : primes) {
    const std::size_t existing = divisors.size();
    mpz_class power = 1;
    for (unsigned e = 0; e < exponent; ++e) {
      power *= prime;
      for (std::size_t i = 0; i < existing; ++i) divisors.push_back(divisors[i] * power);
    }
  }
  return divisors;
}

// Divides by (s - root); returns false and leaves poly untouched when the remainder is nonzero.
bool deflate(std::vector<Rational>& poly, const Rational& root) {
  std::vector<Rational> quotient(poly.size() - 1);
  Rational carry = 0;
  for (std::size_t i = poly.size(); i-- > 1;) {
    carry = carry * root + poly[i];
    quotient[i - 1] = carry;
  }
  if (carry * root + poly[0] != 0) return false;
  poly = std::move(quotient);
  return true;
}

std::vector<EigenvalueMultiplicity<Rational>> rational_roots(const std::vector<Rational>& coefficients) {
  std::vector<Rational> poly = coefficients;
  std::vector<EigenvalueMultiplicity<Rational>> roots;

  std::size_t zero_mult = 0;
  while (poly.size() > 1 && poly.front() == 0) {
    poly.erase(poly.begin());
    ++zero_mult;
  }
  if (zero_mult > 0) roots.push_back({Rational(0), zero_mult});
  if (poly.size() <= 1) return roots;

  // Clear denominators: candidates p/q have p | a_0 and q | a_d.
  mpz_class lcm_den = 1;
  for (const auto& c : poly) lcm_den = lcm(lcm_den, mpz_class(c.get_den()));
  const mpz_class a0(Rational(poly.front() * lcm_den));
  const mpz_class ad(Rational(poly.back() * lcm_den));
  const auto numerators = positive_divisors(a0);
  const auto denominators = positive_divisors(ad);

  std::vector<Rational> candidates;
  for (const auto& num : numerators)
    for (const auto& den : denominators) {
      Rational r(num, den);
      r.canonicalize();
      candidates.push_back(r);
      candidates.push_back(-r);
    }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  for (const auto& r : candidates) {
    std::size_t mult = 0;
    while (poly.size() > 1 && deflate(poly, r)) ++mult;
    if (mult > 0) roots.push_back({r, mult});
    if (poly.size() <= 1) break;
  }
  if (poly.size() > 1)
    throw UnresolvableSpectrum("characteristic polynomial has a factor of degree " +
                               std::to_string(poly.size() - 1) +
                               " without rational roots; rerun with --mode float");
  return roots;
}

std::vector<EigenvalueMultiplicity<Complex>> clustered_roots(const std::vector<Complex>& coefficients,
                                                             double radius) {
  const std::size_t degree = coefficients.size() - 1;
  std::vector<EigenvalueMultiplicity<Complex>> out;
  if (degree == 0) return out;
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(degree),
                                                      static_cast<Eigen::Index>(degree));
  const Complex lead = coefficients.back();
  for (std::size_t i = 0; i < degree; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    companion(row, static_cast<Eigen::Index>(degree - 1)) = -coefficients[i] / lead;
    if (i > 0) companion(row, row - 1) = 1.0;
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  std::vector<Complex> roots(solver.eigenvalues().begin(), solver.eigenvalues().end());

  // Single-linkage clustering: roots chained within `radius` share a cluster.
  std::vector<std::size_t> parent(roots.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < roots.size(); ++i)
    for (std::size_t j = i + 1; j < roots.size(); ++j)
      if (std::abs(roots[i] - roots[j]) < radius) parent[find(i)] = find(j);

  std::map<std::size_t, std::pair<Complex, std::size_t>> clusters;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    auto& [sum, count] = clusters[find(i)];
    sum += roots[i];
    ++count;
  }
  for (const auto& [root, entry] : clusters) {
    Complex mean = entry.first / static_cast<double>(entry.second);
    // Snap tiny parts left over from conjugate pairs of real roots.
    if (std::abs(mean.imag()) < radius) mean.imag(0.0);
    if (std::abs(mean.real()) < radius) mean.real(0.0);
    out.push_back({mean, entry.second});
  }
  return out;
}

}  // namespace

template <FieldScalar T>
CharPoly<T> char_poly(const Pencil<T>& pencil, const Tolerances& tol) {
  CharPoly<T> cp;
  cp.n = pencil.n();
  const auto dets = sampled_determinants(pencil);
  if constexpr (ScalarTraits<T>::exact) {
    if (std::all_of(dets.begin(), dets.end(), [](const Rational& d) { return d == 0; })) return cp;
    cp.coefficients = interpolate_on_integers(dets);
    while (!cp.coefficients.empty() && cp.coefficients.back() == 0) cp.coefficients.pop_back();
  } else {
    if (float_determinants_vanish(pencil, dets, tol.zero_rel)) return cp;
    cp.coefficients = interpolate_on_integers(dets);
    double largest = 0.0;
    for (const auto& c : cp.coefficients) largest = std::max(largest, std::abs(c));
    while (!cp.coefficients.empty() && std::abs(cp.coefficients.back()) <= tol.zero_rel * largest)
      cp.coefficients.pop_back();
  }
  cp.p = cp.coefficients.size() - 1;
  cp.q = cp.n - cp.p;
  return cp;
}

template <FieldScalar T>
bool is_regular(const Pencil<T>& pencil, const Tolerances& tol) {
  return !char_poly(pencil, tol).identically_zero();
}

template <FieldScalar T>
std::vector<EigenvalueMultiplicity<T>> finite_eigenvalues(const CharPoly<T>& cp, const Tolerances& tol) {
  if (cp.identically_zero()) throw IrregularPencil("characteristic polynomial is identically zero");
  std::vector<EigenvalueMultiplicity<T>> roots;
  if constexpr (ScalarTraits<T>::exact)
    roots = rational_roots(cp.coefficients);
  else
    roots = clustered_roots(cp.coefficients, tol.cluster_radius);
  std::sort(roots.begin(), roots.end(),
            [](const auto& a, const auto& b) { return eigenvalue_less(a.value, b.value); });
  return roots;
}

template struct CharPoly<Rational>;
template struct CharPoly<Complex>;
template CharPoly<Rational> char_poly(const Pencil<Rational>&, const Tolerances&);
template CharPoly<Complex> char_poly(const Pencil<Complex>&, const Tolerances&);
template bool is_regular(const Pencil<Rational>&, const Tolerances&);
template bool is_regular(const Pencil<Complex>&, const Tolerances&);
template std::vector<EigenvalueMultiplicity<Rational>> finite_eigenvalues(const CharPoly<Rational>&,
                                                                          const Tolerances&);
template std::vector<EigenvalueMultiplicity<Complex>> finite_eigenvalues(const CharPoly<Complex>&,
                                                                         const Tolerances&);

}  // namespace dkit
