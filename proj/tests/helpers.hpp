#pragma once

// Shared test utilities: deterministic RNG, random lattice isometries,
// and the floating-point / brute-force oracles used to cross-check the
// exact paths. Floating point lives only here, never in the library.

#include <k3frob/verifier.hpp>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <complex>
#include <random>

namespace k3frob::testing {

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(0x5eed5eed5eedULL);
  return gen;
}

inline long rand_int(long lo, long hi) {
  std::uniform_int_distribution<long> d(lo, hi);
  return d(rng());
}

inline IntMatrix random_matrix(std::size_t n, long lo, long hi) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rand_int(lo, hi);
  return m;
}

// random unimodular matrix: a product of elementary row operations
inline IntMatrix random_unimodular(std::size_t n, unsigned ops = 12, long coeff = 2) {
  IntMatrix m = IntMatrix::identity(n);
  for (unsigned k = 0; k < ops; ++k) {
    std::size_t i = static_cast<std::size_t>(rand_int(0, static_cast<long>(n) - 1));
    std::size_t j = static_cast<std::size_t>(rand_int(0, static_cast<long>(n) - 1));
    if (i == j) continue;
    Int c = rand_int(-coeff, coeff);
    for (std::size_t t = 0; t < n; ++t) m(i, t) += c * m(j, t);
  }
  return m;
}

// complex eigenvalues via Eigen (oracle only)
inline std::vector<std::complex<double>> eigen_roots(const IntPoly& p) {
  long n = p.degree();
  if (n <= 0) return {};
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  double lead = p.leading().get_d();
  for (long i = 0; i < n; ++i) companion(i, n - 1) = -p[static_cast<std::size_t>(i)].get_d() / lead;
  for (long i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
  std::vector<std::complex<double>> roots;
  for (long i = 0; i < n; ++i) roots.push_back(es.eigenvalues()[i]);
  return roots;
}

// all (-2)-vectors of the K3 lattice contained in one of the standard
// summands, a convenient pool of roots whose reflections generate a
// finite group when restricted to the definite summands
inline const std::vector<std::vector<Int>>& k3_root_pool() {
  static const std::vector<std::vector<Int>> pool = [] {
    Lattice k3 = k3_lattice();
    std::vector<std::vector<Int>> roots;
    // one root per U summand
    for (std::size_t u = 0; u < 3; ++u) {
      std::vector<Int> v(22, Int(0));
      v[2 * u] = 1;
      v[2 * u + 1] = -1;
      roots.push_back(v);
    }
    // all 240 roots of each E8(-1) summand
    Lattice e8 = e8_minus();
    auto e8_roots = definite_short_vectors(e8.gram, Int(-2));
    for (std::size_t copy = 0; copy < 2; ++copy) {
      std::size_t off = 6 + 8 * copy;
      for (const auto& r : e8_roots) {
        std::vector<Int> v(22, Int(0));
        for (std::size_t i = 0; i < 8; ++i) v[off + i] = r[i];
        roots.push_back(v);
      }
    }
    return roots;
  }();
  return pool;
}

// random product of <= max_reflections reflections in pool roots; finite
// order because each factor lives in W(E8) x W(E8) x (Z/2)^3
inline IntMatrix random_finite_isometry(unsigned max_reflections = 10) {
  Lattice k3 = k3_lattice();
  const auto& pool = k3_root_pool();
  IntMatrix s = IntMatrix::identity(22);
  unsigned count = static_cast<unsigned>(rand_int(1, max_reflections));
  for (unsigned i = 0; i < count; ++i) {
    const auto& delta = pool[static_cast<std::size_t>(rand_int(0, static_cast<long>(pool.size()) - 1))];
    s = s * reflection_matrix(k3, delta);
  }
  return s;
}

// brute-force short-vector oracle: box search with per-coordinate radius
// x_i^2 <= |target| * (Q^{-1})_ii for the positive definite negation Q
inline std::vector<std::vector<Int>> brute_short_vectors(const IntMatrix& gram_neg,
                                                         const Int& target) {
  std::size_t n = gram_neg.rows();
  // rational inverse of Q = -gram via adjugate / det
  RatMatrix q(n, std::vector<Rat>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) q[i][j] = Rat(-gram_neg(i, j));
  // invert by Gauss-Jordan
  RatMatrix inv(n, std::vector<Rat>(n, Rat(0)));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
  RatMatrix w = q;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && w[piv][c] == 0) ++piv;
    if (piv >= n) throw std::logic_error("brute_short_vectors: singular form");
    std::swap(w[c], w[piv]);
    std::swap(inv[c], inv[piv]);
    Rat pv = w[c][c];
    for (std::size_t j = 0; j < n; ++j) {
      w[c][j] /= pv;
      inv[c][j] /= pv;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || w[i][c] == 0) continue;
      Rat f = w[i][c];
      for (std::size_t j = 0; j < n; ++j) {
        w[i][j] -= f * w[c][j];
        inv[i][j] -= f * inv[c][j];
      }
    }
  }
  std::vector<long> radius(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rat b = Rat(-target) * inv[i][i];
    Int num = b.get_num(), den = b.get_den();
    radius[i] = isqrt(num / den).get_si() + 1;
  }
  std::vector<std::vector<Int>> out;
  std::vector<Int> x(n, Int(0));
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == n) {
      Int norm = 0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) norm += x[i] * gram_neg(i, j) * x[j];
      if (norm == target) out.push_back(x);
      return;
    }
    for (long v = -radius[k]; v <= radius[k]; ++v) {
      x[k] = v;
      rec(k + 1);
    }
    x[k] = 0;
  };
  rec(0);
  std::sort(out.begin(), out.end());
  return out;
}

// compare sublattices by HNF of their bases (same saturated row span)
inline bool same_row_span(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols() != b.cols()) return false;
  auto ha = hnf(a).first, hb = hnf(b).first;
  // drop zero rows
  auto nonzero_rows = [](const IntMatrix& h) {
    std::vector<std::vector<Int>> rows;
    for (std::size_t i = 0; i < h.rows(); ++i) {
      bool z = true;
      for (std::size_t j = 0; j < h.cols() && z; ++j)
        if (h(i, j) != 0) z = false;
      if (!z) rows.push_back(h.row(i));
    }
    return rows;
  };
  return nonzero_rows(ha) == nonzero_rows(hb);
}

}  // namespace k3frob::testing
