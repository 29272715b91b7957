#pragma once

// Exact integer matrices: division-free characteristic polynomial
// (Berkowitz), Hermite and Smith normal forms, saturated integer kernels,
// minimal polynomials, and the rational solvers used for sublattice
// coordinates. Lattices elsewhere are always presented as row spans.

#include <k3frob/poly.hpp>

#include <cassert>
#include <stdexcept>
#include <utility>
#include <vector>

namespace k3frob {

struct NonSquareError : std::runtime_error {
  NonSquareError() : std::runtime_error("matrix is not square") {}
};
struct DimensionMismatchError : std::runtime_error {
  DimensionMismatchError() : std::runtime_error("matrix dimension mismatch") {}
};

class IntMatrix {
 public:
  IntMatrix() : rows_(0), cols_(0) {}
  IntMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), e_(rows * cols, Int(0)) {}
  IntMatrix(std::size_t rows, std::size_t cols, std::vector<Int> entries)
      : rows_(rows), cols_(cols), e_(std::move(entries)) {
    if (e_.size() != rows_ * cols_) throw DimensionMismatchError();
  }
  static IntMatrix identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }
  static IntMatrix from_rows(const std::vector<std::vector<Int>>& rows) {
    std::size_t r = rows.size(), c = r ? rows[0].size() : 0;
    IntMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
      if (rows[i].size() != c) throw DimensionMismatchError();
      for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }
  Int& operator()(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
  const Int& operator()(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }
  const std::vector<Int>& entries() const { return e_; }

  friend bool operator==(const IntMatrix& a, const IntMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.e_ == b.e_;
  }

  IntMatrix transpose() const {
    IntMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols_ != b.rows_) throw DimensionMismatchError();
    IntMatrix r(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        if (a(i, k) == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) r(i, j) += a(i, k) * b(k, j);
      }
    return r;
  }
  friend IntMatrix operator+(const IntMatrix& a, const IntMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DimensionMismatchError();
    IntMatrix r = a;
    for (std::size_t i = 0; i < r.e_.size(); ++i) r.e_[i] += b.e_[i];
    return r;
  }
  friend IntMatrix operator-(const IntMatrix& a, const IntMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DimensionMismatchError();
    IntMatrix r = a;
    for (std::size_t i = 0; i < r.e_.size(); ++i) r.e_[i] -= b.e_[i];
    return r;
  }
  friend IntMatrix operator*(const IntMatrix& a, const Int& s) {
    IntMatrix r = a;
    for (auto& x : r.e_) x *= s;
    return r;
  }

  IntMatrix pow(unsigned long k) const {
    if (!is_square()) throw NonSquareError();
    IntMatrix r = identity(rows_), b = *this;
    while (k) {
      if (k & 1) r = r * b;
      b = (k >>= 1) ? b * b : b;
    }
    return r;
  }

  Int trace() const {
    if (!is_square()) throw NonSquareError();
    Int t = 0;
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
  }

  bool is_symmetric() const {
    if (!is_square()) return false;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = i + 1; j < cols_; ++j)
        if ((*this)(i, j) != (*this)(j, i)) return false;
    return true;
  }

  std::vector<Int> row(std::size_t i) const {
    return std::vector<Int>(e_.begin() + i * cols_, e_.begin() + (i + 1) * cols_);
  }

 private:
  std::size_t rows_, cols_;
  std::vector<Int> e_;
};

// Exact determinant by fraction-free (Bareiss) elimination.
inline Int det(const IntMatrix& a) {
  if (!a.is_square()) throw NonSquareError();
  std::size_t n = a.rows();
  if (n == 0) return 1;
  IntMatrix m = a;
  Int prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t s = k + 1;
      while (s < n && m(s, k) == 0) ++s;
      if (s == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(s, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        m(i, j) = exact_div(m(i, j) * m(k, k) - m(i, k) * m(k, j), prev);
    prev = m(k, k);
  }
  return sign > 0 ? m(n - 1, n - 1) : -m(n - 1, n - 1);
}

// det(tI - A), monic, by the division-free Berkowitz algorithm.
inline IntPoly charpoly(const IntMatrix& a) {
  if (!a.is_square()) throw NonSquareError();
  std::size_t n = a.rows();
  // coefficients highest-degree first; starts as the constant 1
  std::vector<Int> p{Int(1)};
  for (std::size_t r = 1; r <= n; ++r) {
    // leading principal (r-1)x(r-1) block, bordered by row R and column S
    std::vector<Int> seq(r + 1);
    seq[0] = 1;
    seq[1] = -a(r - 1, r - 1);
    std::vector<Int> v(r - 1);
    for (std::size_t i = 0; i + 1 < r; ++i) v[i] = a(i, r - 1);
    for (std::size_t k = 2; k <= r; ++k) {
      Int dot = 0;
      for (std::size_t i = 0; i + 1 < r; ++i) dot += a(r - 1, i) * v[i];
      seq[k] = -dot;
      if (k < r) {
        std::vector<Int> w(r - 1, Int(0));
        for (std::size_t i = 0; i + 1 < r; ++i)
          for (std::size_t j = 0; j + 1 < r; ++j) w[i] += a(i, j) * v[j];
        v = std::move(w);
      }
    }
    std::vector<Int> np(r + 1, Int(0));
    for (std::size_t i = 0; i <= r; ++i)
      for (std::size_t j = 0; j < p.size() && j <= i; ++j)
        if (i - j <= r) np[i] += seq[i - j] * p[j];
    p = std::move(np);
  }
  // convert to ascending order (index = power of t)
  std::vector<Int> asc(p.rbegin(), p.rend());
  return IntPoly(std::move(asc));
}

// Row-style Hermite normal form: H = U * A with U unimodular, H upper
// echelon with positive pivots and entries above each pivot reduced.
inline std::pair<IntMatrix, IntMatrix> hnf(const IntMatrix& a) {
  std::size_t m = a.rows(), n = a.cols();
  IntMatrix h = a, u = IntMatrix::identity(m);
  std::size_t pr = 0;  // next pivot row
  for (std::size_t c = 0; c < n && pr < m; ++c) {
    // clear entries below the pivot with unimodular 2x2 row combinations
    for (std::size_t i = pr + 1; i < m; ++i) {
      if (h(i, c) == 0) continue;
      Int x = h(pr, c), y = h(i, c), g, s, t;
      mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
      Int xg = exact_div(x, g), yg = exact_div(y, g);
      for (std::size_t j = 0; j < n; ++j) {
        Int hr = h(pr, j), hi = h(i, j);
        h(pr, j) = s * hr + t * hi;
        h(i, j) = xg * hi - yg * hr;
      }
      for (std::size_t j = 0; j < m; ++j) {
        Int ur = u(pr, j), ui = u(i, j);
        u(pr, j) = s * ur + t * ui;
        u(i, j) = xg * ui - yg * ur;
      }
    }
    if (h(pr, c) == 0) continue;  // no pivot in this column
    if (h(pr, c) < 0) {
      for (std::size_t j = 0; j < n; ++j) h(pr, j) = -h(pr, j);
      for (std::size_t j = 0; j < m; ++j) u(pr, j) = -u(pr, j);
    }
    // reduce entries above the pivot
    for (std::size_t i = 0; i < pr; ++i) {
      Int qf;
      mpz_fdiv_q(qf.get_mpz_t(), h(i, c).get_mpz_t(), h(pr, c).get_mpz_t());
      if (qf == 0) continue;
      for (std::size_t j = 0; j < n; ++j) h(i, j) -= qf * h(pr, j);
      for (std::size_t j = 0; j < m; ++j) u(i, j) -= qf * u(pr, j);
    }
    ++pr;
  }
  return {h, u};
}

// Smith normal form invariant factors d1 | d2 | ..., nonnegative; trailing
// zeros for rank deficiency are omitted from the divisibility chain but
// returned (as zeros) so the count equals min(rows, cols).
inline std::vector<Int> snf(const IntMatrix& a) {
  std::size_t m = a.rows(), n = a.cols();
  IntMatrix w = a;
  std::size_t k = std::min(m, n);
  std::vector<Int> d;
  std::size_t top = 0;
  while (top < k) {
    // locate a nonzero entry of minimal absolute value in the working block
    std::size_t bi = top, bj = top;
    bool found = false;
    Int best = 0;
    for (std::size_t i = top; i < m; ++i)
      for (std::size_t j = top; j < n; ++j) {
        if (w(i, j) == 0) continue;
        Int av = abs(w(i, j));
        if (!found || av < best) {
          found = true;
          best = av;
          bi = i;
          bj = j;
        }
      }
    if (!found) break;
    for (std::size_t j = 0; j < n; ++j) std::swap(w(top, j), w(bi, j));
    for (std::size_t i = 0; i < m; ++i) std::swap(w(i, top), w(i, bj));
    bool clean = false;
    while (!clean) {
      clean = true;
      for (std::size_t i = top + 1; i < m; ++i) {
        if (w(i, top) == 0) continue;
        Int qf;
        mpz_fdiv_q(qf.get_mpz_t(), w(i, top).get_mpz_t(), w(top, top).get_mpz_t());
        for (std::size_t j = top; j < n; ++j) w(i, j) -= qf * w(top, j);
        if (w(i, top) != 0) {
          for (std::size_t j = top; j < n; ++j) std::swap(w(top, j), w(i, j));
          clean = false;
        }
      }
      for (std::size_t j = top + 1; j < n; ++j) {
        if (w(top, j) == 0) continue;
        Int qf;
        mpz_fdiv_q(qf.get_mpz_t(), w(top, j).get_mpz_t(), w(top, top).get_mpz_t());
        for (std::size_t i = top; i < m; ++i) w(i, j) -= qf * w(i, top);
        if (w(top, j) != 0) {
          for (std::size_t i = top; i < m; ++i) std::swap(w(i, top), w(i, j));
          clean = false;
        }
      }
      if (clean) {
        // pivot must divide every remaining entry
        for (std::size_t i = top + 1; i < m && clean; ++i)
          for (std::size_t j = top + 1; j < n && clean; ++j)
            if (w(i, j) % w(top, top) != 0) {
              for (std::size_t jj = top; jj < n; ++jj) w(top, jj) += w(i, jj);
              clean = false;
            }
      }
    }
    d.push_back(abs(w(top, top)));
    ++top;
  }
  while (d.size() < k) d.push_back(Int(0));
  return d;
}

// Basis (as rows) of the saturated lattice {x in Z^n : A x^T = 0}.
inline IntMatrix integer_kernel(const IntMatrix& a) {
  auto [h, u] = hnf(a.transpose());
  std::size_t n = a.cols();
  std::vector<std::vector<Int>> ker;
  for (std::size_t i = 0; i < n; ++i) {
    bool zero = true;
    for (std::size_t j = 0; j < h.cols() && zero; ++j)
      if (h(i, j) != 0) zero = false;
    if (zero) ker.push_back(u.row(i));
  }
  if (ker.empty()) return IntMatrix(0, n);
  return IntMatrix::from_rows(ker);
}

// Monic least-degree annihilator of A; integer by Gauss's lemma.
inline IntPoly minimal_poly(const IntMatrix& a) {
  if (!a.is_square()) throw NonSquareError();
  std::size_t n = a.rows();
  if (n == 0) return IntPoly::constant(1);
  std::vector<IntMatrix> powers{IntMatrix::identity(n)};
  for (std::size_t d = 1; d <= n; ++d) {
    powers.push_back(powers.back() * a);
    IntMatrix stack(d + 1, n * n);
    for (std::size_t k = 0; k <= d; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) stack(k, i * n + j) = powers[k](i, j);
    IntMatrix ker = integer_kernel(stack.transpose());
    if (ker.rows() == 0) continue;
    assert(ker.rows() == 1);
    std::vector<Int> c = ker.row(0);
    while (!c.empty() && c.back() == 0) c.pop_back();
    if (c.back() < 0)
      for (auto& x : c) x = -x;
    assert(c.back() == 1);
    return IntPoly(std::move(c));
  }
  throw std::logic_error("minimal_poly: no annihilator up to dimension");
}

// Evaluate an integer polynomial at a square matrix.
inline IntMatrix poly_at_matrix(const IntPoly& p, const IntMatrix& a) {
  if (!a.is_square()) throw NonSquareError();
  std::size_t n = a.rows();
  IntMatrix r(n, n);
  for (long i = p.degree(); i >= 0; --i) {
    r = r * a;
    for (std::size_t k = 0; k < n; ++k) r(k, k) += p[static_cast<std::size_t>(i)];
  }
  return r;
}

// ---- rational solvers ----

using RatMatrix = std::vector<std::vector<Rat>>;

// Solve X * B = V over Q for each row of V (B is k x n, V is m x n).
// Throws std::domain_error if some row of V is not in the row span of B.
inline RatMatrix rat_solve_left(const IntMatrix& b, const RatMatrix& v) {
  std::size_t k = b.rows(), n = b.cols();
  // eliminate on B^T augmented with V^T
  std::size_t m = v.size();
  RatMatrix aug(n, std::vector<Rat>(k + m, Rat(0)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) aug[i][j] = Rat(b(j, i));
    for (std::size_t j = 0; j < m; ++j) aug[i][k + j] = v[j][i];
  }
  std::vector<long> pivot_col_of_row(n, -1);
  std::size_t prow = 0;
  for (std::size_t c = 0; c < k && prow < n; ++c) {
    std::size_t s = prow;
    while (s < n && aug[s][c] == 0) ++s;
    if (s == n) continue;
    std::swap(aug[prow], aug[s]);
    Rat piv = aug[prow][c];
    for (auto& x : aug[prow]) x /= piv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == prow || aug[i][c] == 0) continue;
      Rat f = aug[i][c];
      for (std::size_t j = 0; j < k + m; ++j) aug[i][j] -= f * aug[prow][j];
    }
    pivot_col_of_row[prow] = static_cast<long>(c);
    ++prow;
  }
  for (std::size_t i = prow; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (aug[i][k + j] != 0) throw std::domain_error("rat_solve_left: inconsistent system");
  RatMatrix x(m, std::vector<Rat>(k, Rat(0)));
  for (std::size_t i = 0; i < prow; ++i) {
    long c = pivot_col_of_row[i];
    for (std::size_t j = 0; j < m; ++j) x[j][static_cast<std::size_t>(c)] = aug[i][k + j];
  }
  return x;
}

}  // namespace k3frob
