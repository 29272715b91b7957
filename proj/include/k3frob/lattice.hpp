#pragma once

// Integral quadratic lattices and sublattices. Lattices carry a symmetric
// Gram matrix; sublattices are row-span presentations in ambient
// coordinates, with explicit saturation.

#include <k3frob/matrix.hpp>

#include <optional>
#include <string>
#include <utility>

namespace k3frob {

struct DegenerateFormError : std::runtime_error {
  DegenerateFormError() : std::runtime_error("degenerate quadratic form") {}
};

struct Lattice {
  IntMatrix gram;
  std::string label;

  Lattice() = default;
  explicit Lattice(IntMatrix g, std::string lab = "") : gram(std::move(g)), label(std::move(lab)) {
    if (!gram.is_symmetric()) throw std::domain_error("lattice Gram matrix must be symmetric");
  }
  std::size_t rank() const { return gram.rows(); }

  // <x, y> for row vectors x, y in lattice coordinates.
  Int pair(const std::vector<Int>& x, const std::vector<Int>& y) const {
    Int r = 0;
    for (std::size_t i = 0; i < rank(); ++i)
      for (std::size_t j = 0; j < rank(); ++j) r += x[i] * gram(i, j) * y[j];
    return r;
  }
};

inline Lattice hyperbolic_plane() {
  IntMatrix g(2, 2);
  g(0, 1) = 1;
  g(1, 0) = 1;
  return Lattice(std::move(g), "U");
}

// Negated E8 Cartan matrix, Bourbaki node ordering (node 2 is the branch
// node attached to node 4).
inline Lattice e8_minus() {
  static const int cartan[8][8] = {
      {2, 0, -1, 0, 0, 0, 0, 0},  {0, 2, 0, -1, 0, 0, 0, 0},  {-1, 0, 2, -1, 0, 0, 0, 0},
      {0, -1, -1, 2, -1, 0, 0, 0}, {0, 0, 0, -1, 2, -1, 0, 0}, {0, 0, 0, 0, -1, 2, -1, 0},
      {0, 0, 0, 0, 0, -1, 2, -1},  {0, 0, 0, 0, 0, 0, -1, 2}};
  IntMatrix g(8, 8);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) g(i, j) = -cartan[i][j];
  return Lattice(std::move(g), "E8(-1)");
}

inline Lattice direct_sum(const Lattice& a, const Lattice& b) {
  std::size_t n = a.rank(), m = b.rank();
  IntMatrix g(n + m, n + m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) = a.gram(i, j);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) g(n + i, n + j) = b.gram(i, j);
  std::string lab;
  if (!a.label.empty() && !b.label.empty()) lab = a.label + " + " + b.label;
  return Lattice(std::move(g), std::move(lab));
}

inline Lattice twist(const Lattice& a, const Int& s) {
  if (s == 0) throw std::domain_error("twist by zero");
  return Lattice(a.gram * s, a.label.empty() ? "" : a.label + "(" + s.get_str() + ")");
}

// U + U + U + E8(-1) + E8(-1), rank 22.
inline Lattice k3_lattice() {
  Lattice u = hyperbolic_plane(), e8 = e8_minus();
  Lattice l = direct_sum(direct_sum(u, u), u);
  l = direct_sum(direct_sum(l, e8), e8);
  l.label = "K3";
  return l;
}

inline bool is_even(const Lattice& l) {
  for (std::size_t i = 0; i < l.rank(); ++i)
    if (l.gram(i, i) % 2 != 0) return false;
  return true;
}

inline bool is_unimodular(const Lattice& l) { return abs(det(l.gram)) == 1; }

// Exact signature by symmetric rational elimination; a vanishing diagonal
// pivot with a nonzero off-diagonal entry is handled by the 2x2 hyperbolic
// block rule (contributes (1,1)).
inline std::pair<std::size_t, std::size_t> signature(const Lattice& l) {
  std::size_t n = l.rank();
  RatMatrix a(n, std::vector<Rat>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] = Rat(l.gram(i, j));
  std::vector<bool> done(n, false);
  std::size_t pos = 0, neg = 0, handled = 0;
  while (handled < n) {
    // prefer a nonzero diagonal pivot
    std::size_t pi = n;
    for (std::size_t i = 0; i < n; ++i)
      if (!done[i] && a[i][i] != 0) {
        pi = i;
        break;
      }
    if (pi < n) {
      (sign_of(a[pi][pi]) > 0 ? pos : neg) += 1;
      Rat piv = a[pi][pi];
      done[pi] = true;
      ++handled;
      // Schur complement against the 1x1 pivot block
      for (std::size_t i = 0; i < n; ++i) {
        if (done[i] || a[i][pi] == 0) continue;
        for (std::size_t j = 0; j < n; ++j)
          if (!done[j]) a[i][j] -= a[i][pi] * a[pi][j] / piv;
      }
      continue;
    }
    // all remaining diagonal entries vanish; find an off-diagonal entry
    std::size_t bi = n, bj = n;
    for (std::size_t i = 0; i < n && bi == n; ++i) {
      if (done[i]) continue;
      for (std::size_t j = 0; j < n; ++j)
        if (!done[j] && j != i && a[i][j] != 0) {
          bi = i;
          bj = j;
          break;
        }
    }
    if (bi == n) throw DegenerateFormError();
    Rat b = a[bi][bj];
    pos += 1;
    neg += 1;
    done[bi] = done[bj] = true;
    handled += 2;
    // Schur complement against the hyperbolic 2x2 block [[0,b],[b,0]]
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      Rat fi = a[i][bi] / b, fj = a[i][bj] / b;
      for (std::size_t j = 0; j < n; ++j) {
        if (done[j]) continue;
        a[i][j] -= fi * a[bj][j] + fj * a[bi][j];
      }
    }
  }
  return {pos, neg};
}

struct Sublattice {
  const Lattice* ambient = nullptr;
  IntMatrix basis;  // rows are vectors in ambient coordinates
  bool saturated = false;

  Sublattice() = default;
  Sublattice(const Lattice& amb, IntMatrix b) : ambient(&amb), basis(std::move(b)) {
    if (basis.cols() != amb.rank()) throw DimensionMismatchError();
  }
  std::size_t rank() const { return basis.rows(); }

  // Gram matrix of the pairing restricted to the basis rows.
  IntMatrix restricted_gram() const {
    return basis * ambient->gram * basis.transpose();
  }
};

// Saturation: (S tensor Q) intersected with the ambient lattice, computed
// as the double orthogonal complement for the standard dot product.
inline Sublattice saturate(const Sublattice& s) {
  IntMatrix perp = integer_kernel(s.basis);
  IntMatrix sat = integer_kernel(perp);
  Sublattice r(*s.ambient, std::move(sat));
  r.saturated = true;
  return r;
}

// Saturated {x in ambient : <x, v> = 0 for all rows v of S}.
inline Sublattice orthogonal_complement(const Sublattice& s) {
  IntMatrix r = integer_kernel(s.basis * s.ambient->gram);
  Sublattice out(*s.ambient, std::move(r));
  out.saturated = true;
  return out;
}

// Reflection in a (-2)-vector: x -> x + <x, delta> delta (row vectors).
inline IntMatrix reflection_matrix(const Lattice& l, const std::vector<Int>& delta) {
  std::size_t n = l.rank();
  IntMatrix s = IntMatrix::identity(n);
  // row vector x maps to x * S, so S(i, j) = delta_j <e_i, delta> + delta_ij
  for (std::size_t i = 0; i < n; ++i) {
    Int pi = 0;
    for (std::size_t j = 0; j < n; ++j) pi += l.gram(i, j) * delta[j];
    for (std::size_t j = 0; j < n; ++j) s(i, j) += pi * delta[j];
  }
  return s;
}

}  // namespace k3frob
