#pragma once

// Newton polygons, Hensel lifting, and the certified integral splitting
// M = M^0 + M^1 + M^2 with F acting as q^s times a unit on each block.
// Everything works modulo p^N; "Q_p-ordinary" (a Newton polygon fact) and
// "integrally split" (the stronger claim) are kept strictly separate.

#include <k3frob/weil.hpp>

#include <array>
#include <map>
#include <optional>
#include <utility>

namespace k3frob {

struct ZeroConstantTermError : std::runtime_error {
  ZeroConstantTermError() : std::runtime_error("polynomial has zero constant term") {}
};
struct NotUnimodularError : std::runtime_error {
  explicit NotUnimodularError(const std::string& m = "form is not unimodular over Z_p")
      : std::runtime_error(m) {}
};
struct NotIsotropicError : std::runtime_error {
  NotIsotropicError() : std::runtime_error("vector is not isotropic") {}
};

enum class SplitFailure { NotOrdinary, Divisibility, PrecisionInsufficient };

struct SplitError : std::runtime_error {
  SplitFailure kind;
  SplitError(SplitFailure k, const std::string& m) : std::runtime_error(m), kind(k) {}
};

struct PadicPrecision {
  Int p;
  unsigned long N = 1;
  PadicPrecision(Int prime, unsigned long digits) : p(std::move(prime)), N(digits) {
    if (N == 0) throw std::domain_error("precision N must be positive");
  }
  Int modulus() const { return int_pow(p, N); }
};

// ---- Newton polygon ----

struct NewtonPolygon {
  // hull segments with strictly increasing slopes; lengths sum to deg P
  std::vector<std::pair<Rat, unsigned long>> segments;

  // multiset of root valuations: a segment of slope -m and length l
  // contributes l roots of valuation m
  std::map<Rat, unsigned long> root_valuations() const {
    std::map<Rat, unsigned long> r;
    for (const auto& [slope, len] : segments) r[-slope] += len;
    return r;
  }
};

inline NewtonPolygon newton_polygon(const IntPoly& p, const Int& prime) {
  if (p.is_zero() || !p.is_monic()) throw NotMonicError();
  if (p[0] == 0) throw ZeroConstantTermError();
  long n = p.degree();
  // points (i, v_p(c_i)) for nonzero c_i; lower convex hull left to right
  std::vector<std::pair<long, long>> pts;
  for (long i = 0; i <= n; ++i) {
    const Int& c = p[static_cast<std::size_t>(i)];
    if (c == 0) continue;
    pts.emplace_back(i, static_cast<long>(p_valuation(c, prime)));
  }
  std::vector<std::pair<long, long>> hull;
  for (const auto& pt : pts) {
    while (hull.size() >= 2) {
      auto& a = hull[hull.size() - 2];
      auto& b = hull[hull.size() - 1];
      // keep b only if it lies strictly below segment a-pt
      if ((b.second - a.second) * (pt.first - a.first) <
          (pt.second - a.second) * (b.first - a.first))
        break;
      hull.pop_back();
    }
    hull.push_back(pt);
  }
  NewtonPolygon np;
  for (std::size_t i = 1; i < hull.size(); ++i) {
    Rat slope(Int(hull[i].second - hull[i - 1].second), Int(hull[i].first - hull[i - 1].first));
    slope.canonicalize();
    np.segments.emplace_back(slope, static_cast<unsigned long>(hull[i].first - hull[i - 1].first));
  }
  return np;
}

inline bool is_ordinary_k3_shape(const NewtonPolygon& np, unsigned long a) {
  auto v = np.root_valuations();
  std::map<Rat, unsigned long> want{{Rat(0), 1}, {Rat(Int(a)), 20}, {Rat(Int(2 * a)), 1}};
  return v == want;
}

// Generalized target shape (r0, r1, r2) read off the polygon; nullopt when
// some root valuation is outside {0, a, 2a}.
inline std::optional<std::array<unsigned long, 3>> shape_from_polygon(const NewtonPolygon& np,
                                                                      unsigned long a) {
  std::array<unsigned long, 3> shape{0, 0, 0};
  for (const auto& [val, mult] : np.root_valuations()) {
    if (val == 0)
      shape[0] += mult;
    else if (val == Rat(Int(a)))
      shape[1] += mult;
    else if (val == Rat(Int(2 * a)))
      shape[2] += mult;
    else
      return std::nullopt;
  }
  return shape;
}

// ---- arithmetic mod p^k ----

namespace detail {

inline IntMatrix reduce_mod(const IntMatrix& m, const Int& mod) {
  IntMatrix r = m;
  for (std::size_t i = 0; i < r.rows(); ++i)
    for (std::size_t j = 0; j < r.cols(); ++j) r(i, j) = mod_floor(r(i, j), mod);
  return r;
}

// Inverse of a matrix whose determinant is a unit mod p, computed by
// Gauss-Jordan elimination mod p^N (pivots are the p-unit entries).
inline IntMatrix inverse_mod(const IntMatrix& m, const Int& p, const Int& mod) {
  if (!m.is_square()) throw NonSquareError();
  std::size_t n = m.rows();
  IntMatrix w = reduce_mod(m, mod), inv = IntMatrix::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = n;
    for (std::size_t i = c; i < n; ++i)
      if (w(i, c) % p != 0) {
        piv = i;
        break;
      }
    if (piv == n) throw std::domain_error("inverse_mod: matrix not invertible mod p");
    if (piv != c)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(w(c, j), w(piv, j));
        std::swap(inv(c, j), inv(piv, j));
      }
    Int s = mod_inverse(w(c, c), mod);
    for (std::size_t j = 0; j < n; ++j) {
      w(c, j) = mod_floor(w(c, j) * s, mod);
      inv(c, j) = mod_floor(inv(c, j) * s, mod);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || w(i, c) == 0) continue;
      Int f = w(i, c);
      for (std::size_t j = 0; j < n; ++j) {
        w(i, j) = mod_floor(w(i, j) - f * w(c, j), mod);
        inv(i, j) = mod_floor(inv(i, j) - f * inv(c, j), mod);
      }
    }
  }
  return inv;
}

inline Int det_mod_p(const IntMatrix& m, const Int& p) { return mod_floor(det(m), p); }

// polynomial helpers over Z/mod with monic divisors
using ModPoly = std::vector<Int>;  // ascending, not normalized

inline void mp_trim(ModPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}
inline ModPoly mp_reduce(const IntPoly& p, const Int& mod) {
  ModPoly r(p.coeffs().size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = mod_floor(p.coeffs()[i], mod);
  mp_trim(r);
  return r;
}
inline ModPoly mp_mul(const ModPoly& a, const ModPoly& b, const Int& mod) {
  if (a.empty() || b.empty()) return {};
  ModPoly r(a.size() + b.size() - 1, Int(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = mod_floor(r[i + j] + a[i] * b[j], mod);
  mp_trim(r);
  return r;
}
inline ModPoly mp_sub(const ModPoly& a, const ModPoly& b, const Int& mod) {
  ModPoly r(std::max(a.size(), b.size()), Int(0));
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] = mod_floor(r[i] - b[i], mod);
  for (auto& x : r) x = mod_floor(x, mod);
  mp_trim(r);
  return r;
}
// divmod by a polynomial with unit leading coefficient
inline std::pair<ModPoly, ModPoly> mp_divmod(ModPoly a, const ModPoly& b, const Int& mod) {
  Int linv = mod_inverse(b.back(), mod);
  if (a.size() < b.size()) return {{}, a};
  ModPoly q(a.size() - b.size() + 1, Int(0));
  for (long i = static_cast<long>(a.size()) - 1; i >= static_cast<long>(b.size()) - 1; --i) {
    if (a[i] == 0) continue;
    Int f = mod_floor(a[i] * linv, mod);
    q[i - (b.size() - 1)] = f;
    for (std::size_t j = 0; j < b.size(); ++j)
      a[i - (b.size() - 1) + j] = mod_floor(a[i - (b.size() - 1) + j] - f * b[j], mod);
  }
  mp_trim(a);
  mp_trim(q);
  return {q, a};
}

// Bezout cofactors mod prime p: s*f + t*g = 1, for f, g coprime mod p.
inline std::pair<ModPoly, ModPoly> mp_bezout(const ModPoly& f, const ModPoly& g, const Int& p) {
  ModPoly r0 = f, r1 = g;
  ModPoly s0{Int(1)}, s1{}, t0{}, t1{Int(1)};
  while (!r1.empty()) {
    auto [q, r] = mp_divmod(r0, r1, p);
    ModPoly s2 = mp_sub(s0, mp_mul(q, s1, p), p);
    ModPoly t2 = mp_sub(t0, mp_mul(q, t1, p), p);
    r0 = std::move(r1);
    r1 = std::move(r);
    s0 = std::move(s1);
    s1 = std::move(s2);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (r0.size() != 1) throw std::domain_error("mp_bezout: factors not coprime mod p");
  Int inv = mod_inverse(r0[0], p);
  for (auto& x : s0) x = mod_floor(x * inv, p);
  for (auto& x : t0) x = mod_floor(x * inv, p);
  return {s0, t0};
}

// Linear Hensel lifting of the monic coprime factorization P = f*g from
// mod p to mod p^N.
inline std::pair<ModPoly, ModPoly> hensel_lift(const IntPoly& P, ModPoly f, ModPoly g,
                                               const Int& p, unsigned long N) {
  auto [s, t] = mp_bezout(f, g, p);
  Int pk = p;
  Int target = int_pow(p, N);
  while (pk < target) {
    Int next = pk * p;
    // e = (P - f*g) / pk mod p
    ModPoly fg = mp_mul(f, g, next);
    ModPoly e;
    {
      ModPoly pm = mp_reduce(P, next);
      ModPoly diff = mp_sub(pm, fg, next);
      e.resize(diff.size());
      for (std::size_t i = 0; i < diff.size(); ++i)
        e[i] = mod_floor(exact_div(diff[i], pk), p);
      mp_trim(e);
    }
    if (!e.empty()) {
      ModPoly te = mp_mul(t, e, p);
      auto [c, u] = mp_divmod(te, f, p);
      // w2 = s*e + c*g  (so that u*g + w2*f = e mod p, deg u < deg f)
      ModPoly w = mp_mul(s, e, p);
      ModPoly cg = mp_mul(c, g, p);
      ModPoly w2(std::max(w.size(), cg.size()), Int(0));
      for (std::size_t i = 0; i < w.size(); ++i) w2[i] = w[i];
      for (std::size_t i = 0; i < cg.size(); ++i) w2[i] = mod_floor(w2[i] + cg[i], p);
      mp_trim(w2);
      // f += pk*u, g += pk*w2
      if (f.size() < u.size() + 1) f.resize(u.size(), Int(0));
      for (std::size_t i = 0; i < u.size(); ++i) f[i] = mod_floor(f[i] + pk * u[i], next);
      if (g.size() < w2.size() + 1) g.resize(w2.size(), Int(0));
      for (std::size_t i = 0; i < w2.size(); ++i) g[i] = mod_floor(g[i] + pk * w2[i], next);
    }
    pk = next;
  }
  return {f, g};
}

// Kernel of B (column vectors x with Bx = 0 mod p^N) via Smith-style
// elimination over Z/p^N. Returns the free generators (columns, as rows of
// the result) and whether any elementary divisor had valuation strictly
// between 0 and N (a precision red flag).
struct LocalKernel {
  IntMatrix gens;  // rows = kernel generators in ambient coordinates
  bool clean = true;
};

inline LocalKernel kernel_mod(const IntMatrix& b, const Int& p, unsigned long N) {
  Int mod = int_pow(p, N);
  std::size_t m = b.rows(), n = b.cols();
  IntMatrix w = reduce_mod(b, mod);
  IntMatrix v = IntMatrix::identity(n);  // column transform
  auto val_of = [&](const Int& x) -> unsigned long {
    if (x == 0) return N;
    return std::min<unsigned long>(N, p_valuation(x, p));
  };
  std::size_t k = std::min(m, n);
  std::vector<unsigned long> vals;
  for (std::size_t top = 0; top < k; ++top) {
    std::size_t bi = top, bj = top;
    unsigned long best = N;
    for (std::size_t i = top; i < m; ++i)
      for (std::size_t j = top; j < n; ++j) {
        unsigned long vv = val_of(w(i, j));
        if (vv < best) {
          best = vv;
          bi = i;
          bj = j;
        }
      }
    if (best >= N) break;  // remaining block is zero mod p^N
    for (std::size_t j = 0; j < n; ++j) std::swap(w(top, j), w(bi, j));
    for (std::size_t i = 0; i < m; ++i) std::swap(w(i, top), w(i, bj));
    for (std::size_t i = 0; i < n; ++i) std::swap(v(i, top), v(i, bj));
    Int unit;
    p_valuation(w(top, top), p, &unit);
    Int pv = int_pow(p, best);
    Int uinv = mod_inverse(unit, mod);
    for (std::size_t j = top; j < n; ++j) w(top, j) = mod_floor(w(top, j) * uinv, mod);
    // now w(top, top) = p^best; clear the column (row ops, untracked)
    for (std::size_t i = top + 1; i < m; ++i) {
      if (w(i, top) == 0) continue;
      Int f = exact_div(w(i, top), pv);
      for (std::size_t j = top; j < n; ++j) w(i, j) = mod_floor(w(i, j) - f * w(top, j), mod);
    }
    // clear the row (column ops, tracked in v)
    for (std::size_t j = top + 1; j < n; ++j) {
      if (w(top, j) == 0) continue;
      Int f = exact_div(w(top, j), pv);
      for (std::size_t i = top; i < m; ++i) w(i, j) = mod_floor(w(i, j) - f * w(i, top), mod);
      for (std::size_t i = 0; i < n; ++i) v(i, j) = mod_floor(v(i, j) - f * v(i, top), mod);
    }
    vals.push_back(best);
  }
  LocalKernel out;
  std::vector<std::vector<Int>> gens;
  for (std::size_t j = 0; j < n; ++j) {
    unsigned long vv = j < vals.size() ? vals[j] : N;
    if (vv >= N) {
      std::vector<Int> col(n);
      for (std::size_t i = 0; i < n; ++i) col[i] = v(i, j);
      gens.push_back(std::move(col));
    } else if (vv > 0) {
      out.clean = false;
    }
  }
  out.gens = gens.empty() ? IntMatrix(0, n) : IntMatrix::from_rows(gens);
  return out;
}

}  // namespace detail

// ---- the split certificate ----

struct SplitCertificate {
  IntMatrix b0, b1, b2;  // rows = basis vectors mod p^N in lattice coordinates
  std::array<std::size_t, 3> ranks{0, 0, 0};
  Int p;
  unsigned long N = 1;       // certified modulus exponent for the stated congruences
  unsigned long a = 1;       // q = p^a
  Int stacked_det_mod_p;     // unit witness

  IntMatrix stacked() const {
    std::size_t n = b0.cols();
    std::vector<std::vector<Int>> rows;
    for (std::size_t i = 0; i < b0.rows(); ++i) rows.push_back(b0.row(i));
    for (std::size_t i = 0; i < b1.rows(); ++i) rows.push_back(b1.row(i));
    for (std::size_t i = 0; i < b2.rows(); ++i) rows.push_back(b2.row(i));
    return rows.empty() ? IntMatrix(0, n) : IntMatrix::from_rows(rows);
  }
};

namespace detail {

// Split the slope-0 part off an action matrix mod p^N. Returns row bases
// (unit part, positive part), both presented in the coordinates fm acts on.
inline std::pair<IntMatrix, IntMatrix> split_unit_part(const IntMatrix& fm, const Int& p,
                                                       unsigned long N,
                                                       unsigned long expected_unit_rank) {
  std::size_t n = fm.rows();
  Int mod = int_pow(p, N);
  IntPoly cp = charpoly(fm);
  // reduction mod p: t^k * w(t) with w(0) != 0
  ModPoly cpm = mp_reduce(cp, p);
  std::size_t k = 0;
  while (k < cpm.size() && cpm[k] == 0) ++k;
  std::size_t r0 = cpm.size() - 1 - k;  // degree of the unit factor
  if (r0 != expected_unit_rank)
    throw SplitError(SplitFailure::PrecisionInsufficient,
                     "unit-rank of reduced characteristic polynomial does not match the "
                     "Newton polygon");
  if (r0 == n) return {IntMatrix::identity(n), IntMatrix(0, n)};
  if (r0 == 0) return {IntMatrix(0, n), IntMatrix::identity(n)};
  ModPoly w(cpm.begin() + k, cpm.end());
  {  // make monic mod p
    Int inv = mod_inverse(w.back(), p);
    for (auto& x : w) x = mod_floor(x * inv, p);
  }
  ModPoly tk(k + 1, Int(0));
  tk[k] = 1;
  auto [p0, pplus] = hensel_lift(cp, w, tk, p, N);
  IntPoly p0z{std::vector<Int>(p0.begin(), p0.end())};
  IntPoly ppz{std::vector<Int>(pplus.begin(), pplus.end())};
  IntMatrix m0 = reduce_mod(poly_at_matrix(p0z, fm), mod);
  IntMatrix mp = reduce_mod(poly_at_matrix(ppz, fm), mod);
  LocalKernel k0 = kernel_mod(m0, p, N);   // killed by the unit factor: positive part? no:
  LocalKernel kp = kernel_mod(mp, p, N);
  // ker P0(F) is the slope-0 block, ker P+(F) the positive block
  if (!k0.clean || !kp.clean || k0.gens.rows() != r0 || kp.gens.rows() != n - r0)
    throw SplitError(SplitFailure::PrecisionInsufficient, "kernels mod p^N are not clean");
  return {k0.gens, kp.gens};
}

// Coordinates of the F-image of the rows of `block` in the stacked basis,
// mod p^N. Returns the full coefficient matrix (block.rows x stacked.rows).
inline IntMatrix action_in_basis(const IntMatrix& block, const IntMatrix& f,
                                 const IntMatrix& stacked_inv, const Int& mod) {
  return reduce_mod(block * f.transpose() * stacked_inv, mod);
}

}  // namespace detail

// Theorem A as an algorithm: Hensel-split the slope-0 part, divide the
// positive part by q, recurse. Throws SplitError on failure; the caller
// (see verifier) retries with doubled precision on PrecisionInsufficient.
inline SplitCertificate integral_splitting(const FrobeniusData& fd, const PadicPrecision& prec) {
  const Int& p = prec.p;
  const Int& q = fd.params.q;
  unsigned long a = fd.params.a;
  unsigned long N = prec.N;
  std::size_t n = fd.rank();
  if (N <= 2 * a)
    throw SplitError(SplitFailure::PrecisionInsufficient, "need N > 2a");
  IntPoly cp = charpoly(fd.frob);
  if (cp[0] == 0) throw SplitError(SplitFailure::NotOrdinary, "F is singular");
  NewtonPolygon np = newton_polygon(cp, p);
  auto shape = shape_from_polygon(np, a);
  if (!shape)
    throw SplitError(SplitFailure::NotOrdinary,
                     "Newton polygon has slopes outside {0, a, 2a}");
  auto [r0, r1, r2] = *shape;
  Int modN = int_pow(p, N);

  // level 0: slope-0 block vs everything positive
  auto [b0, bpos] = detail::split_unit_part(detail::reduce_mod(fd.frob, modN), p, N, r0);

  IntMatrix b1(0, n), b2(0, n);
  if (bpos.rows() > 0) {
    // stacked basis and transition to positive-part coordinates
    std::vector<std::vector<Int>> rows;
    for (std::size_t i = 0; i < b0.rows(); ++i) rows.push_back(b0.row(i));
    for (std::size_t i = 0; i < bpos.rows(); ++i) rows.push_back(bpos.row(i));
    IntMatrix stacked = IntMatrix::from_rows(rows);
    if (detail::det_mod_p(stacked, p) == 0)
      throw SplitError(SplitFailure::PrecisionInsufficient, "stacked basis not unimodular mod p");
    IntMatrix sinv = detail::inverse_mod(stacked, p, modN);
    // rows of bpos map under F; coefficients against (b0 | bpos)
    IntMatrix y = detail::action_in_basis(bpos, fd.frob, sinv, modN);
    for (std::size_t i = 0; i < y.rows(); ++i)
      for (std::size_t j = 0; j < r0; ++j)
        if (y(i, j) != 0)
          throw SplitError(SplitFailure::PrecisionInsufficient,
                           "positive part is not F-stable mod p^N");
    std::size_t npos = bpos.rows();
    IntMatrix c(npos, npos);
    for (std::size_t i = 0; i < npos; ++i)
      for (std::size_t j = 0; j < npos; ++j) c(i, j) = y(i, r0 + j);
    // (M4) divisibility: every entry of the restricted action divides by q
    for (std::size_t i = 0; i < npos; ++i)
      for (std::size_t j = 0; j < npos; ++j)
        if (c(i, j) % q != 0)
          throw SplitError(SplitFailure::Divisibility,
                           "entry (" + std::to_string(i) + "," + std::to_string(j) +
                               ") of F restricted to the positive part is not divisible by q");
    unsigned long N1 = N - a;
    Int modN1 = int_pow(p, N1);
    // c maps coordinate rows by lambda -> lambda c; the column-action
    // matrix expected below is its transpose
    IntMatrix g(npos, npos);
    for (std::size_t i = 0; i < npos; ++i)
      for (std::size_t j = 0; j < npos; ++j) g(j, i) = mod_floor(exact_div(c(i, j), q), modN1);

    // level 1: slope-0 of G = F/q vs its positive part
    auto [b1loc, b2loc] = detail::split_unit_part(g, p, N1, r1);
    if (b2loc.rows() > 0) {
      // one more division round certifies the q^2 block
      std::vector<std::vector<Int>> rows1;
      for (std::size_t i = 0; i < b1loc.rows(); ++i) rows1.push_back(b1loc.row(i));
      for (std::size_t i = 0; i < b2loc.rows(); ++i) rows1.push_back(b2loc.row(i));
      IntMatrix st1 = IntMatrix::from_rows(rows1);
      if (detail::det_mod_p(st1, p) == 0)
        throw SplitError(SplitFailure::PrecisionInsufficient,
                         "level-1 stacked basis not unimodular mod p");
      IntMatrix st1inv = detail::inverse_mod(st1, p, modN1);
      IntMatrix y1 = detail::action_in_basis(b2loc, g, st1inv, modN1);
      for (std::size_t i = 0; i < y1.rows(); ++i)
        for (std::size_t j = 0; j < b1loc.rows(); ++j)
          if (y1(i, j) != 0)
            throw SplitError(SplitFailure::PrecisionInsufficient,
                             "q^2 block is not G-stable mod p^(N-a)");
      unsigned long N2 = N1 - a;
      Int modN2 = int_pow(p, N2);
      IntMatrix d(b2loc.rows(), b2loc.rows());
      for (std::size_t i = 0; i < d.rows(); ++i)
        for (std::size_t j = 0; j < d.cols(); ++j) {
          Int e = y1(i, b1loc.rows() + j);
          if (e % q != 0)
            throw SplitError(SplitFailure::Divisibility,
                             "second q-division fails on the q^2 block");
          d(i, j) = mod_floor(exact_div(e, q), modN2);
        }
      if (detail::det_mod_p(d, p) == 0)
        throw SplitError(SplitFailure::PrecisionInsufficient,
                         "q^2 block action is not a unit after dividing by q^2");
    }
    // back to ambient coordinates
    if (b1loc.rows() > 0) b1 = detail::reduce_mod(b1loc * bpos, modN);
    if (b2loc.rows() > 0) b2 = detail::reduce_mod(b2loc * bpos, modN);
  }

  SplitCertificate cert;
  cert.b0 = std::move(b0);
  cert.b1 = b1.rows() ? std::move(b1) : IntMatrix(0, n);
  cert.b2 = b2.rows() ? std::move(b2) : IntMatrix(0, n);
  cert.ranks = {cert.b0.rows(), cert.b1.rows(), cert.b2.rows()};
  cert.p = p;
  cert.N = N - 2 * a;  // precision actually certified after two division rounds
  cert.a = a;
  if (cert.ranks[0] != r0 || cert.ranks[1] != r1 || cert.ranks[2] != r2)
    throw SplitError(SplitFailure::PrecisionInsufficient, "certificate ranks do not match polygon");
  cert.stacked_det_mod_p = detail::det_mod_p(cert.stacked(), p);
  if (cert.stacked_det_mod_p == 0)
    throw SplitError(SplitFailure::PrecisionInsufficient, "final stacked basis not unimodular");
  return cert;
}

// Independent re-verification of a certificate: stacked unit determinant
// and F B^s = q^s U_s B^s mod p^N with each U_s a unit.
inline bool verify_certificate(const FrobeniusData& fd, const SplitCertificate& cert) {
  const Int& p = cert.p;
  const Int& q = fd.params.q;
  if (cert.ranks[0] + cert.ranks[1] + cert.ranks[2] != fd.rank()) return false;
  IntMatrix stacked = cert.stacked();
  if (detail::det_mod_p(stacked, p) == 0) return false;
  Int mod = int_pow(p, cert.N);
  IntMatrix sinv = detail::inverse_mod(stacked, p, mod);
  const IntMatrix* blocks[3] = {&cert.b0, &cert.b1, &cert.b2};
  std::size_t offset = 0;
  for (int s = 0; s < 3; ++s) {
    const IntMatrix& b = *blocks[s];
    if (b.rows() == 0) continue;
    IntMatrix y = detail::action_in_basis(b, fd.frob, sinv, mod);
    Int qs = int_pow(q, static_cast<unsigned long>(s));
    Int mods = int_pow(p, cert.N > static_cast<unsigned long>(s) * cert.a
                              ? cert.N - static_cast<unsigned long>(s) * cert.a
                              : 1);
    IntMatrix u(b.rows(), b.rows());
    for (std::size_t i = 0; i < y.rows(); ++i)
      for (std::size_t j = 0; j < y.cols(); ++j) {
        if (j >= offset && j < offset + b.rows()) {
          if (y(i, j) % qs != 0) return false;
          u(i, j - offset) = mod_floor(exact_div(y(i, j), qs), mods);
        } else if (y(i, j) != 0) {
          return false;
        }
      }
    if (detail::det_mod_p(u, p) == 0) return false;
    offset += b.rows();
  }
  return true;
}

// Lemma 3.3 shadow: the Hensel-lifted unit root u of charpoly(F) pairs
// with q^2/u, i.e. P(q^2/u) = 0 to the available precision.
inline bool unit_root_pairing_check(const FrobeniusData& fd, const PadicPrecision& prec) {
  const Int& p = prec.p;
  unsigned long N = prec.N, a = fd.params.a;
  if (N <= 2 * a) throw SplitError(SplitFailure::PrecisionInsufficient, "need N > 2a");
  Int mod = int_pow(p, N);
  IntPoly cp = charpoly(fd.frob);
  if (cp[0] == 0) return false;
  auto shape = shape_from_polygon(newton_polygon(cp, p), a);
  if (!shape || (*shape)[0] != 1) return false;
  // root of the degree-1 unit factor mod p, then Newton iteration
  detail::ModPoly cpm = detail::mp_reduce(cp, p);
  std::size_t k = 0;
  while (k < cpm.size() && cpm[k] == 0) ++k;
  // unit factor is linear: c_k + c_{k+1} t = 0 mod p
  Int r = mod_floor(-cpm[k] * mod_inverse(cpm[k + 1], p), p);
  IntPoly dcp = cp.derivative();
  for (unsigned long reached = 1; reached < N; reached *= 2) {
    Int step_mod = int_pow(p, std::min(N, 2 * reached));
    Int fr = mod_floor(cp.eval(r), step_mod);
    Int dfr = dcp.eval(r);
    r = mod_floor(r - fr * mod_inverse(dfr, step_mod), step_mod);
  }
  // cleared-denominator evaluation: sum c_i q^(2i) r^(n-i)
  std::size_t n = static_cast<std::size_t>(cp.degree());
  Int s = 0, q2 = fd.params.q * fd.params.q;
  Int q2pow = 1;
  for (std::size_t i = 0; i <= n; ++i) {
    Int rpow;
    mpz_powm_ui(rpow.get_mpz_t(), r.get_mpz_t(), static_cast<unsigned long>(n - i),
                mod.get_mpz_t());
    s = mod_floor(s + cp[i] * q2pow * rpow, mod);
    q2pow = mod_floor(q2pow * q2, mod);
  }
  Int check_mod = int_pow(p, N - 2 * a);
  return mod_floor(s, check_mod) == 0;
}

// Lemma 2.5 recipe: complementary isotropic vector for an even unimodular
// rank-2 form over Z_p. Returns v with <v,v> = 0 mod p^N and <L,v> a unit.
inline std::vector<Int> hyperbolic_complement(const IntMatrix& gram2, const std::vector<Int>& l,
                                              const PadicPrecision& prec) {
  if (gram2.rows() != 2 || gram2.cols() != 2 || !gram2.is_symmetric())
    throw DimensionMismatchError();
  if (l.size() != 2) throw DimensionMismatchError();
  const Int& p = prec.p;
  Int d2 = det(gram2);
  if (d2 == 0 || d2 % p == 0) throw NotUnimodularError();
  if (p == 2 && (gram2(0, 0) % 2 != 0 || gram2(1, 1) % 2 != 0))
    throw NotUnimodularError("p = 2 requires an even Gram matrix");
  if (gcd(l[0], l[1]) != 1) throw std::domain_error("isotropic vector must be primitive");
  auto pair2 = [&gram2](const std::vector<Int>& x, const std::vector<Int>& y) {
    Int r = 0;
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) r += x[i] * gram2(i, j) * y[j];
    return r;
  };
  if (pair2(l, l) != 0) throw NotIsotropicError();
  // complete l to a basis with a unimodular partner
  Int g, s, t;
  mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), l[0].get_mpz_t(), l[1].get_mpz_t());
  std::vector<Int> f{-t, s};  // det [l; f] = 1
  Int d = pair2(l, f);
  if (d % p == 0) throw NotUnimodularError();
  Int c = pair2(f, f);
  Int mod = prec.modulus();
  Int tt;
  if (p == 2) {
    // c is even; solve t*d = -c/2 mod 2^(N-1)
    Int half = int_pow(p, prec.N - 1 ? prec.N - 1 : 1);
    tt = mod_floor(-exact_div(c, Int(2)) * mod_inverse(d, half), half);
  } else {
    tt = mod_floor(-c * mod_inverse(Int(2) * d, mod), mod);
  }
  std::vector<Int> v{mod_floor(f[0] + tt * l[0], mod), mod_floor(f[1] + tt * l[1], mod)};
  return v;
}

}  // namespace k3frob
