#pragma once

// Chamber predicates for (M5). A chamber is represented by a rational
// interior point; every predicate reduces to exact sign tests against
// finitely many (-2)-roots, enumerated by Fincke-Pohst with rational
// Cholesky bounds (no floating point).

#include <k3frob/neron_severi.hpp>

#include <algorithm>
#include <functional>

namespace k3frob {

struct NotDefiniteError : std::runtime_error {
  NotDefiniteError() : std::runtime_error("form is not definite") {}
};
struct SameConeError : std::runtime_error {
  SameConeError() : std::runtime_error("points are not in a common positive-cone component") {}
};

// Rational vector as numerators over one positive denominator.
struct RatVector {
  std::vector<Int> num;
  Int den = 1;

  RatVector() = default;
  RatVector(std::vector<Int> numerators, Int denominator)
      : num(std::move(numerators)), den(std::move(denominator)) {
    if (den == 0) throw std::domain_error("RatVector: zero denominator");
    if (den < 0) {
      den = -den;
      for (auto& x : num) x = -x;
    }
    normalize();
  }
  explicit RatVector(std::vector<Int> v) : num(std::move(v)), den(1) {}
  std::size_t size() const { return num.size(); }
  void normalize() {
    Int g = den;
    for (const auto& x : num) g = gcd(g, x);
    if (g > 1) {
      den = exact_div(den, g);
      for (auto& x : num) x = exact_div(x, g);
    }
  }
  Rat at(std::size_t i) const {
    Rat r(num[i], den);
    r.canonicalize();
    return r;
  }
  bool is_zero() const {
    for (const auto& x : num)
      if (x != 0) return false;
    return true;
  }
};

// <x, y> for rational vectors against an integer Gram matrix.
inline Rat pair_rat(const IntMatrix& gram, const RatVector& x, const RatVector& y) {
  Int s = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) s += x.num[i] * gram(i, j) * y.num[j];
  Rat r(s, x.den * y.den);
  r.canonicalize();
  return r;
}
inline Rat pair_rat(const IntMatrix& gram, const RatVector& x, const std::vector<Int>& y) {
  Int s = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) s += x.num[i] * gram(i, j) * y[j];
  Rat r(s, x.den);
  r.canonicalize();
  return r;
}

namespace detail {

// Exact LDL^T of a positive definite rational matrix; throws NotDefinite
// if some pivot fails to be positive.
struct RatLDL {
  std::size_t n;
  RatMatrix l;          // unit lower triangular
  std::vector<Rat> d;   // positive pivots
};

inline RatLDL rat_ldlt(const RatMatrix& q) {
  std::size_t n = q.size();
  RatLDL out{n, RatMatrix(n, std::vector<Rat>(n, Rat(0))), std::vector<Rat>(n, Rat(0))};
  RatMatrix a = q;
  for (std::size_t k = 0; k < n; ++k) {
    if (sign_of(a[k][k]) <= 0) throw NotDefiniteError();
    out.d[k] = a[k][k];
    out.l[k][k] = 1;
    for (std::size_t i = k + 1; i < n; ++i) out.l[i][k] = a[i][k] / a[k][k];
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j <= i; ++j) {
        a[i][j] -= a[i][k] * a[k][j] / a[k][k];
        a[j][i] = a[i][j];
      }
  }
  return out;
}

// All integer y with (y - t)^T Q (y - t) = m, for positive definite Q and
// rational center t. Exact bounds via integer square roots; candidates are
// verified exactly before emission. Output sorted lexicographically.
inline std::vector<std::vector<Int>> enumerate_definite(const RatMatrix& q,
                                                        const std::vector<Rat>& center,
                                                        const Rat& target) {
  std::size_t n = q.size();
  std::vector<std::vector<Int>> out;
  if (sign_of(target) < 0) return out;
  if (n == 0) {
    if (target == 0) out.push_back({});
    return out;
  }
  RatLDL ldl = rat_ldlt(q);
  // (y - t)^T Q (y - t) = sum_k d_k (z_k)^2 with z_k = (y_k - t_k) + sum_{i>k} L_ik (y_i - t_i)
  std::vector<Int> y(n, Int(0));
  std::vector<Rat> shift(n, Rat(0));  // sum_{i>k} L_ik (y_i - t_i), filled as we descend
  std::function<void(long, const Rat&)> rec = [&](long k, const Rat& remaining) {
    if (k < 0) {
      if (remaining == 0) out.push_back(y);
      return;
    }
    std::size_t uk = static_cast<std::size_t>(k);
    // accumulate shift_k from already-fixed coordinates
    Rat sh(0);
    for (std::size_t i = uk + 1; i < n; ++i) sh += ldl.l[i][uk] * (Rat(y[i]) - center[i]);
    // d_k (y_k - t_k + sh)^2 <= remaining
    Rat bound2 = remaining / ldl.d[uk];
    // |y_k - c| <= sqrt(bound2) with c = t_k - sh
    Rat c = center[uk] - sh;
    // conservative rational upper bound for sqrt(bound2)
    Int bn = bound2.get_num(), bd = bound2.get_den();
    Rat sqrt_up(isqrt(bn * bd) + 1, bd);
    sqrt_up.canonicalize();
    Int lo = rat_ceil(c - sqrt_up), hi = rat_floor(c + sqrt_up);
    for (Int v = lo; v <= hi; ++v) {
      Rat z = Rat(v) - c;
      Rat term = ldl.d[uk] * z * z;
      if (term > remaining) continue;
      y[uk] = v;
      rec(k - 1, remaining - term);
    }
    y[uk] = 0;
  };
  rec(static_cast<long>(n) - 1, target);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

// Complete duplicate-free list of integer vectors v with v^T G v = target
// for negative definite G; sorted lexicographically.
inline std::vector<std::vector<Int>> definite_short_vectors(const IntMatrix& gram_neg,
                                                            const Int& target) {
  if (!gram_neg.is_square() || !gram_neg.is_symmetric()) throw DimensionMismatchError();
  std::size_t n = gram_neg.rows();
  {
    auto sig = signature(Lattice(gram_neg));
    if (sig.first != 0 || sig.second != n) throw NotDefiniteError();
  }
  RatMatrix q(n, std::vector<Rat>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) q[i][j] = Rat(-gram_neg(i, j));
  std::vector<Rat> center(n, Rat(0));
  return detail::enumerate_definite(q, center, Rat(-target));
}

// Interior-point representation of a chamber; coordinates in the ambient
// lattice M.
struct Chamber {
  RatVector point;
  Rat norm;  // <point, point>
};

struct ChamberContext {
  const FrobeniusData* fd = nullptr;
  const NSLattice* ns = nullptr;
};

namespace detail {

// Express a rational ambient vector in NS-basis coordinates; nullopt when
// it is not in NS tensor Q.
inline std::optional<std::vector<Rat>> ns_coordinates(const NSLattice& ns, const RatVector& x) {
  std::size_t n = ns.sub.basis.cols();
  if (x.size() != n) throw DimensionMismatchError();
  RatMatrix v(1, std::vector<Rat>(n));
  for (std::size_t j = 0; j < n; ++j) v[0][j] = x.at(j);
  try {
    RatMatrix sol = rat_solve_left(ns.sub.basis, v);
    return sol[0];
  } catch (const std::domain_error&) {
    return std::nullopt;
  }
}

// Roots delta (in NS coordinates) with <delta, lambda> = s_k and
// delta^2 = -2, for a fixed integer pairing level k against the primitive
// integer functional c = primitive(G_NS * lambda).
struct WallSlice {
  IntMatrix kernel;       // basis of {y : c . y = 0}, rows
  std::vector<Int> base;  // particular solution c . base = 1
  std::vector<Int> c;     // primitive functional
  Int pairing_scale_num;  // <lambda, delta> = k * scale_num / scale_den
  Int pairing_scale_den;
};

inline WallSlice wall_slice(const NSLattice& ns, const std::vector<Rat>& lam_ns) {
  std::size_t r = ns.rho;
  // integer functional: clear denominators of G * lambda
  std::vector<Rat> glam(r, Rat(0));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) glam[i] += Rat(ns.restricted(i, j)) * lam_ns[j];
  Int den = 1;
  for (const auto& x : glam) den = lcm(den, Int(x.get_den()));
  std::vector<Int> c(r);
  for (std::size_t i = 0; i < r; ++i) c[i] = Int(glam[i].get_num()) * exact_div(den, Int(glam[i].get_den()));
  Int g = 0;
  for (const auto& x : c) g = gcd(g, x);
  if (g == 0) throw std::domain_error("wall_slice: lambda pairs to zero with everything");
  for (auto& x : c) x = exact_div(x, g);
  WallSlice ws;
  ws.c = c;
  ws.pairing_scale_num = g;
  ws.pairing_scale_den = den;
  IntMatrix cm(1, r);
  for (std::size_t i = 0; i < r; ++i) cm(0, i) = c[i];
  ws.kernel = integer_kernel(cm);
  // particular solution of c . y = 1 via HNF transform
  auto [h, u] = hnf(cm.transpose());
  if (h(0, 0) != 1) throw std::logic_error("wall_slice: functional not primitive");
  ws.base = u.row(0);
  return ws;
}

}  // namespace detail

// All delta in NS with delta^2 = -2 and <lambda, delta> = 0, in ambient
// coordinates. The wall slice lambda-perp must be negative definite (Hodge
// index); a violation surfaces as NotDefiniteError.
inline std::vector<std::vector<Int>> roots_in_wall(const ChamberContext& ctx,
                                                   const RatVector& lambda) {
  const NSLattice& ns = *ctx.ns;
  auto lam_ns = detail::ns_coordinates(ns, lambda);
  if (!lam_ns) throw std::domain_error("lambda is not in NS tensor Q");
  if (ns.rho <= 1) return {};
  detail::WallSlice ws = detail::wall_slice(ns, *lam_ns);
  // restrict the form to the wall
  IntMatrix wg = ws.kernel * ns.restricted * ws.kernel.transpose();
  auto ys = definite_short_vectors(wg, Int(-2));
  std::vector<std::vector<Int>> out;
  std::size_t n = ns.sub.basis.cols();
  for (const auto& yv : ys) {
    // back to NS coordinates, then ambient
    std::vector<Int> d_ns(ns.rho, Int(0));
    for (std::size_t i = 0; i < ws.kernel.rows(); ++i)
      for (std::size_t j = 0; j < ns.rho; ++j) d_ns[j] += yv[i] * ws.kernel(i, j);
    std::vector<Int> amb(n, Int(0));
    for (std::size_t i = 0; i < ns.rho; ++i)
      for (std::size_t j = 0; j < n; ++j) amb[j] += d_ns[i] * ns.sub.basis(i, j);
    out.push_back(std::move(amb));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// lambda in NS tensor Q, lambda^2 > 0, and no wall passes through it.
inline bool validate_chamber(const ChamberContext& ctx, const RatVector& lambda) {
  auto lam_ns = detail::ns_coordinates(*ctx.ns, lambda);
  if (!lam_ns) return false;
  Rat norm = pair_rat(ctx.fd->lattice.gram, lambda, lambda);
  if (sign_of(norm) <= 0) return false;
  return roots_in_wall(ctx, lambda).empty();
}

// All delta in NS with delta^2 = -2 separating lambda from mu (opposite
// pairing signs), in ambient coordinates. Requires <lambda, mu> > 0.
inline std::vector<std::vector<Int>> separating_roots(const ChamberContext& ctx,
                                                      const RatVector& lambda,
                                                      const RatVector& mu) {
  const NSLattice& ns = *ctx.ns;
  const IntMatrix& gram = ctx.fd->lattice.gram;
  Rat lm = pair_rat(gram, lambda, mu);
  if (sign_of(lm) <= 0) throw SameConeError();
  if (ns.rho <= 1) return {};
  auto lam_ns = detail::ns_coordinates(ns, lambda);
  auto mu_ns = detail::ns_coordinates(ns, mu);
  if (!lam_ns || !mu_ns) throw std::domain_error("points must lie in NS tensor Q");

  Rat ll = pair_rat(gram, lambda, lambda);
  Rat mm = pair_rat(gram, mu, mu);
  if (sign_of(ll) <= 0 || sign_of(mm) <= 0)
    throw std::domain_error("separating_roots: points must have positive norm");

  // bound: s = <delta, lambda>; s^2 < 2 B A^2 / (A mm) with A = ll,
  // B = lm^2/ll - mm  (Cauchy-Schwarz in the negative definite lambda-perp)
  Rat bound_sq = (lm * lm / ll - mm);
  if (sign_of(bound_sq) < 0) bound_sq = 0;
  bound_sq = Rat(2) * bound_sq * ll * ll / (ll * mm);

  detail::WallSlice ws = detail::wall_slice(ns, *lam_ns);
  // pairing levels: <lambda, delta> = k * g / den for integer k = c . delta
  Rat scale(ws.pairing_scale_num, ws.pairing_scale_den);
  scale.canonicalize();
  // |k * scale| <= sqrt(bound_sq)  =>  k^2 <= bound_sq / scale^2
  Rat kb = bound_sq / (scale * scale);
  Int kmax = isqrt(rat_floor(kb));

  IntMatrix wg = ws.kernel * ns.restricted * ws.kernel.transpose();
  std::size_t wr = ws.kernel.rows();
  RatMatrix q(wr, std::vector<Rat>(wr));
  for (std::size_t i = 0; i < wr; ++i)
    for (std::size_t j = 0; j < wr; ++j) q[i][j] = Rat(-wg(i, j));

  std::vector<std::vector<Int>> out;
  std::size_t n = ns.sub.basis.cols();
  std::size_t r = ns.rho;
  for (Int k = 1; k <= kmax; ++k) {
    // affine slice: delta = k*base + y*kernel
    std::vector<Int> base(r);
    for (std::size_t i = 0; i < r; ++i) base[i] = k * ws.base[i];
    // (k base + yW) G (k base + yW)^T = -2
    // => y Wg y^T + 2 y (W G base^T) + base G base^T + 2 = 0 (Wg = W G W^T)
    std::vector<Int> wgb(wr, Int(0));
    Int bgb = 0;
    {
      std::vector<Int> gb(r, Int(0));
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) gb[i] += ns.restricted(i, j) * base[j];
      for (std::size_t i = 0; i < wr; ++i)
        for (std::size_t j = 0; j < r; ++j) wgb[i] += ws.kernel(i, j) * gb[j];
      for (std::size_t i = 0; i < r; ++i) bgb += base[i] * gb[i];
    }
    // negate (wall form is negative definite): y (-Wg) y^T - 2 y wgb - bgb - 2 = 0
    // complete the square around center = -(-Wg)^{-1} wgb = Q^{-1} (-wgb)... use
    // enumerate with center c solving Q c = -wgb, target = c^T Q c - (bgb + 2)
    std::vector<Rat> rhs(wr);
    for (std::size_t i = 0; i < wr; ++i) rhs[i] = Rat(-wgb[i]);
    // solve Q center = rhs by Gaussian elimination
    RatMatrix aug(wr, std::vector<Rat>(wr + 1));
    for (std::size_t i = 0; i < wr; ++i) {
      for (std::size_t j = 0; j < wr; ++j) aug[i][j] = q[i][j];
      aug[i][wr] = rhs[i];
    }
    for (std::size_t cidx = 0; cidx < wr; ++cidx) {
      std::size_t piv = cidx;
      while (piv < wr && aug[piv][cidx] == 0) ++piv;
      if (piv == wr) throw std::logic_error("separating_roots: singular wall form");
      std::swap(aug[cidx], aug[piv]);
      Rat pv = aug[cidx][cidx];
      for (auto& x : aug[cidx]) x /= pv;
      for (std::size_t i = 0; i < wr; ++i) {
        if (i == cidx || aug[i][cidx] == 0) continue;
        Rat f = aug[i][cidx];
        for (std::size_t j = 0; j <= wr; ++j) aug[i][j] -= f * aug[cidx][j];
      }
    }
    std::vector<Rat> center(wr);
    for (std::size_t i = 0; i < wr; ++i) center[i] = aug[i][wr];
    Rat cqc(0);
    for (std::size_t i = 0; i < wr; ++i)
      for (std::size_t j = 0; j < wr; ++j) cqc += center[i] * q[i][j] * center[j];
    Rat target = cqc - Rat(bgb) - Rat(2);
    if (sign_of(target) < 0) continue;
    auto ys = detail::enumerate_definite(q, center, target);
    for (const auto& yv : ys) {
      std::vector<Int> d_ns = base;
      for (std::size_t i = 0; i < wr; ++i)
        for (std::size_t j = 0; j < r; ++j) d_ns[j] += yv[i] * ws.kernel(i, j);
      // exact filters: norm -2 and opposite pairing signs
      Int norm = 0;
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) norm += d_ns[i] * ns.restricted(i, j) * d_ns[j];
      if (norm != -2) continue;
      Rat pl(0), pm(0);
      for (std::size_t i = 0; i < r; ++i) {
        Rat gi(0);
        for (std::size_t j = 0; j < r; ++j) gi += Rat(ns.restricted(i, j)) * Rat(d_ns[j]);
        pl += gi * (*lam_ns)[i];
        pm += gi * (*mu_ns)[i];
      }
      if (!(sign_of(pl) > 0 && sign_of(pm) < 0)) continue;
      std::vector<Int> amb(n, Int(0));
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < n; ++j) amb[j] += d_ns[i] * ns.sub.basis(i, j);
      out.push_back(amb);
      for (auto& x : amb) x = -x;  // the negated root separates with swapped signs
      out.push_back(std::move(amb));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline bool same_chamber(const ChamberContext& ctx, const RatVector& lambda, const RatVector& mu) {
  Rat lm = pair_rat(ctx.fd->lattice.gram, lambda, mu);
  if (sign_of(lm) <= 0) return false;
  return separating_roots(ctx, lambda, mu).empty();
}

// (M5) invariance: F maps the chamber of lambda to itself.
inline bool frobenius_preserves_chamber(const ChamberContext& ctx, const RatVector& lambda) {
  const FrobeniusData& fd = *ctx.fd;
  // image of lambda under F (row vector * F^T)
  std::size_t n = fd.rank();
  std::vector<Int> fnum(n, Int(0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) fnum[i] += lambda.num[j] * fd.frob(i, j);
  RatVector flam(std::move(fnum), lambda.den);
  Rat lm = pair_rat(fd.lattice.gram, lambda, flam);
  if (sign_of(lm) <= 0) return false;
  if (ctx.ns->rho <= 1) return true;  // rank-1: positive ratio suffices
  return separating_roots(ctx, lambda, flam).empty();
}

}  // namespace k3frob
