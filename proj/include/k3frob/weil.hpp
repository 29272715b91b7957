#pragma once

// q^2-scaled isometries and certified Weil-polynomial tests. The
// certification path is fully exact: real-root factors are stripped, the
// functional equation is checked coefficientwise, and the trace transform
// reduces root location to Sturm counting on a real interval.

#include <k3frob/lattice.hpp>

#include <optional>
#include <utility>

namespace k3frob {

struct NotMonicError : std::runtime_error {
  NotMonicError() : std::runtime_error("polynomial is not monic") {}
};
struct NoSuchTransformError : std::runtime_error {
  NoSuchTransformError() : std::runtime_error("no trace transform exists") {}
};

struct WeilParams {
  Int p;
  unsigned long a = 1;
  Int q;

  WeilParams() = default;
  WeilParams(Int prime, unsigned long exponent) : p(std::move(prime)), a(exponent) {
    if (a == 0) throw std::domain_error("Weil exponent a must be positive");
    if (!is_prime(p)) throw std::domain_error("Weil characteristic p must be prime");
    q = int_pow(p, a);
  }
};

struct FrobeniusData {
  Lattice lattice;
  IntMatrix frob;
  WeilParams params;

  FrobeniusData(Lattice l, IntMatrix f, WeilParams w)
      : lattice(std::move(l)), frob(std::move(f)), params(std::move(w)) {
    if (!frob.is_square() || frob.rows() != lattice.rank()) throw DimensionMismatchError();
  }
  std::size_t rank() const { return lattice.rank(); }
};

// (M2): F^T G F = q^2 G, exactly.
inline bool check_scaling(const FrobeniusData& fd) {
  const IntMatrix& g = fd.lattice.gram;
  return fd.frob.transpose() * g * fd.frob == g * (fd.params.q * fd.params.q);
}

// det(F) = +-q^rank, a consequence of (M2) on a unimodular lattice.
// Returns {holds, sign}.
inline std::pair<bool, int> frobenius_det_check(const FrobeniusData& fd) {
  Int d = det(fd.frob);
  Int expect = int_pow(fd.params.q, fd.rank());
  if (d == expect) return {true, 1};
  if (d == -expect) return {true, -1};
  return {false, 0};
}

// Divide out the maximal power of (t - root); returns the multiplicity.
inline unsigned long strip_linear_factor(IntPoly& p, const Int& root) {
  unsigned long mult = 0;
  IntPoly lin({-root, Int(1)});
  while (p.degree() >= 1 && p.eval(root) == 0) {
    p = exact_div(p, lin);
    ++mult;
  }
  return mult;
}

// The unique monic integer R of degree m with P(t) = t^m R(t + q^2/t),
// for monic P of even degree 2m satisfying the functional equation.
inline IntPoly trace_transform(const IntPoly& p, const Int& q) {
  if (!p.is_monic()) throw NotMonicError();
  long d = p.degree();
  if (d % 2 != 0) throw NoSuchTransformError();
  long m = d / 2;
  Int q2 = q * q;
  IntPoly rem = p;
  // t^m u^k = t^(m-k) (t^2 + q^2)^k; peel coefficients top down
  IntPoly shifted_square({q2, Int(0), Int(1)});  // t^2 + q^2
  std::vector<Int> rc(static_cast<std::size_t>(m) + 1, Int(0));
  IntPoly power = IntPoly::constant(1);  // (t^2+q^2)^k built on demand
  std::vector<IntPoly> powers;
  powers.push_back(power);
  for (long k = 1; k <= m; ++k) {
    power = power * shifted_square;
    powers.push_back(power);
  }
  for (long k = m; k >= 0; --k) {
    Int coeff = rem[static_cast<std::size_t>(m + k)];
    rc[static_cast<std::size_t>(k)] = coeff;
    if (coeff != 0)
      rem = rem - IntPoly::monomial(static_cast<std::size_t>(m - k), coeff) *
                      powers[static_cast<std::size_t>(k)];
  }
  if (!rem.is_zero()) throw NoSuchTransformError();
  return IntPoly(std::move(rc));
}

// Certified test that every complex root of monic P has absolute value
// exactly q. No floating point: strip t = +-q, check the functional
// equation, and Sturm-count the trace transform on [-2q, 2q].
inline bool is_weil_q2(const IntPoly& p, const Int& q) {
  if (p.is_zero() || !p.is_monic()) throw NotMonicError();
  if (p.degree() == 0) return true;
  IntPoly p1 = p;
  strip_linear_factor(p1, q);
  strip_linear_factor(p1, -q);
  long d = p1.degree();
  if (d == 0) return true;
  // a residual real root would have absolute value != q
  if (d % 2 != 0) return false;
  Int qd = int_pow(q, static_cast<unsigned long>(d));
  if (p1[0] != qd) return false;  // sign - would need an unstripped real root
  // functional equation: q^(2(d-j)) c_{d-j} = q^d c_j
  for (long j = 0; j <= d; ++j) {
    Int lhs = p1[static_cast<std::size_t>(d - j)] *
              int_pow(q, static_cast<unsigned long>(2 * (d - j)));
    if (lhs != p1[static_cast<std::size_t>(j)] * qd) return false;
  }
  IntPoly r;
  try {
    r = trace_transform(p1, q);
  } catch (const NoSuchTransformError&) {
    return false;
  }
  IntPoly rsf = squarefree_part(r);
  if (rsf.degree() == 0) return true;
  Rat lo(-2 * q), hi(2 * q);
  // roots at s = +-2q would mean unstripped t = +-q factors
  if (rsf.eval(Int(2 * q)) == 0 || rsf.eval(Int(-2 * q)) == 0) return false;
  return sturm_count(rsf, lo, hi) == rsf.degree();
}

// (M3) semisimplicity: the minimal polynomial is squarefree.
inline bool is_semisimple(const IntMatrix& f) { return is_squarefree(minimal_poly(f)); }

// N_n = 1 + tr(F^n) + q^(2n).
inline Int point_count(const FrobeniusData& fd, unsigned long n) {
  if (n == 0) throw std::domain_error("point_count: n must be positive");
  return 1 + fd.frob.pow(n).trace() + int_pow(fd.params.q, 2 * n);
}

// The open Question's inequality: 1 + tr F + q^2 < 0 (strict).
inline bool question_predicate(const FrobeniusData& fd) { return point_count(fd, 1) < 0; }

}  // namespace k3frob
