#pragma once

// NS(M, F) = {x in M | F^d x = q^d x for some d >= 1}, assembled from
// cyclotomic kernels (no integer factorization), the transcendental
// complement with a semi-decided cyclicity verdict, and the Hodge-index
// signature check.

#include <k3frob/padic.hpp>

#include <set>

namespace k3frob {

struct DegenerateRestrictionError : std::runtime_error {
  DegenerateRestrictionError()
      : std::runtime_error("restricted form on NS(M, F) is degenerate") {}
};

struct NSLattice {
  Sublattice sub;       // saturated, F-stable
  IntMatrix restricted; // Gram of the pairing on the basis rows
  std::size_t rho = 0;
};

// Saturated integer kernel of F^d - q^d.
inline Sublattice picard_fixed(const FrobeniusData& fd, unsigned long d) {
  if (d == 0) throw std::domain_error("picard_fixed: d must be positive");
  IntMatrix fd_pow = fd.frob.pow(d);
  Int qd = int_pow(fd.params.q, d);
  std::size_t n = fd.rank();
  for (std::size_t i = 0; i < n; ++i) fd_pow(i, i) -= qd;
  IntMatrix ker = integer_kernel(fd_pow);
  Sublattice s(fd.lattice, std::move(ker));
  s.saturated = true;
  return s;
}

// Candidate cyclotomic orders: eigenvalues q*zeta with zeta of order m
// contribute degree phi(m), so only m with phi(m) <= rank can occur.
inline std::vector<unsigned long> cyclotomic_orders(std::size_t rank) {
  std::vector<unsigned long> ms;
  // phi(m) >= sqrt(m/2), so m <= 2*rank^2 bounds the scan
  for (unsigned long m = 1; m <= 2 * rank * rank + 1; ++m)
    if (euler_phi(m) <= rank) ms.push_back(m);
  return ms;
}

// Union of the (row-span) lattices, saturated.
inline IntMatrix saturated_sum(const std::vector<IntMatrix>& parts, std::size_t n) {
  std::vector<std::vector<Int>> rows;
  for (const auto& b : parts)
    for (std::size_t i = 0; i < b.rows(); ++i) rows.push_back(b.row(i));
  if (rows.empty()) return IntMatrix(0, n);
  IntMatrix stacked = IntMatrix::from_rows(rows);
  // saturation = double orthogonal complement for the dot product
  return integer_kernel(integer_kernel(stacked));
}

inline NSLattice neron_severi(const FrobeniusData& fd) {
  std::size_t n = fd.rank();
  const Int& q = fd.params.q;
  std::vector<IntMatrix> parts;
  for (unsigned long m : cyclotomic_orders(n)) {
    // q^phi(m) * Phi_m(F/q) as an integer matrix
    IntPoly phi = cyclotomic(m);
    unsigned long e = static_cast<unsigned long>(phi.degree());
    IntMatrix acc(n, n);
    for (long j = static_cast<long>(e); j >= 0; --j) {
      Int coeff = phi[static_cast<std::size_t>(j)] *
                  int_pow(q, e - static_cast<unsigned long>(j));
      IntMatrix term = fd.frob.pow(static_cast<unsigned long>(j)) * coeff;
      acc = acc + term;
    }
    IntMatrix ker = integer_kernel(acc);
    if (ker.rows() > 0) parts.push_back(std::move(ker));
  }
  IntMatrix basis = saturated_sum(parts, n);
  NSLattice ns;
  ns.sub = Sublattice(fd.lattice, std::move(basis));
  ns.sub.saturated = true;
  ns.restricted = ns.sub.restricted_gram();
  ns.rho = ns.sub.rank();
  return ns;
}

enum class CyclicityVerdict { Yes, No, Inconclusive };

namespace detail {

// Degrees of a distinct-degree factorization of f mod p (squarefree mod p
// assumed); returns one entry per irreducible factor.
inline std::optional<std::vector<unsigned long>> ddf_degrees(const IntPoly& f, const Int& p) {
  ModPoly fm = mp_reduce(f, p);
  mp_trim(fm);
  if (fm.size() < 2) return std::nullopt;
  if (fm.back() % p == 0) return std::nullopt;  // leading coefficient degenerates
  {  // make monic
    Int inv = mod_inverse(fm.back(), p);
    for (auto& x : fm) x = mod_floor(x * inv, p);
  }
  // squarefree mod p?
  ModPoly df(fm.size() - 1);
  for (std::size_t i = 1; i < fm.size(); ++i) df[i - 1] = mod_floor(fm[i] * Int(i), p);
  mp_trim(df);
  if (df.empty()) return std::nullopt;
  {
    ModPoly a = fm, b = df;
    while (!b.empty()) {
      auto [qq, r] = mp_divmod(a, b, p);
      a = std::move(b);
      b = std::move(r);
    }
    if (a.size() != 1) return std::nullopt;  // not squarefree mod p
  }
  std::vector<unsigned long> degrees;
  ModPoly x{Int(0), Int(1)};
  ModPoly h = x;  // will hold x^(p^d) mod f
  ModPoly rem = fm;
  unsigned long d = 0;
  auto powmod_p = [&p](ModPoly base, Int e, const ModPoly& modp, const Int& pm) {
    ModPoly r{Int(1)};
    while (e > 0) {
      if (mpz_odd_p(e.get_mpz_t())) r = mp_divmod(mp_mul(r, base, pm), modp, pm).second;
      e >>= 1;
      if (e > 0) base = mp_divmod(mp_mul(base, base, pm), modp, pm).second;
    }
    return r;
  };
  while (rem.size() > 1) {
    ++d;
    if (2 * d > rem.size() - 1) {
      // remainder is a single irreducible factor
      degrees.push_back(rem.size() - 1);
      break;
    }
    h = powmod_p(h, p, rem, p);  // x^(p^d) mod current remainder (chained)
    ModPoly probe = mp_sub(h, x, p);
    // gcd(probe, rem)
    ModPoly a = rem, b = mp_divmod(probe, rem, p).second;
    while (!b.empty()) {
      auto [qq, r] = mp_divmod(a, b, p);
      a = std::move(b);
      b = std::move(r);
    }
    if (a.size() > 1) {
      unsigned long total = a.size() - 1;
      for (unsigned long i = 0; i < total / d; ++i) degrees.push_back(d);
      auto [qq, rr] = mp_divmod(rem, a, p);
      rem = std::move(qq);
      // h currently reduced mod the old rem; re-reduce
      h = mp_divmod(h, rem, p).second;
    }
  }
  return degrees;
}

// Semi-decision of irreducibility over Q by intersecting subset-sum degree
// patterns modulo several primes.
inline bool certify_irreducible(const IntPoly& f, unsigned long tries = 12) {
  unsigned long deg = static_cast<unsigned long>(f.degree());
  if (deg <= 1) return true;
  Int p = 2;
  std::set<unsigned long> possible;  // running intersection, minus {0, deg}
  bool have = false;
  for (unsigned long t = 0; t < tries;) {
    auto degs = ddf_degrees(f, p);
    p = next_prime_above(p);
    if (!degs) continue;
    ++t;
    // subset sums of the factor degrees
    std::set<unsigned long> sums{0};
    for (unsigned long d : *degs) {
      std::set<unsigned long> next = sums;
      for (unsigned long s : sums) next.insert(s + d);
      sums = std::move(next);
    }
    sums.erase(0);
    sums.erase(deg);
    if (!have) {
      possible = std::move(sums);
      have = true;
    } else {
      std::set<unsigned long> inter;
      for (unsigned long s : possible)
        if (sums.count(s)) inter.insert(s);
      possible = std::move(inter);
    }
    if (have && possible.empty()) return true;  // only the trivial degrees remain
  }
  return false;
}

}  // namespace detail

struct TranscendentalResult {
  Sublattice sub;
  CyclicityVerdict verdict = CyclicityVerdict::Inconclusive;
  IntPoly min_poly;  // minimal polynomial of F on T (empty if T = 0)
};

// Saturated orthogonal complement of NS(M, F) with the cyclicity verdict
// for the F-action on T tensor Q.
inline TranscendentalResult transcendental(const FrobeniusData& fd, const NSLattice& ns) {
  TranscendentalResult out;
  out.sub = orthogonal_complement(ns.sub);
  std::size_t r = out.sub.rank();
  if (r == 0) {
    out.verdict = CyclicityVerdict::Yes;  // vacuous
    return out;
  }
  // restrict F to T: solve C * B = B * F^T over Q; C is integral since T
  // is saturated and F-stable
  const IntMatrix& b = out.sub.basis;
  RatMatrix image(r, std::vector<Rat>(fd.rank()));
  IntMatrix bf = b * fd.frob.transpose();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < fd.rank(); ++j) image[i][j] = Rat(bf(i, j));
  RatMatrix coeffs = rat_solve_left(b, image);
  IntMatrix c(r, r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      if (coeffs[i][j].get_den() != 1)
        throw std::logic_error("transcendental: restriction of F is not integral");
      c(i, j) = coeffs[i][j].get_num();
    }
  out.min_poly = minimal_poly(c);
  if (out.min_poly.degree() < static_cast<long>(r)) {
    out.verdict = CyclicityVerdict::No;
    return out;
  }
  out.verdict = detail::certify_irreducible(out.min_poly) ? CyclicityVerdict::Yes
                                                          : CyclicityVerdict::Inconclusive;
  return out;
}

// (M5) precondition: restricted signature is (1, rho - 1).
inline bool hodge_index_check(const NSLattice& ns) {
  if (ns.rho == 0) throw std::domain_error("hodge_index_check: rho must be >= 1");
  Lattice restricted(ns.restricted);
  std::pair<std::size_t, std::size_t> sig;
  try {
    sig = signature(restricted);
  } catch (const DegenerateFormError&) {
    throw DegenerateRestrictionError();
  }
  return sig.first == 1 && sig.second == ns.rho - 1;
}

}  // namespace k3frob
