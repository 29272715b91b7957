#pragma once

// Arbitrary-precision scalar helpers shared across the library.
// All certified computations run on mpz_class / mpq_class; no floating
// point is used anywhere outside test oracles.

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <vector>

namespace k3frob {

using Int = mpz_class;
using Rat = mpq_class;

inline Int int_pow(const Int& base, unsigned long e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

// floor(sqrt(n)) for n >= 0.
inline Int isqrt(const Int& n) {
  if (n < 0) throw std::domain_error("isqrt of negative integer");
  Int r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

inline Int gcd(const Int& a, const Int& b) {
  Int r;
  mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

inline Int lcm(const Int& a, const Int& b) {
  Int r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

// Exact quotient; throws if b does not divide a.
inline Int exact_div(const Int& a, const Int& b) {
  if (b == 0) throw std::domain_error("exact_div by zero");
  Int q, r;
  mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  if (r != 0) throw std::domain_error("exact_div: not divisible");
  return q;
}

inline Int mod_floor(const Int& a, const Int& m) {
  Int r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

// Inverse of a mod m; throws if gcd(a, m) != 1.
inline Int mod_inverse(const Int& a, const Int& m) {
  Int r;
  if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
    throw std::domain_error("mod_inverse: not invertible");
  return r;
}

// p-adic valuation of n != 0; the quotient n / p^v is written to *unit when
// requested.
inline unsigned long p_valuation(const Int& n, const Int& p, Int* unit = nullptr) {
  if (n == 0) throw std::domain_error("p_valuation of zero");
  Int u;
  unsigned long v = mpz_remove(u.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t());
  if (unit) *unit = u;
  return v;
}

// Deterministic primality by trial division; intended for desk-scale p.
inline bool is_prime(const Int& n) {
  if (n < 2) return false;
  if (n < 4) return true;
  if (n % 2 == 0) return false;
  for (Int d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

inline int sign_of(const Int& x) { return mpz_sgn(x.get_mpz_t()); }
inline int sign_of(const Rat& x) { return mpq_sgn(x.get_mpq_t()); }

// floor of a rational.
inline Int rat_floor(const Rat& x) {
  Int r;
  mpz_fdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return r;
}

inline Int rat_ceil(const Rat& x) {
  Int r;
  mpz_cdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return r;
}

// Smallest prime strictly greater than n (desk scale).
inline Int next_prime_above(const Int& n) {
  Int c = n + 1;
  if (c <= 2) return 2;
  if (c % 2 == 0) ++c;
  while (!is_prime(c)) c += 2;
  return c;
}

}  // namespace k3frob
