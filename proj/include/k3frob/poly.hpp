#pragma once

// Exact univariate polynomials over Z (IntPoly) and over Q, with the
// root-counting machinery (Sturm sequences) used by the Weil certifier.

#include <k3frob/numeric.hpp>

#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

namespace k3frob {

struct NotSquarefreeError : std::runtime_error {
  NotSquarefreeError() : std::runtime_error("polynomial is not squarefree") {}
};

// Coefficient i holds the coefficient of t^i. The zero polynomial is the
// empty coefficient vector; otherwise the leading coefficient is nonzero.
class IntPoly {
 public:
  IntPoly() = default;
  explicit IntPoly(std::vector<Int> coeffs) : c_(std::move(coeffs)) { normalize(); }
  static IntPoly constant(Int v) { return IntPoly({std::move(v)}); }
  // t^k
  static IntPoly monomial(std::size_t k, Int lead = 1) {
    std::vector<Int> c(k + 1, Int(0));
    c[k] = std::move(lead);
    return IntPoly(std::move(c));
  }

  bool is_zero() const { return c_.empty(); }
  // degree of the zero polynomial is -1
  long degree() const { return static_cast<long>(c_.size()) - 1; }
  const std::vector<Int>& coeffs() const { return c_; }
  const Int& operator[](std::size_t i) const {
    static const Int zero(0);
    return i < c_.size() ? c_[i] : zero;
  }
  const Int& leading() const {
    if (c_.empty()) throw std::domain_error("leading of zero polynomial");
    return c_.back();
  }
  bool is_monic() const { return !c_.empty() && c_.back() == 1; }

  friend IntPoly operator+(const IntPoly& a, const IntPoly& b) {
    std::vector<Int> r(std::max(a.c_.size(), b.c_.size()), Int(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) r[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) r[i] += b.c_[i];
    return IntPoly(std::move(r));
  }
  friend IntPoly operator-(const IntPoly& a, const IntPoly& b) {
    std::vector<Int> r(std::max(a.c_.size(), b.c_.size()), Int(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) r[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) r[i] -= b.c_[i];
    return IntPoly(std::move(r));
  }
  friend IntPoly operator*(const IntPoly& a, const IntPoly& b) {
    if (a.is_zero() || b.is_zero()) return IntPoly();
    std::vector<Int> r(a.c_.size() + b.c_.size() - 1, Int(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    return IntPoly(std::move(r));
  }
  friend IntPoly operator*(const IntPoly& a, const Int& s) {
    std::vector<Int> r = a.c_;
    for (auto& x : r) x *= s;
    return IntPoly(std::move(r));
  }
  friend IntPoly operator-(const IntPoly& a) { return a * Int(-1); }
  friend bool operator==(const IntPoly& a, const IntPoly& b) { return a.c_ == b.c_; }

  Int eval(const Int& x) const {
    Int r = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + *it;
    return r;
  }
  Rat eval(const Rat& x) const {
    Rat r = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + *it;
    return r;
  }

  IntPoly derivative() const {
    if (c_.size() <= 1) return IntPoly();
    std::vector<Int> r(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) r[i - 1] = c_[i] * Int(i);
    return IntPoly(std::move(r));
  }

  // gcd of all coefficients, nonnegative; 0 for the zero polynomial.
  Int content() const {
    Int g = 0;
    for (const auto& x : c_) g = gcd(g, x);
    return g;
  }
  // content removed, leading coefficient positive.
  IntPoly primitive_part() const {
    if (is_zero()) return IntPoly();
    Int g = content();
    if (sign_of(leading()) < 0) g = -g;
    std::vector<Int> r(c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) r[i] = exact_div(c_[i], g);
    return IntPoly(std::move(r));
  }

  // Exact division; throws if the remainder is nonzero.
  friend IntPoly exact_div(const IntPoly& a, const IntPoly& b) {
    if (b.is_zero()) throw std::domain_error("polynomial division by zero");
    std::vector<Int> rem = a.c_;
    long db = b.degree();
    if (a.degree() < db) {
      if (a.is_zero()) return IntPoly();
      throw std::domain_error("exact_div: not divisible");
    }
    std::vector<Int> q(a.degree() - db + 1, Int(0));
    for (long i = a.degree(); i >= db; --i) {
      if (rem[i] == 0) continue;
      Int f = exact_div(rem[i], b.leading());
      q[i - db] = f;
      for (long j = 0; j <= db; ++j) rem[i - db + j] -= f * b.c_[j];
    }
    for (const auto& x : rem)
      if (x != 0) throw std::domain_error("exact_div: not divisible");
    return IntPoly(std::move(q));
  }

 private:
  void normalize() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<Int> c_;
};

// ---- rational polynomials (internal; used by Sturm sequences) ----

struct RatPoly {
  std::vector<Rat> c;  // same indexing as IntPoly
  explicit RatPoly(std::vector<Rat> cc = {}) : c(std::move(cc)) { normalize(); }
  explicit RatPoly(const IntPoly& p) {
    c.reserve(p.coeffs().size());
    for (const auto& x : p.coeffs()) c.emplace_back(x);
  }
  bool is_zero() const { return c.empty(); }
  long degree() const { return static_cast<long>(c.size()) - 1; }
  void normalize() {
    while (!c.empty() && c.back() == 0) c.pop_back();
  }
  Rat eval(const Rat& x) const {
    Rat r = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
    return r;
  }
};

// remainder of a by b (b nonzero), in place on a copy.
inline RatPoly rat_rem(RatPoly a, const RatPoly& b) {
  long db = b.degree();
  while (!a.is_zero() && a.degree() >= db) {
    Rat f = a.c.back() / b.c.back();
    long shift = a.degree() - db;
    for (long j = 0; j <= db; ++j) a.c[shift + j] -= f * b.c[j];
    a.normalize();
  }
  return a;
}

// ---- gcd / squarefree machinery over Z ----

// Primitive PRS gcd; result primitive with positive leading coefficient.
inline IntPoly poly_gcd(IntPoly a, IntPoly b) {
  if (a.is_zero()) return b.is_zero() ? b : b.primitive_part();
  if (b.is_zero()) return a.primitive_part();
  a = a.primitive_part();
  b = b.primitive_part();
  while (!b.is_zero()) {
    // pseudo-remainder of a by b
    long da = a.degree(), db = b.degree();
    if (da < db) {
      std::swap(a, b);
      continue;
    }
    IntPoly r = a * int_pow(b.leading(), static_cast<unsigned long>(da - db + 1));
    std::vector<Int> rc = r.coeffs();
    for (long i = static_cast<long>(rc.size()) - 1; i >= db; --i) {
      if (rc[i] == 0) continue;
      Int f = exact_div(rc[i], b.leading());
      for (long j = 0; j <= db; ++j) rc[i - db + j] -= f * b.coeffs()[j];
    }
    IntPoly rem{std::vector<Int>(rc.begin(), rc.begin() + db)};
    a = std::move(b);
    b = rem.is_zero() ? IntPoly() : rem.primitive_part();
  }
  return a.primitive_part();
}

// P / gcd(P, P'), primitive, positive leading coefficient.
inline IntPoly squarefree_part(const IntPoly& p) {
  if (p.is_zero() || p.degree() == 0) return IntPoly::constant(1);
  IntPoly g = poly_gcd(p, p.derivative());
  if (g.degree() == 0) return p.primitive_part();
  return exact_div(p.primitive_part(), g).primitive_part();
}

inline bool is_squarefree(const IntPoly& p) {
  return poly_gcd(p, p.derivative()).degree() == 0;
}

// Cyclotomic polynomial Phi_m, by exact division of t^m - 1 by the
// Phi_d for proper divisors d of m.
inline IntPoly cyclotomic(unsigned long m) {
  if (m == 0) throw std::domain_error("cyclotomic(0)");
  static std::map<unsigned long, IntPoly> cache;
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  IntPoly num = IntPoly::monomial(m) - IntPoly::constant(1);
  for (unsigned long d = 1; d < m; ++d)
    if (m % d == 0) num = exact_div(num, cyclotomic(d));
  cache[m] = num;
  return num;
}

inline unsigned long euler_phi(unsigned long m) {
  unsigned long r = m;
  for (unsigned long p = 2; p * p <= m; ++p)
    if (m % p == 0) {
      r -= r / p;
      while (m % p == 0) m /= p;
    }
  if (m > 1) r -= r / m;
  return r;
}

// ---- Sturm root counting ----

// Number of distinct real roots of squarefree P in (lo, hi].
inline long sturm_count(const IntPoly& p, const Rat& lo, const Rat& hi) {
  if (!(lo < hi)) throw std::domain_error("sturm_count: need lo < hi");
  if (p.is_zero() || p.degree() == 0) return 0;
  if (!is_squarefree(p)) throw NotSquarefreeError();
  std::vector<RatPoly> chain;
  chain.emplace_back(p);
  chain.emplace_back(p.derivative());
  while (!chain.back().is_zero()) {
    RatPoly r = rat_rem(chain[chain.size() - 2], chain.back());
    for (auto& x : r.c) x = -x;
    r.normalize();
    if (r.is_zero()) break;
    chain.push_back(std::move(r));
  }
  auto variations = [&chain](const Rat& x) {
    long v = 0;
    int prev = 0;
    for (const auto& q : chain) {
      int s = sign_of(q.eval(x));
      if (s == 0) continue;
      if (prev != 0 && s != prev) ++v;
      prev = s;
    }
    return v;
  };
  return variations(lo) - variations(hi);
}

}  // namespace k3frob
