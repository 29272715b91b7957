#pragma once

// Assembles the axiom battery (M1)-(M5) into a single report with
// witnesses, the zeta/point-count summary, and the small-degree /
// hyperbolic-plane / rank classification. Axioms are checked
// independently (no short-circuit); a check that cannot run because a
// prerequisite failed is marked Precondition rather than Fail.

#include <k3frob/io.hpp>

#include <sstream>

namespace k3frob {

enum class Verdict { Pass, Fail, Precondition };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    default: return "precondition";
  }
}

struct AxiomResult {
  Verdict verdict = Verdict::Precondition;
  std::string detail;  // witness or diagnostic; empty on a plain pass
};

enum class Theorem46Class { SmallDegree, HyperbolicPlane, Rank12, None, UnknownUpToBound };

inline const char* theorem46_name(Theorem46Class c) {
  switch (c) {
    case Theorem46Class::SmallDegree: return "SmallDegree";
    case Theorem46Class::HyperbolicPlane: return "HyperbolicPlane";
    case Theorem46Class::Rank12: return "Rank12";
    case Theorem46Class::None: return "None";
    default: return "UnknownUpToBound";
  }
}

struct VerifyOptions {
  unsigned long precision = 0;   // 0 = automatic (a * (rank + 4), doubled on demand)
  unsigned long zeta_terms = 4;
  Int class_bound = 3;           // coefficient box height for the classification search
};

struct ZetaReport {
  std::vector<Int> counts;  // N_1 .. N_k
  bool question = false;    // N_1 < 0
  std::optional<bool> congruence_n1;  // N_1 != 1 mod p, when a split certificate exists
};

struct VerificationReport {
  bool claims_k3 = true;
  std::array<AxiomResult, 5> axioms;  // M1..M5
  std::string slope_multiset;         // reduced-fraction valuation -> multiplicity
  std::optional<SplitCertificate> certificate;
  std::string split_status;           // "certified" or the failure kind
  std::size_t ns_rank = 0;
  IntMatrix ns_basis;
  IntMatrix ns_gram;
  ZetaReport zeta;
  std::optional<Theorem46Class> theorem46;

  bool all_pass() const {
    for (const auto& ax : axioms)
      if (ax.verdict == Verdict::Fail) return false;
    return true;
  }
};

namespace detail {

inline std::string slope_multiset_string(const NewtonPolygon& np) {
  std::ostringstream out;
  out << "{";
  bool first = true;
  for (const auto& [val, mult] : np.root_valuations()) {
    if (!first) out << ", ";
    first = false;
    out << val.get_str() << ": " << mult;
  }
  out << "}";
  return out.str();
}

inline std::string vector_string(const std::vector<Int>& v) {
  std::ostringstream out;
  out << "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out << ", ";
    out << v[i].get_str();
  }
  out << ")";
  return out.str();
}

}  // namespace detail

inline ZetaReport zeta_report(const FrobeniusData& fd, unsigned long k,
                              const SplitCertificate* cert = nullptr) {
  ZetaReport z;
  for (unsigned long n = 1; n <= k; ++n) z.counts.push_back(point_count(fd, n));
  z.question = !z.counts.empty() && z.counts[0] < 0;
  if (cert && !z.counts.empty())
    z.congruence_n1 = mod_floor(z.counts[0], fd.params.p) != mod_floor(Int(1), fd.params.p);
  return z;
}

namespace detail {

// Bounded box search over NS coordinates; calls visit(coords) for every
// nonzero vector with |c_i| <= height. Returns false (and visits nothing)
// when the box is too large to enumerate.
inline bool box_search(std::size_t rho, const Int& height,
                       const std::function<bool(const std::vector<Int>&)>& visit) {
  if (!height.fits_slong_p()) return false;
  long h = height.get_si();
  double combos = 1;
  for (std::size_t i = 0; i < rho; ++i) combos *= 2.0 * static_cast<double>(h) + 1.0;
  if (combos > 2e6) return false;
  std::vector<Int> c(rho, Int(-h));
  while (true) {
    bool zero = true;
    for (const auto& x : c)
      if (x != 0) zero = false;
    if (!zero && visit(c)) return true;
    std::size_t i = 0;
    while (i < rho && c[i] == h) c[i++] = -h;
    if (i == rho) return true;
    c[i] += 1;
  }
}

}  // namespace detail

// Classification search (requires a passing chamber setup; the caller
// guards). Order: exact rank test, hyperbolic-plane box search, small-norm
// chamber-side search, with None only in the provably exhaustive cases.
inline Theorem46Class classify_theorem_4_6(const FrobeniusData& fd, const NSLattice& ns,
                                           const RatVector& ample, const Int& bound) {
  std::size_t rho = ns.rho;
  if (rho >= 12) return Theorem46Class::Rank12;
  if (rho == 0) return Theorem46Class::None;

  ChamberContext ctx{&fd, &ns};
  const Int& p = fd.params.p;
  bool exhaustive = true;

  // hyperbolic plane: primitive isotropic e whose pairing functional is
  // surjective (then a partner f with <e, f> = 1 exists)
  if (rho >= 2) {
    bool found = false;
    bool complete = detail::box_search(rho, bound, [&](const std::vector<Int>& c) {
      Int norm = 0;
      std::vector<Int> gc(rho, Int(0));
      for (std::size_t i = 0; i < rho; ++i)
        for (std::size_t j = 0; j < rho; ++j) gc[i] += ns.restricted(i, j) * c[j];
      for (std::size_t i = 0; i < rho; ++i) norm += c[i] * gc[i];
      if (norm != 0) return false;
      Int content = 0;
      for (const auto& x : gc) content = gcd(content, x);
      if (content == 1) {
        found = true;
        return true;
      }
      return false;
    });
    if (found) return Theorem46Class::HyperbolicPlane;
    if (!complete) exhaustive = false;
  }

  // small even norm on the ample side: 0 < norm < p - 4, norm even,
  // chamber-valid and in the chamber of the given ample point
  Int norm_cap = p - 4;
  if (norm_cap > 1) {
    bool found = false;
    auto try_candidate = [&](const std::vector<Int>& c) {
      Int norm = 0;
      for (std::size_t i = 0; i < rho; ++i)
        for (std::size_t j = 0; j < rho; ++j) norm += c[i] * ns.restricted(i, j) * c[j];
      if (norm <= 0 || norm >= norm_cap || norm % 2 != 0) return false;
      // back to ambient coordinates
      std::size_t n = fd.rank();
      std::vector<Int> amb(n, Int(0));
      for (std::size_t i = 0; i < rho; ++i)
        for (std::size_t j = 0; j < n; ++j) amb[j] += c[i] * ns.sub.basis(i, j);
      RatVector cand(amb);
      if (!validate_chamber(ctx, cand)) return false;
      if (!same_chamber(ctx, ample, cand)) return false;
      found = true;
      return true;
    };
    if (rho == 1) {
      // exact: norms are c^2 * g11, increasing in |c|
      Int g11 = ns.restricted(0, 0);
      if (g11 > 0) {
        for (Int c = 1; c * c * g11 < norm_cap; ++c) {
          if (try_candidate({c}) || try_candidate({-c})) break;
        }
      }
      if (found) return Theorem46Class::SmallDegree;
      return Theorem46Class::None;  // rank < 12, no U in rank 1, search exact
    }
    bool complete = detail::box_search(rho, bound, try_candidate);
    if (found) return Theorem46Class::SmallDegree;
    if (!complete) exhaustive = false;
    exhaustive = false;  // box search does not exhaust small norms in rank >= 2
  } else if (rho == 1) {
    return Theorem46Class::None;  // p <= 5: no even norm fits below p - 4
  }
  (void)exhaustive;
  return Theorem46Class::UnknownUpToBound;
}

inline VerificationReport verify_triple(const TripleDocument& doc, const VerifyOptions& opt = {}) {
  VerificationReport rep;
  rep.claims_k3 = doc.claims_k3;
  FrobeniusData fd(doc.lattice, doc.frob, doc.params);
  const Int& q = doc.params.q;
  const Int& p = doc.params.p;
  unsigned long a = doc.params.a;

  // M1: lattice profile
  {
    AxiomResult& m1 = rep.axioms[0];
    bool even = is_even(doc.lattice);
    bool uni = is_unimodular(doc.lattice);
    std::optional<std::pair<std::size_t, std::size_t>> sig;
    try {
      sig = signature(doc.lattice);
    } catch (const DegenerateFormError&) {
    }
    std::ostringstream d;
    d << "even=" << (even ? "yes" : "no") << " unimodular=" << (uni ? "yes" : "no");
    if (sig)
      d << " signature=(" << sig->first << "," << sig->second << ")";
    else
      d << " signature=degenerate";
    if (doc.claims_k3) {
      bool ok = even && uni && sig && sig->first == 3 && sig->second == 19;
      m1.verdict = ok ? Verdict::Pass : Verdict::Fail;
      m1.detail = ok ? "" : d.str();
    } else {
      m1.verdict = sig ? Verdict::Pass : Verdict::Fail;
      m1.detail = "generalized mode (K3 profile not claimed): " + d.str();
    }
  }

  // M2: q^2 scaling
  {
    AxiomResult& m2 = rep.axioms[1];
    bool ok = check_scaling(fd);
    m2.verdict = ok ? Verdict::Pass : Verdict::Fail;
    if (!ok) m2.detail = "F^T G F != q^2 G";
  }

  IntPoly cp = charpoly(fd.frob);

  // M3: q^2-Weil + semisimple
  {
    AxiomResult& m3 = rep.axioms[2];
    bool weil = is_weil_q2(cp, q);
    bool ss = is_semisimple(fd.frob);
    if (doc.claims_k3) {
      m3.verdict = (weil && ss) ? Verdict::Pass : Verdict::Fail;
      if (!weil) m3.detail = "some eigenvalue has absolute value != q";
      if (!ss) m3.detail += std::string(m3.detail.empty() ? "" : "; ") + "F is not semisimple";
    } else {
      // generalized mode: the |eigenvalue| = q condition is specific to the
      // K3 profile; only semisimplicity is enforced, the Weil verdict is
      // recorded as information
      m3.verdict = ss ? Verdict::Pass : Verdict::Fail;
      m3.detail = std::string("generalized mode: q^2-Weil check informational (") +
                  (weil ? "holds" : "does not hold") + ")";
      if (!ss) m3.detail += "; F is not semisimple";
    }
  }

  // M4: ordinarity and integral splitting
  {
    AxiomResult& m4 = rep.axioms[3];
    if (cp[0] == 0) {
      m4.verdict = Verdict::Fail;
      m4.detail = "F is singular";
      rep.split_status = "NotOrdinary";
    } else {
      NewtonPolygon np = newton_polygon(cp, p);
      rep.slope_multiset = detail::slope_multiset_string(np);
      auto shape = shape_from_polygon(np, a);
      bool shape_ok = doc.claims_k3 ? is_ordinary_k3_shape(np, a) : shape.has_value();
      if (!shape_ok) {
        m4.verdict = Verdict::Fail;
        m4.detail = "Newton slope multiset " + rep.slope_multiset +
                    (doc.claims_k3 ? " is not the ordinary profile {0:1, " + Int(a).get_str() +
                                         ":20, " + Int(2 * a).get_str() + ":1}"
                                   : " has slopes outside {0, a, 2a}");
        rep.split_status = "NotOrdinary";
      } else {
        unsigned long base = opt.precision ? opt.precision : a * (fd.rank() + 4);
        if (base <= 2 * a + 1) base = 2 * a + 2;
        bool done = false;
        for (unsigned long mult = 1; mult <= 16 && !done; mult *= 2) {
          PadicPrecision prec(p, base * mult);
          try {
            SplitCertificate cert = integral_splitting(fd, prec);
            bool cert_ok = verify_certificate(fd, cert);
            bool pairing_ok = cert.ranks[0] != 1 || unit_root_pairing_check(fd, prec);
            if (!cert_ok) {
              m4.verdict = Verdict::Fail;
              m4.detail = "split certificate failed independent re-verification";
              rep.split_status = "CertificateInvalid";
            } else if (!pairing_ok) {
              m4.verdict = Verdict::Fail;
              m4.detail = "unit root u does not pair to q^2/u";
              rep.split_status = "PairingFailed";
            } else {
              m4.verdict = Verdict::Pass;
              rep.certificate = std::move(cert);
              rep.split_status = "certified";
            }
            done = true;
          } catch (const SplitError& e) {
            if (e.kind == SplitFailure::PrecisionInsufficient && mult < 16) continue;
            m4.verdict = Verdict::Fail;
            m4.detail = e.what();
            rep.split_status = e.kind == SplitFailure::Divisibility         ? "Divisibility"
                               : e.kind == SplitFailure::NotOrdinary        ? "NotOrdinary"
                                                                            : "PrecisionInsufficient";
            done = true;
          }
        }
      }
    }
  }

  // M5: chamber data
  NSLattice ns;
  bool ns_ok = false;
  {
    AxiomResult& m5 = rep.axioms[4];
    try {
      ns = neron_severi(fd);
      ns_ok = true;
      rep.ns_rank = ns.rho;
      rep.ns_basis = ns.sub.basis;
      rep.ns_gram = ns.restricted;
      if (ns.rho == 0) {
        if (doc.ample_point.is_zero()) {
          m5.verdict = Verdict::Pass;
          m5.detail = "NS(M, F) = 0; chamber condition vacuous";
        } else {
          m5.verdict = Verdict::Fail;
          m5.detail = "NS(M, F) = 0 but a nonzero ample point was supplied";
        }
      } else if ([&] {
                   // F fixing the ray of lambda preserves its chamber
                   // outright, no wall enumeration needed
                   auto in_ns = detail::ns_coordinates(ns, doc.ample_point);
                   if (!in_ns) return false;
                   if (sign_of(pair_rat(fd.lattice.gram, doc.ample_point, doc.ample_point)) <= 0)
                     return false;
                   std::size_t n = fd.rank();
                   // Flam = lambda * F^T; proportional with positive ratio?
                   std::vector<Int> fnum(n, Int(0));
                   for (std::size_t i = 0; i < n; ++i)
                     for (std::size_t j = 0; j < n; ++j)
                       fnum[i] += doc.ample_point.num[j] * fd.frob(i, j);
                   // ratio = q must hold entrywise: F lam = q lam
                   for (std::size_t i = 0; i < n; ++i)
                     if (fnum[i] != q * doc.ample_point.num[i]) return false;
                   return true;
                 }()) {
        m5.verdict = Verdict::Pass;
        m5.detail = "F fixes the ray of the interior point (F lambda = q lambda)";
      } else if (!hodge_index_check(ns)) {
        m5.verdict = Verdict::Precondition;
        m5.detail = "restricted form on NS does not have signature (1, rho-1)";
      } else {
        ChamberContext ctx{&fd, &ns};
        if (!validate_chamber(ctx, doc.ample_point)) {
          m5.verdict = Verdict::Fail;
          auto in_ns = detail::ns_coordinates(ns, doc.ample_point);
          if (!in_ns)
            m5.detail = "ample point is not in NS tensor Q";
          else if (sign_of(pair_rat(fd.lattice.gram, doc.ample_point, doc.ample_point)) <= 0)
            m5.detail = "ample point has non-positive norm";
          else {
            auto walls = roots_in_wall(ctx, doc.ample_point);
            m5.detail = "ample point lies on the wall of " +
                        detail::vector_string(walls.front());
          }
        } else if (!frobenius_preserves_chamber(ctx, doc.ample_point)) {
          m5.verdict = Verdict::Fail;
          std::vector<Int> fnum(fd.rank(), Int(0));
          for (std::size_t i = 0; i < fd.rank(); ++i)
            for (std::size_t j = 0; j < fd.rank(); ++j)
              fnum[i] += doc.ample_point.num[j] * fd.frob(i, j);
          RatVector flam(std::move(fnum), doc.ample_point.den);
          if (sign_of(pair_rat(fd.lattice.gram, doc.ample_point, flam)) <= 0) {
            m5.detail = "F maps the ample point out of the positive-cone component";
          } else {
            auto seps = separating_roots(ctx, doc.ample_point, flam);
            m5.detail = "F crosses the wall of " + detail::vector_string(seps.front());
          }
        } else {
          m5.verdict = Verdict::Pass;
        }
      }
    } catch (const DegenerateRestrictionError& e) {
      m5.verdict = Verdict::Precondition;
      m5.detail = e.what();
    } catch (const NotDefiniteError&) {
      m5.verdict = Verdict::Precondition;
      m5.detail = "wall slice is not negative definite (Hodge index violation)";
    }
  }

  rep.zeta = zeta_report(fd, opt.zeta_terms,
                         rep.certificate ? &rep.certificate.value() : nullptr);

  if (ns_ok && rep.axioms[4].verdict == Verdict::Pass)
    rep.theorem46 = classify_theorem_4_6(fd, ns, doc.ample_point, opt.class_bound);

  return rep;
}

// Machine-readable rendering: a single ordered JSON document with fixed
// field names; identical inputs yield byte-identical reports.
inline std::string report_to_json(const VerificationReport& rep) {
  detail::Json j;
  j["format_version"] = "1";
  j["claims_k3"] = rep.claims_k3;
  detail::Json ax = detail::Json::object();
  for (std::size_t i = 0; i < 5; ++i) {
    detail::Json one;
    one["verdict"] = verdict_name(rep.axioms[i].verdict);
    one["detail"] = rep.axioms[i].detail;
    ax["M" + std::to_string(i + 1)] = std::move(one);
  }
  j["axioms"] = std::move(ax);
  j["newton_slope_multiset"] = rep.slope_multiset;
  j["split_status"] = rep.split_status;
  if (rep.certificate) {
    detail::Json c;
    c["ranks"] = {rep.certificate->ranks[0], rep.certificate->ranks[1], rep.certificate->ranks[2]};
    c["p"] = rep.certificate->p.get_str();
    c["modulus_exponent"] = rep.certificate->N;
    c["basis_unit_det_mod_p"] = rep.certificate->stacked_det_mod_p.get_str();
    c["b0"] = detail::emit_matrix(rep.certificate->b0);
    c["b1"] = detail::emit_matrix(rep.certificate->b1);
    c["b2"] = detail::emit_matrix(rep.certificate->b2);
    j["split_certificate"] = std::move(c);
  }
  j["ns_rank"] = rep.ns_rank;
  j["ns_basis"] = detail::emit_matrix(rep.ns_basis);
  j["ns_gram"] = detail::emit_matrix(rep.ns_gram);
  detail::Json counts = detail::Json::array();
  for (const auto& n : rep.zeta.counts) counts.push_back(n.get_str());
  j["point_counts"] = std::move(counts);
  j["question_flag"] = rep.zeta.question;
  if (rep.zeta.congruence_n1)
    j["n1_not_1_mod_p"] = *rep.zeta.congruence_n1;
  if (rep.theorem46)
    j["theorem_4_6_class"] = theorem46_name(*rep.theorem46);
  j["all_pass"] = rep.all_pass();
  return j.dump(2) + "\n";
}

}  // namespace k3frob
