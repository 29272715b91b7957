#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"

using namespace k3frob;
using namespace k3frob::testing;

namespace {

IntMatrix diag_matrix(const std::vector<Int>& d) {
  IntMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

RatVector rv(std::vector<long> v, long den = 1) {
  std::vector<Int> n(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) n[i] = v[i];
  return RatVector(std::move(n), Int(den));
}

TripleDocument make_doc(Lattice l, IntMatrix f, Int p, unsigned long a, RatVector ample,
                        bool claims_k3) {
  TripleDocument doc;
  doc.params = WeilParams(std::move(p), a);
  doc.claims_k3 = claims_k3;
  doc.lattice = std::move(l);
  doc.frob = std::move(f);
  doc.ample_point = std::move(ample);
  return doc;
}

// companion of t^2 - t + q^2 with its invariant Gram [[2,1],[1,2q^2]]
std::pair<Lattice, IntMatrix> companion_block(long q) {
  Lattice l(IntMatrix::from_rows({{Int(2), Int(1)}, {Int(1), Int(2 * q * q)}}));
  IntMatrix c(2, 2);
  c(0, 1) = -q * q;
  c(1, 0) = 1;
  c(1, 1) = 1;
  return {std::move(l), std::move(c)};
}

IntMatrix block_diag(const IntMatrix& a, const IntMatrix& b) {
  std::size_t n = a.rows(), m = b.rows();
  IntMatrix r(n + m, n + m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r(i, j) = a(i, j);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) r(n + i, n + j) = b(i, j);
  return r;
}

}  // namespace

TEST_CASE("scalar Frobenius on the K3 lattice") {
  std::vector<long> lam(22, 0);
  lam[0] = 1;
  lam[1] = 1;
  TripleDocument doc = make_doc(k3_lattice(), IntMatrix::identity(22) * Int(2), Int(2), 1,
                                rv(lam), true);
  VerificationReport rep = verify_triple(doc);
  CHECK(rep.axioms[0].verdict == Verdict::Pass);
  CHECK(rep.axioms[1].verdict == Verdict::Pass);
  CHECK(rep.axioms[2].verdict == Verdict::Pass);
  CHECK(rep.axioms[3].verdict == Verdict::Fail);
  CHECK(rep.slope_multiset == "{1: 22}");
  CHECK(rep.axioms[4].verdict == Verdict::Pass);
  CHECK(rep.ns_rank == 22);
  CHECK(!rep.all_pass());
  // zeta: N_1 = 1 + 22q + q^2, no congruence without a certificate
  CHECK(rep.zeta.counts[0] == 1 + 22 * 2 + 4);
  CHECK(!rep.zeta.question);
  CHECK(!rep.zeta.congruence_n1.has_value());
  // classification: rho = 22 >= 12
  REQUIRE(rep.theorem46.has_value());
  CHECK(*rep.theorem46 == Theorem46Class::Rank12);
}

TEST_CASE("q sigma with a reflection sigma") {
  // sigma = reflection in an E8 root: fixes the U summands, so the
  // interior point (1,1,0,...) is sigma-fixed
  Lattice k3 = k3_lattice();
  std::vector<Int> delta(22, Int(0));
  delta[6] = 1;  // first simple root of the first E8(-1) copy
  IntMatrix sigma = reflection_matrix(k3, delta);
  std::vector<long> lam(22, 0);
  lam[0] = 1;
  lam[1] = 1;
  TripleDocument doc =
      make_doc(k3, sigma.transpose() * Int(3), Int(3), 1, rv(lam), true);
  VerificationReport rep = verify_triple(doc);
  CHECK(rep.axioms[0].verdict == Verdict::Pass);
  CHECK(rep.axioms[1].verdict == Verdict::Pass);
  CHECK(rep.axioms[2].verdict == Verdict::Pass);
  CHECK(rep.axioms[3].verdict == Verdict::Fail);
  CHECK(rep.slope_multiset == "{1: 22}");
  CHECK(rep.split_status == "NotOrdinary");
  CHECK(rep.axioms[4].verdict == Verdict::Pass);  // F lambda = q lambda
}

TEST_CASE("generalized rank-2 instance passes everything") {
  TripleDocument doc = make_doc(hyperbolic_plane(), diag_matrix({Int(1), Int(4)}), Int(2), 1,
                                rv({0, 0}), false);
  VerificationReport rep = verify_triple(doc);
  for (int i = 0; i < 5; ++i) CHECK(rep.axioms[i].verdict == Verdict::Pass);
  CHECK(rep.all_pass());
  CHECK(rep.split_status == "certified");
  REQUIRE(rep.certificate.has_value());
  CHECK(rep.certificate->ranks == std::array<std::size_t, 3>{1, 0, 1});
  CHECK(rep.ns_rank == 0);
  // N_1 = 1 + (1 + q^2) + q^2 = 2 + 2 q^2 = 10; 10 mod 2 = 0 != 1
  CHECK(rep.zeta.counts[0] == 10);
  REQUIRE(rep.zeta.congruence_n1.has_value());
  CHECK(*rep.zeta.congruence_n1);
}

TEST_CASE("question flag from a negative trace") {
  TripleDocument doc = make_doc(hyperbolic_plane(), diag_matrix({Int(-15), Int(-15)}), Int(2), 1,
                                rv({0, 0}), false);
  FrobeniusData fd(doc.lattice, doc.frob, doc.params);
  ZetaReport z = zeta_report(fd, 3);
  CHECK(z.counts[0] == -25);
  CHECK(z.question);
  CHECK(question_predicate(fd));
}

TEST_CASE("classification: hyperbolic plane inside NS") {
  long q = 5;
  auto [cb_lat, cb_f] = companion_block(q);
  Lattice l = direct_sum(hyperbolic_plane(), cb_lat);
  IntMatrix f = block_diag(IntMatrix::identity(2) * Int(q), cb_f);
  TripleDocument doc = make_doc(l, f, Int(q), 1, rv({2, 1, 0, 0}), false);
  VerificationReport rep = verify_triple(doc);
  CHECK(rep.axioms[1].verdict == Verdict::Pass);
  CHECK(rep.axioms[4].verdict == Verdict::Pass);
  CHECK(rep.ns_rank == 2);
  REQUIRE(rep.theorem46.has_value());
  CHECK(*rep.theorem46 == Theorem46Class::HyperbolicPlane);
}

TEST_CASE("classification: small-degree polarization") {
  long q = 11;
  auto [cb_lat, cb_f] = companion_block(q);
  Lattice one(diag_matrix({Int(2)}));
  Lattice l = direct_sum(one, cb_lat);
  IntMatrix fq(1, 1);
  fq(0, 0) = q;
  IntMatrix f = block_diag(fq, cb_f);
  TripleDocument doc = make_doc(l, f, Int(q), 1, rv({1, 0, 0}), false);
  VerificationReport rep = verify_triple(doc);
  CHECK(rep.axioms[4].verdict == Verdict::Pass);
  CHECK(rep.ns_rank == 1);
  REQUIRE(rep.theorem46.has_value());
  // norm 2 < p - 4 = 7
  CHECK(*rep.theorem46 == Theorem46Class::SmallDegree);
}

TEST_CASE("classification: provable None at rank 1 with small p") {
  long q = 3;
  auto [cb_lat, cb_f] = companion_block(q);
  Lattice one(diag_matrix({Int(2)}));
  Lattice l = direct_sum(one, cb_lat);
  IntMatrix fq(1, 1);
  fq(0, 0) = q;
  IntMatrix f = block_diag(fq, cb_f);
  TripleDocument doc = make_doc(l, f, Int(q), 1, rv({1, 0, 0}), false);
  VerificationReport rep = verify_triple(doc);
  CHECK(rep.axioms[4].verdict == Verdict::Pass);
  REQUIRE(rep.theorem46.has_value());
  // p - 4 < 2: no even norm fits, rank 1 < 12, no U in rank 1
  CHECK(*rep.theorem46 == Theorem46Class::None);
}

TEST_CASE("M5 precondition on a Hodge-index violation") {
  // F = q * (-id + id) on U + U: NS is everything, signature (2,2)
  Lattice uu = direct_sum(hyperbolic_plane(), hyperbolic_plane());
  IntMatrix f = block_diag(IntMatrix::identity(2) * Int(-2), IntMatrix::identity(2) * Int(2));
  TripleDocument doc = make_doc(uu, f, Int(2), 1, rv({1, 1, 1, 1}), false);
  VerificationReport rep = verify_triple(doc);
  CHECK(rep.ns_rank == 4);
  CHECK(rep.axioms[4].verdict == Verdict::Precondition);
}

TEST_CASE("M5 failure witnesses") {
  // wall hit: lambda on the wall of a root
  Lattice l(diag_matrix({Int(2), Int(-2)}));
  {
    // U + <-2> with F = q diag(1,1,-1): lambda = (2,2,1) is not a ray of F
    // and lies on the wall of the root (1,0,1)
    Lattice l3 = direct_sum(hyperbolic_plane(), Lattice(diag_matrix({Int(-2)})));
    TripleDocument doc = make_doc(l3, diag_matrix({Int(2), Int(2), Int(-2)}), Int(2), 1,
                                  rv({2, 2, 1}), false);
    VerificationReport rep = verify_triple(doc);
    CHECK(rep.axioms[4].verdict == Verdict::Fail);
    CHECK(rep.axioms[4].detail.find("wall") != std::string::npos);
  }
  // chamber flip: F = q * reflection
  {
    IntMatrix s = reflection_matrix(l, {Int(0), Int(1)});
    TripleDocument doc = make_doc(l, s.transpose() * Int(2), Int(2), 1, rv({2, 1}), false);
    VerificationReport rep = verify_triple(doc);
    CHECK(rep.axioms[4].verdict == Verdict::Fail);
    CHECK(rep.axioms[4].detail.find("wall") != std::string::npos);
  }
  // non-NS ample point
  {
    TripleDocument doc = make_doc(hyperbolic_plane(), diag_matrix({Int(1), Int(4)}), Int(2), 1,
                                  rv({1, 1}), false);
    VerificationReport rep = verify_triple(doc);
    CHECK(rep.axioms[4].verdict == Verdict::Fail);
  }
}

TEST_CASE("report self-consistency and determinism") {
  TripleDocument doc = make_doc(hyperbolic_plane(), diag_matrix({Int(1), Int(4)}), Int(2), 1,
                                rv({0, 0}), false);
  VerificationReport r1 = verify_triple(doc);
  VerificationReport r2 = verify_triple(doc);
  std::string j1 = report_to_json(r1), j2 = report_to_json(r2);
  CHECK(j1 == j2);
  CHECK(j1.find("\"all_pass\": true") != std::string::npos);
  // M4 pass => ordinary-compatible polygon recorded
  CHECK(r1.split_status == "certified");
  CHECK(!r1.slope_multiset.empty());
  // question flag consistency
  CHECK(r1.zeta.question == (r1.zeta.counts[0] < 0));
}

TEST_CASE("conjugation covariance of the axiom verdicts") {
  // conjugate a generalized passing instance by a lattice isometry
  Lattice u = hyperbolic_plane();
  IntMatrix f = diag_matrix({Int(1), Int(4)});
  // swap isometry of U
  IntMatrix s(2, 2);
  s(0, 1) = 1;
  s(1, 0) = 1;
  IntMatrix fc = s * f * s;  // s is an involution
  TripleDocument doc = make_doc(u, fc, Int(2), 1, rv({0, 0}), false);
  VerificationReport rep = verify_triple(doc);
  for (int i = 0; i < 5; ++i) CHECK(rep.axioms[i].verdict == Verdict::Pass);
  CHECK(rep.split_status == "certified");
}

TEST_CASE("jordan family is rejected with a divisibility witness") {
  Lattice u = hyperbolic_plane();
  IntMatrix f(2, 2);
  f(0, 0) = 2;
  f(0, 1) = 1;
  f(1, 1) = 2;
  TripleDocument doc = make_doc(u, f, Int(2), 1, rv({0, 0}), false);
  VerificationReport rep = verify_triple(doc);
  CHECK(rep.axioms[3].verdict == Verdict::Fail);
  CHECK(rep.split_status == "Divisibility");
}
