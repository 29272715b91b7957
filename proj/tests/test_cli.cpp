#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <k3frob/search.hpp>

#include "helpers.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace k3frob;
using namespace k3frob::testing;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

fs::path scratch_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "k3frob_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RunResult run_cli(const std::string& args) {
  fs::path out = scratch_dir() / "stdout.txt";
  fs::path err = scratch_dir() / "stderr.txt";
  std::string cmd = std::string(K3FROB_CLI_PATH) + " " + args + " > " + out.string() + " 2> " +
                    err.string();
  int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

IntMatrix diag_matrix(const std::vector<Int>& d) {
  IntMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

TripleDocument make_doc(Lattice l, IntMatrix f, long p, unsigned long a,
                        std::vector<Int> ample, bool claims_k3) {
  TripleDocument doc;
  doc.params = WeilParams(Int(p), a);
  doc.claims_k3 = claims_k3;
  doc.lattice = std::move(l);
  doc.frob = std::move(f);
  doc.ample_point = RatVector(std::move(ample), Int(1));
  return doc;
}

// generalized all-pass instance: diag(1, 4) on U, q = 2
TripleDocument passing_doc() {
  return make_doc(hyperbolic_plane(), diag_matrix({Int(1), Int(4)}), 2, 1,
                  {Int(0), Int(0)}, false);
}

// scalar Frobenius on the full rank-22 lattice: fails the slope axiom
TripleDocument failing_doc() {
  Lattice l = k3_lattice();
  IntMatrix f = IntMatrix::identity(22) * Int(2);
  std::vector<Int> ample(22, Int(0));
  ample[0] = 1;
  ample[1] = 1;
  return make_doc(std::move(l), std::move(f), 2, 1, std::move(ample), true);
}

fs::path write_doc(const TripleDocument& doc, const std::string& name) {
  fs::path p = scratch_dir() / name;
  spit(p, emit_triple(doc));
  return p;
}

}  // namespace

TEST_CASE("document round trip is byte-identical") {
  TripleDocument doc = failing_doc();
  std::string once = emit_triple(doc);
  std::string twice = emit_triple(parse_triple(once));
  CHECK(once == twice);

  fs::path p = write_doc(doc, "roundtrip.json");
  CHECK(emit_triple(load_triple(p.string())) == once);
}

TEST_CASE("verify exit codes: pass, fail, malformed") {
  fs::path good = write_doc(passing_doc(), "good.json");
  fs::path bad = write_doc(failing_doc(), "bad.json");
  fs::path broken = scratch_dir() / "broken.json";
  spit(broken, "{ not json ");

  RunResult g = run_cli("verify " + good.string());
  CHECK(g.code == 0);
  CHECK(g.out.find("all axioms pass") != std::string::npos);

  RunResult b = run_cli("verify " + bad.string());
  CHECK(b.code == 1);
  CHECK(b.out.find("at least one axiom fails") != std::string::npos);

  RunResult m = run_cli("verify " + broken.string());
  CHECK(m.code == 2);
  CHECK(m.err.find("malformed input") != std::string::npos);
}

TEST_CASE("verify batch mode returns the worst exit code and writes reports") {
  fs::path dir = scratch_dir() / "batch";
  fs::create_directories(dir);
  spit(dir / "a_good.json", emit_triple(passing_doc()));
  spit(dir / "b_bad.json", emit_triple(failing_doc()));
  fs::path reports = scratch_dir() / "reports";
  RunResult r = run_cli("verify " + dir.string() + " --report " + reports.string());
  CHECK(r.code == 1);
  CHECK(fs::exists(reports / "a_good.report.json"));
  CHECK(fs::exists(reports / "b_bad.report.json"));
  auto j = nlohmann::json::parse(slurp(reports / "a_good.report.json"));
  CHECK(j.at("all_pass").get<bool>());
}

TEST_CASE("ns subcommand prints rank and basis") {
  fs::path bad = write_doc(failing_doc(), "ns_in.json");
  RunResult r = run_cli("ns " + bad.string());
  CHECK(r.code == 0);
  CHECK(r.out.find("NS rank: 22") != std::string::npos);
  CHECK(r.out.find("restricted Gram:") != std::string::npos);
}

TEST_CASE("zeta subcommand prints point counts") {
  fs::path good = write_doc(passing_doc(), "zeta_in.json");
  RunResult r = run_cli("zeta " + good.string() + " --max-n 2");
  CHECK(r.code == 0);
  // N_1 = 1 + (1 + 4) + 4, N_2 = 1 + (1 + 16) + 16
  CHECK(r.out.find("N_1 = 10") != std::string::npos);
  CHECK(r.out.find("N_2 = 34") != std::string::npos);
  CHECK(r.out.find("question flag: not set") != std::string::npos);
}

TEST_CASE("zeta question flag on a negative count") {
  TripleDocument doc = make_doc(Lattice(diag_matrix({Int(2), Int(-2)})),
                                diag_matrix({Int(-15), Int(-15)}), 2, 2,
                                {Int(0), Int(0)}, false);
  fs::path p = write_doc(doc, "question.json");
  RunResult r = run_cli("zeta " + p.string() + " --max-n 1");
  CHECK(r.code == 0);
  CHECK(r.out.find("N_1 = -13") != std::string::npos);
  CHECK(r.out.find("question flag: set") != std::string::npos);
}

TEST_CASE("chamber subcommand") {
  // preserved chamber on diag(2, -2) with F = q * identity
  TripleDocument doc = make_doc(Lattice(diag_matrix({Int(2), Int(-2)})),
                                diag_matrix({Int(2), Int(2)}), 2, 1, {Int(2), Int(1)}, false);
  fs::path p = write_doc(doc, "chamber_ok.json");
  RunResult ok = run_cli("chamber " + p.string());
  CHECK(ok.code == 0);
  CHECK(ok.out.find("chamber point valid: yes") != std::string::npos);
  CHECK(ok.out.find("F preserves chamber: yes") != std::string::npos);

  // reflected chamber: F = q * s_delta^T flips the sign on the root
  Lattice l(diag_matrix({Int(2), Int(-2)}));
  IntMatrix s = reflection_matrix(l, {Int(0), Int(1)});
  TripleDocument flip = make_doc(l, s.transpose() * Int(2), 2, 1, {Int(2), Int(1)}, false);
  fs::path pf = write_doc(flip, "chamber_flip.json");
  RunResult fl = run_cli("chamber " + pf.string());
  CHECK(fl.code == 1);
  CHECK(fl.out.find("F preserves chamber: no") != std::string::npos);
  CHECK(fl.out.find("separating root:") != std::string::npos);

  // invalid point (on a wall)
  TripleDocument wall = make_doc(Lattice(diag_matrix({Int(2), Int(-2)})),
                                 diag_matrix({Int(2), Int(2)}), 2, 1, {Int(1), Int(0)}, false);
  fs::path pw = write_doc(wall, "chamber_wall.json");
  RunResult w = run_cli("chamber " + pw.string());
  CHECK(w.code == 1);
  CHECK(w.out.find("chamber point valid: no") != std::string::npos);
}

TEST_CASE("lattice subcommand emits the named Gram matrices") {
  RunResult r = run_cli("lattice k3");
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("name") == "k3");
  Lattice k3 = k3_lattice();
  auto rows = j.at("gram");
  REQUIRE(rows.size() == 22);
  for (std::size_t i = 0; i < 22; ++i)
    for (std::size_t k = 0; k < 22; ++k)
      CHECK(Int(rows[i][k].get<std::string>()) == k3.gram(i, k));

  CHECK(run_cli("lattice u").code == 0);
  CHECK(run_cli("lattice e8m").code == 0);
  CHECK(run_cli("lattice nope").code == 2);
}

TEST_CASE("search-weil: degree 2, q = 2 emits four candidates") {
  RunResult r = run_cli("search-weil --q 2 --degree 2 --stats");
  CHECK(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  std::vector<long> traces;
  while (std::getline(lines, line)) {
    auto j = nlohmann::json::parse(line);
    traces.push_back(std::stol(j.at("trace").get<std::string>()));
    CHECK(j.at("p_coeffs").size() == 3);
    CHECK(j.at("slopes") == "{0: 1, 2: 1}");
  }
  std::sort(traces.begin(), traces.end());
  CHECK(traces == std::vector<long>{-3, -1, 1, 3});
  CHECK(r.err.find("emitted=4") != std::string::npos);
}

TEST_CASE("search-weil: worker count never changes the output bytes") {
  fs::path o1 = scratch_dir() / "w1.jsonl";
  fs::path o4 = scratch_dir() / "w4.jsonl";
  CHECK(run_cli("search-weil --q 3 --degree 4 --workers 1 --out " + o1.string()).code == 0);
  CHECK(run_cli("search-weil --q 3 --degree 4 --workers 4 --out " + o4.string()).code == 0);
  std::string a = slurp(o1), b = slurp(o4);
  CHECK(!a.empty());
  CHECK(a == b);
}

TEST_CASE("search-weil: cuts are audit-equivalent") {
  fs::path oc = scratch_dir() / "cuts.jsonl";
  fs::path on = scratch_dir() / "nocuts.jsonl";
  CHECK(run_cli("search-weil --q 2 --degree 4 --out " + oc.string()).code == 0);
  CHECK(run_cli("search-weil --q 2 --degree 4 --no-cuts --out " + on.string()).code == 0);
  CHECK(slurp(oc) == slurp(on));
}

TEST_CASE("search-weil: checkpoint resume and digest mismatch") {
  fs::path cp = scratch_dir() / "resume.cp";
  fs::path o = scratch_dir() / "full.jsonl";
  fs::remove(cp);
  CHECK(run_cli("search-weil --q 2 --degree 4 --checkpoint " + cp.string() + " --out " +
                o.string())
            .code == 0);
  REQUIRE(fs::exists(cp));
  std::string full = slurp(o);
  CHECK(!full.empty());

  // resuming from a completed checkpoint emits nothing new
  fs::path o2 = scratch_dir() / "resumed.jsonl";
  CHECK(run_cli("search-weil --q 2 --degree 4 --checkpoint " + cp.string() + " --out " +
                o2.string())
            .code == 0);
  CHECK(slurp(o2).empty());

  // a checkpoint written for another spec is refused
  RunResult bad = run_cli("search-weil --q 2 --degree 6 --checkpoint " + cp.string());
  CHECK(bad.code == 3);
  CHECK(bad.err.find("different search spec") != std::string::npos);

  // partial checkpoint: resume yields exactly the remaining suffix
  SearchSpec spec;
  spec.params = WeilParams(Int(2), 1);
  spec.degree = 4;
  SearchCheckpoint mid;
  mid.digest = spec.digest();
  mid.any = true;
  mid.last_completed_top = -1;
  fs::path cpm = scratch_dir() / "mid.cp";
  spit(cpm, checkpoint_to_string(mid));
  fs::path o3 = scratch_dir() / "suffix.jsonl";
  CHECK(run_cli("search-weil --q 2 --degree 4 --checkpoint " + cpm.string() + " --out " +
                o3.string())
            .code == 0);
  std::string suffix = slurp(o3);
  CHECK(!suffix.empty());
  CHECK(suffix.size() < full.size());
  CHECK(full.substr(full.size() - suffix.size()) == suffix);
}

TEST_CASE("search-weil: question mode and bound notes") {
  RunResult r = run_cli("search-weil --q 23 --degree 22 --question");
  CHECK(r.code == 0);
  CHECK(r.out.find("# empty:") != std::string::npos);
  CHECK(r.out.find("N_1 < 0 requires") != std::string::npos);

  RunResult e = run_cli("search-weil --q 2 --degree 2 --trace-max -5");
  CHECK(e.code == 0);
  CHECK(e.out.find("below the minimum achievable trace") != std::string::npos);
}

TEST_CASE("search-weil: invalid arguments are rejected") {
  CHECK(run_cli("search-weil --q 6 --degree 2").code == 2);   // not a prime power
  CHECK(run_cli("search-weil --q 2 --degree 3").code == 2);   // odd degree
}
