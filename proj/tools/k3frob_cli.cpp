// Command-line surface: triple verification, NS computation, zeta reports,
// chamber checks, lattice emission, and the Weil-polynomial search.
// Exit codes: 0 success / all axioms pass, 1 axiom failure, 2 malformed
// input, 3 checkpoint mismatch.

#include <k3frob/search.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace k3frob;

namespace {

using Json = nlohmann::ordered_json;

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MalformedInputError("document", "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string matrix_text(const IntMatrix& m) {
  std::ostringstream out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out << "  [";
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ", ";
      out << m(i, j).get_str();
    }
    out << "]\n";
  }
  return out.str();
}

int verify_one(const std::string& path, const VerifyOptions& opt, const std::string& report_path) {
  TripleDocument doc;
  try {
    doc = load_triple(path);
  } catch (const MalformedInputError& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return 2;
  }
  VerificationReport rep = verify_triple(doc, opt);
  std::cout << path << ":\n";
  for (std::size_t i = 0; i < 5; ++i) {
    std::cout << "  M" << i + 1 << ": " << verdict_name(rep.axioms[i].verdict);
    if (!rep.axioms[i].detail.empty()) std::cout << " (" << rep.axioms[i].detail << ")";
    std::cout << "\n";
  }
  std::cout << "  newton slopes: " << rep.slope_multiset << "\n";
  std::cout << "  split: " << rep.split_status << "\n";
  std::cout << "  NS rank: " << rep.ns_rank << "\n";
  if (!rep.zeta.counts.empty())
    std::cout << "  N_1 = " << rep.zeta.counts[0].get_str()
              << (rep.zeta.question ? "  (question flag set)" : "") << "\n";
  if (rep.theorem46) std::cout << "  class: " << theorem46_name(*rep.theorem46) << "\n";
  std::cout << "  verdict: " << (rep.all_pass() ? "all axioms pass" : "at least one axiom fails")
            << "\n";
  if (!report_path.empty()) write_file(report_path, report_to_json(rep));
  return rep.all_pass() ? 0 : 1;
}

Int parse_cli_int(const std::string& s, const char* flag) {
  try {
    return Int(s);
  } catch (const std::invalid_argument&) {
    throw CLI::ValidationError(flag, "not a decimal integer: " + s);
  }
}

WeilParams params_from_q(const Int& q) {
  if (q < 2) throw std::domain_error("q must be at least 2");
  Int p = 2;
  while (q % p != 0) p = next_prime_above(p);
  unsigned long a = 0;
  Int rest = q;
  while (rest % p == 0) {
    rest = exact_div(rest, p);
    ++a;
  }
  if (rest != 1) throw std::domain_error("q must be a prime power");
  return WeilParams(p, a);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact lattice-side toolkit for q^2-scaled Frobenius triples"};
  app.require_subcommand(1);

  // verify
  auto* verify = app.add_subcommand("verify", "check axioms M1-M5 on a triple document");
  std::string verify_path, verify_report;
  unsigned long verify_precision = 0;
  verify->add_option("path", verify_path, "triple document or directory (batch mode)")->required();
  verify->add_option("--precision", verify_precision, "p-adic precision override");
  verify->add_option("--report", verify_report,
                     "machine-readable report path (batch: output directory)");

  // ns
  auto* ns_cmd = app.add_subcommand("ns", "print NS(M, F) rank, basis, restricted Gram");
  std::string ns_path;
  ns_cmd->add_option("path", ns_path)->required();

  // zeta
  auto* zeta_cmd = app.add_subcommand("zeta", "print point counts N_1..N_k and the question flag");
  std::string zeta_path;
  unsigned long zeta_max = 4;
  zeta_cmd->add_option("path", zeta_path)->required();
  zeta_cmd->add_option("--max-n", zeta_max, "largest exponent");

  // chamber
  auto* chamber_cmd = app.add_subcommand("chamber", "chamber validity and F-invariance");
  std::string chamber_path;
  chamber_cmd->add_option("path", chamber_path)->required();

  // lattice
  auto* lattice_cmd = app.add_subcommand("lattice", "emit a named Gram document");
  std::string lattice_name;
  lattice_cmd->add_option("name", lattice_name, "one of: u, e8m, k3")->required();

  // search-weil
  auto* search_cmd = app.add_subcommand("search-weil", "enumerate ordinary q^2-Weil polynomials");
  std::string sq = "2", s_trace_max, s_checkpoint, s_out;
  unsigned long s_degree = 22, s_workers = 1;
  bool s_question = false, s_no_cuts = false, s_stats = false;
  search_cmd->add_option("--q", sq, "prime power q")->required();
  search_cmd->add_option("--degree", s_degree, "degree of the enumerated part (even)");
  search_cmd->add_option("--trace-max", s_trace_max, "upper bound on trace(P)");
  search_cmd->add_option("--checkpoint", s_checkpoint, "checkpoint file (resume + update)");
  search_cmd->add_option("--out", s_out, "output file (default stdout)");
  search_cmd->add_option("--workers", s_workers, "worker threads (never affects output)");
  search_cmd->add_flag("--question", s_question, "apply the N_1 < 0 trace cut");
  search_cmd->add_flag("--no-cuts", s_no_cuts, "disable heuristic pruning (audit mode)");
  search_cmd->add_flag("--stats", s_stats, "print node/prune counters to stderr");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) {
      VerifyOptions opt;
      if (verify_precision) opt.precision = verify_precision;
      if (fs::is_directory(verify_path)) {
        int worst = 0;
        std::vector<fs::path> inputs;
        for (const auto& e : fs::directory_iterator(verify_path))
          if (e.path().extension() == ".json") inputs.push_back(e.path());
        std::sort(inputs.begin(), inputs.end());
        for (const auto& in : inputs) {
          std::string rep_path;
          if (!verify_report.empty()) {
            fs::create_directories(verify_report);
            rep_path = (fs::path(verify_report) / (in.stem().string() + ".report.json")).string();
          }
          worst = std::max(worst, verify_one(in.string(), opt, rep_path));
        }
        return worst;
      }
      return verify_one(verify_path, opt, verify_report);
    }

    if (*ns_cmd) {
      TripleDocument doc;
      try {
        doc = load_triple(ns_path);
      } catch (const MalformedInputError& e) {
        std::cerr << e.what() << "\n";
        return 2;
      }
      FrobeniusData fd(doc.lattice, doc.frob, doc.params);
      NSLattice ns = neron_severi(fd);
      std::cout << "NS rank: " << ns.rho << "\n";
      std::cout << "basis (rows, ambient coordinates):\n" << matrix_text(ns.sub.basis);
      std::cout << "restricted Gram:\n" << matrix_text(ns.restricted);
      return 0;
    }

    if (*zeta_cmd) {
      TripleDocument doc;
      try {
        doc = load_triple(zeta_path);
      } catch (const MalformedInputError& e) {
        std::cerr << e.what() << "\n";
        return 2;
      }
      FrobeniusData fd(doc.lattice, doc.frob, doc.params);
      ZetaReport z = zeta_report(fd, zeta_max);
      for (std::size_t i = 0; i < z.counts.size(); ++i)
        std::cout << "N_" << i + 1 << " = " << z.counts[i].get_str() << "\n";
      std::cout << "question flag: " << (z.question ? "set (N_1 < 0)" : "not set") << "\n";
      return 0;
    }

    if (*chamber_cmd) {
      TripleDocument doc;
      try {
        doc = load_triple(chamber_path);
      } catch (const MalformedInputError& e) {
        std::cerr << e.what() << "\n";
        return 2;
      }
      FrobeniusData fd(doc.lattice, doc.frob, doc.params);
      NSLattice ns = neron_severi(fd);
      if (ns.rho == 0) {
        std::cout << "NS(M, F) = 0; no chamber data\n";
        return doc.ample_point.is_zero() ? 0 : 1;
      }
      ChamberContext ctx{&fd, &ns};
      bool valid = validate_chamber(ctx, doc.ample_point);
      std::cout << "chamber point valid: " << (valid ? "yes" : "no") << "\n";
      if (!valid) return 1;
      bool inv = frobenius_preserves_chamber(ctx, doc.ample_point);
      std::cout << "F preserves chamber: " << (inv ? "yes" : "no") << "\n";
      if (!inv) {
        std::vector<Int> fnum(fd.rank(), Int(0));
        for (std::size_t i = 0; i < fd.rank(); ++i)
          for (std::size_t j = 0; j < fd.rank(); ++j)
            fnum[i] += doc.ample_point.num[j] * fd.frob(i, j);
        RatVector flam(std::move(fnum), doc.ample_point.den);
        if (sign_of(pair_rat(fd.lattice.gram, doc.ample_point, flam)) > 0)
          for (const auto& w : separating_roots(ctx, doc.ample_point, flam))
            std::cout << "separating root: " << detail::vector_string(w) << "\n";
        return 1;
      }
      return 0;
    }

    if (*lattice_cmd) {
      Lattice l;
      if (lattice_name == "u")
        l = hyperbolic_plane();
      else if (lattice_name == "e8m")
        l = e8_minus();
      else if (lattice_name == "k3")
        l = k3_lattice();
      else {
        std::cerr << "unknown lattice name: " << lattice_name << " (expected u, e8m, k3)\n";
        return 2;
      }
      Json j;
      j["format_version"] = "1";
      j["name"] = lattice_name;
      j["gram"] = detail::emit_matrix(l.gram);
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (*search_cmd) {
      SearchSpec spec;
      try {
        spec.params = params_from_q(parse_cli_int(sq, "--q"));
      } catch (const std::domain_error& e) {
        std::cerr << e.what() << "\n";
        return 2;
      }
      spec.degree = s_degree;
      if (!s_trace_max.empty()) spec.trace_max = parse_cli_int(s_trace_max, "--trace-max");
      spec.enable_cuts = !s_no_cuts;
      spec.workers = s_workers;
      try {
        spec.validate();
      } catch (const std::domain_error& e) {
        std::cerr << e.what() << "\n";
        return 2;
      }

      SearchCheckpoint resume;
      bool have_resume = false;
      if (!s_checkpoint.empty() && fs::exists(s_checkpoint)) {
        try {
          resume = checkpoint_from_string(read_file(s_checkpoint));
        } catch (const MalformedInputError& e) {
          std::cerr << e.what() << "\n";
          return 2;
        }
        have_resume = true;
        // the digest must match the spec the checkpoint was written for
        std::string expect = s_question ? [&] {
          SearchSpec qs = spec;
          Int cut = -(1 + spec.params.q * spec.params.q) - 1;
          if (!qs.trace_max || *qs.trace_max > cut) qs.trace_max = cut;
          return qs.digest();
        }() : spec.digest();
        if (resume.digest != expect) {
          std::cerr << "checkpoint was written for a different search spec\n";
          return 3;
        }
      }

      std::function<void(const SearchCheckpoint&)> on_done;
      if (!s_checkpoint.empty())
        on_done = [&s_checkpoint](const SearchCheckpoint& cp) {
          write_file(s_checkpoint, checkpoint_to_string(cp));
        };

      SearchResult res = s_question
                             ? question_search(spec, have_resume ? &resume : nullptr, on_done)
                             : enumerate_ordinary_weil(spec, have_resume ? &resume : nullptr,
                                                       on_done);
      std::ostringstream out;
      for (const auto& rec : res.records) {
        Json j;
        Json pc = Json::array(), rc = Json::array();
        for (const auto& c : rec.p.coeffs()) pc.push_back(c.get_str());
        for (const auto& c : rec.r.coeffs()) rc.push_back(c.get_str());
        j["p_coeffs"] = std::move(pc);
        j["r_coeffs"] = std::move(rc);
        j["trace"] = rec.trace.get_str();
        j["slopes"] = rec.slope_multiset;
        out << j.dump() << "\n";
      }
      if (!res.note.empty()) out << "# " << res.note << "\n";
      if (s_out.empty())
        std::cout << out.str();
      else
        write_file(s_out, out.str());
      if (s_stats)
        std::cerr << "nodes=" << res.stats.nodes << " pruned_trace=" << res.stats.pruned_trace
                  << " pruned_padic=" << res.stats.pruned_padic
                  << " pruned_interlace=" << res.stats.pruned_interlace
                  << " leaves=" << res.stats.leaves << " emitted=" << res.stats.emitted << "\n";
      return 0;
    }
  } catch (const MalformedInputError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
