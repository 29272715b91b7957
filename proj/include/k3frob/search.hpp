#pragma once

// Enumeration of ordinary q^2-Weil polynomials P(t) = t^n R(t + q^2/t)
// (times optional forced (t -+ q) factors) by DFS over the coefficients of
// the monic real-rooted companion R. Pruning cuts are speed-only
// heuristics; every emitted candidate is re-certified on the exact path
// (Sturm + Newton polygon), so cuts can be disabled for audit runs.

#include <k3frob/verifier.hpp>

#include <atomic>
#include <thread>

namespace k3frob {

struct SearchSpec {
  WeilParams params;
  unsigned long degree = 22;       // degree of the R-enumerated part, = 2n
  std::optional<Int> trace_max;    // require trace(P) <= this; empty = no cut
  unsigned long forced_minus = 0;  // forced (t - q) factors
  unsigned long forced_plus = 0;   // forced (t + q) factors
  bool enable_cuts = true;
  unsigned long workers = 1;

  unsigned long half() const { return degree / 2; }
  unsigned long total_degree() const { return degree + forced_minus + forced_plus; }
  void validate() const {
    if (degree == 0 || degree % 2 != 0)
      throw std::domain_error("search degree must be a positive even integer");
  }
  // canonical digest for checkpoint compatibility
  std::string digest() const {
    std::ostringstream s;
    s << "p=" << params.p.get_str() << ";a=" << params.a << ";deg=" << degree
      << ";tmax=" << (trace_max ? trace_max->get_str() : std::string("none"))
      << ";fm=" << forced_minus << ";fp=" << forced_plus;
    return s.str();
  }
};

struct CandidateRecord {
  IntPoly p;        // full assembled polynomial
  IntPoly r;        // companion factor
  Int trace;
  std::string slope_multiset;
};

struct SearchStats {
  unsigned long long nodes = 0;
  unsigned long long pruned_trace = 0;
  unsigned long long pruned_padic = 0;
  unsigned long long pruned_interlace = 0;
  unsigned long long leaves = 0;
  unsigned long long emitted = 0;

  SearchStats& operator+=(const SearchStats& o) {
    nodes += o.nodes;
    pruned_trace += o.pruned_trace;
    pruned_padic += o.pruned_padic;
    pruned_interlace += o.pruned_interlace;
    leaves += o.leaves;
    emitted += o.emitted;
    return *this;
  }
};

struct SearchResult {
  std::vector<CandidateRecord> records;  // sorted by R coefficients, top first
  SearchStats stats;
  std::string note;  // set when the space is empty by a bound argument
};

namespace detail {

inline Int binomial(unsigned long n, unsigned long k) {
  Int r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

// P(t) = t^n R(t + q^2/t) for monic R of degree n.
inline IntPoly assemble_from_companion(const IntPoly& r, const Int& q) {
  unsigned long n = static_cast<unsigned long>(r.degree());
  IntPoly shifted_square({q * q, Int(0), Int(1)});  // t^2 + q^2
  IntPoly power = IntPoly::constant(1);
  IntPoly p;
  for (unsigned long k = 0; k <= n; ++k) {
    const Int& c = r[k];
    if (c != 0) p = p + IntPoly::monomial(n - k, c) * power;
    if (k < n) power = power * shifted_square;
  }
  return p;
}

// all roots of the generalized shape {0:1, a:deg-2, 2a:1}
inline bool is_ordinary_weil_shape(const NewtonPolygon& np, unsigned long a, unsigned long deg) {
  auto v = np.root_valuations();
  std::map<Rat, unsigned long> want{{Rat(0), 1}, {Rat(Int(2 * a)), 1}};
  if (deg > 2) want[Rat(Int(a))] = deg - 2;
  return v == want;
}

// every real root of f lies in [lo_closed, hi_closed] and f is real-rooted;
// exact Sturm path on the squarefree part
inline bool real_rooted_in(const IntPoly& f, const Int& lo, const Int& hi) {
  IntPoly sf = squarefree_part(f);
  if (sf.degree() <= 0) return true;
  // count distinct roots in (lo - 1, hi]; endpoints are genuine roots only
  // if they evaluate to zero, which the interval handles: lo itself is
  // included via the widened left end, then filtered by an exact bound test
  unsigned long inside = sturm_count(sf, Rat(lo - 1), Rat(hi));
  if (inside != static_cast<unsigned long>(sf.degree())) return false;
  // no root strictly left of lo: count in (lo - 1, lo) must be zero,
  // equivalently all roots of sf in (lo - 1, hi] are >= lo
  unsigned long left = sturm_count(sf, Rat(lo - 1), Rat(lo));
  if (sf.eval(lo) == 0) left -= 1;  // (lo-1, lo] includes lo itself
  return left == 0;
}

struct DfsContext {
  const SearchSpec* spec;
  Int q, p, two_q;
  unsigned long n;
  std::vector<Int> coeffs;  // r_{n-1} .. r_0 as chosen (index d = n-1-position)
  std::vector<CandidateRecord>* out;
  SearchStats stats;
};

inline void dfs(DfsContext& ctx, unsigned long depth) {
  const SearchSpec& spec = *ctx.spec;
  unsigned long n = ctx.n;
  if (depth == n) {
    ++ctx.stats.leaves;
    // assemble R ascending: coeffs[k] is r_{n-1-k}
    std::vector<Int> rc(n + 1, Int(0));
    rc[n] = 1;
    for (unsigned long k = 0; k < n; ++k) rc[n - 1 - k] = ctx.coeffs[k];
    IntPoly r(std::move(rc));
    // exact leaf certificate: R real-rooted in [-2q, 2q]
    if (!real_rooted_in(r, -ctx.two_q, ctx.two_q)) return;
    IntPoly p = assemble_from_companion(r, ctx.q);
    for (unsigned long i = 0; i < spec.forced_minus; ++i)
      p = p * IntPoly({-ctx.q, Int(1)});
    for (unsigned long i = 0; i < spec.forced_plus; ++i)
      p = p * IntPoly({ctx.q, Int(1)});
    if (!is_weil_q2(p, ctx.q)) return;
    Int trace = -p[static_cast<std::size_t>(p.degree() - 1)];
    if (spec.trace_max && trace > *spec.trace_max) return;
    if (p[0] == 0) return;
    NewtonPolygon np = newton_polygon(p, ctx.p);
    if (!is_ordinary_weil_shape(np, spec.params.a, spec.total_degree())) return;
    CandidateRecord rec;
    rec.p = std::move(p);
    rec.r = std::move(r);
    rec.trace = std::move(trace);
    rec.slope_multiset = slope_multiset_string(np);
    ctx.out->push_back(std::move(rec));
    ++ctx.stats.emitted;
    return;
  }
  unsigned long k = depth + 1;  // choosing r_{n-k}
  Int bound = binomial(n, k) * int_pow(ctx.two_q, k);
  for (Int v = -bound; v <= bound; ++v) {
    ++ctx.stats.nodes;
    ctx.coeffs[depth] = v;
    if (depth == 0 && spec.enable_cuts) {
      // trace(P) = -r_{n-1} + (forced_minus - forced_plus) q
      Int trace = -v + (Int(spec.forced_minus) - Int(spec.forced_plus)) * ctx.q;
      if (spec.trace_max && trace > *spec.trace_max) {
        ++ctx.stats.pruned_trace;
        continue;
      }
      if (mod_floor(trace, ctx.p) == 0) {  // slope-0 segment needs p not dividing the trace
        ++ctx.stats.pruned_padic;
        continue;
      }
    }
    if (spec.enable_cuts && depth >= 1 && depth + 1 < n) {
      // the (n-k)-th derivative of R is already determined; it must be
      // real-rooted in [-2q, 2q] by repeated Rolle
      std::vector<Int> dc(k + 1, Int(0));
      for (unsigned long i = 0; i <= k; ++i) {
        // coefficient of t^(n-i) is r_{n-i} (r_n = 1); after n-k
        // derivatives it multiplies (n-i)! / (k-i)! at t^(k-i)
        Int c = i == 0 ? Int(1) : ctx.coeffs[i - 1];
        if (c == 0) continue;
        Int fall = 1;
        for (unsigned long t = k - i + 1; t <= n - i; ++t) fall *= Int(t);
        dc[k - i] = c * fall;
      }
      IntPoly d(std::move(dc));
      if (!real_rooted_in(d, -ctx.two_q, ctx.two_q)) {
        ++ctx.stats.pruned_interlace;
        continue;
      }
    }
    dfs(ctx, depth + 1);
  }
  ctx.coeffs[depth] = 0;
}

// one depth-1 subtree (fixed top coefficient)
inline std::pair<std::vector<CandidateRecord>, SearchStats> run_subtree(const SearchSpec& spec,
                                                                        const Int& top) {
  DfsContext ctx;
  ctx.spec = &spec;
  ctx.q = spec.params.q;
  ctx.p = spec.params.p;
  ctx.two_q = 2 * spec.params.q;
  ctx.n = spec.half();
  ctx.coeffs.assign(ctx.n, Int(0));
  std::vector<CandidateRecord> out;
  ctx.out = &out;
  ++ctx.stats.nodes;
  ctx.coeffs[0] = top;
  bool cut = false;
  if (spec.enable_cuts) {
    Int trace = -top + (Int(spec.forced_minus) - Int(spec.forced_plus)) * ctx.q;
    if (spec.trace_max && trace > *spec.trace_max) {
      ++ctx.stats.pruned_trace;
      cut = true;
    } else if (mod_floor(trace, ctx.p) == 0) {
      ++ctx.stats.pruned_padic;
      cut = true;
    }
  }
  if (!cut) dfs(ctx, 1);
  return {std::move(out), ctx.stats};
}

}  // namespace detail

// Checkpoint: the last fully explored top-level coefficient value, plus the
// spec digest it belongs to.
struct SearchCheckpoint {
  std::string digest;
  Int last_completed_top;  // subtrees with top <= this are done
  bool any = false;
};

inline std::string checkpoint_to_string(const SearchCheckpoint& cp) {
  detail::Json j;
  j["format_version"] = "1";
  j["spec_digest"] = cp.digest;
  j["last_completed_top"] = cp.any ? cp.last_completed_top.get_str() : "";
  return j.dump(2) + "\n";
}

inline SearchCheckpoint checkpoint_from_string(const std::string& text) {
  detail::Json j;
  try {
    j = detail::Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedInputError("checkpoint", e.what());
  }
  SearchCheckpoint cp;
  if (!j.contains("spec_digest") || !j.contains("last_completed_top"))
    throw MalformedInputError("checkpoint", "missing field");
  cp.digest = j["spec_digest"].get<std::string>();
  std::string last = j["last_completed_top"].get<std::string>();
  if (!last.empty()) {
    cp.any = true;
    cp.last_completed_top = Int(last);
  }
  return cp;
}

// Deterministic enumeration; output sorted lexicographically by R's
// coefficients from the top down, independent of the worker count. The
// optional checkpoint skips completed depth-1 subtrees and is updated
// through on_subtree_done after each completes (in order).
inline SearchResult enumerate_ordinary_weil(
    const SearchSpec& spec, const SearchCheckpoint* resume = nullptr,
    const std::function<void(const SearchCheckpoint&)>& on_subtree_done = nullptr) {
  spec.validate();
  SearchResult res;
  unsigned long n = spec.half();
  const Int& q = spec.params.q;
  // emptiness by the root bound: trace >= -(2n + forced) q always
  if (spec.trace_max) {
    Int min_trace = -Int(2 * n + spec.forced_minus + spec.forced_plus) * q;
    if (*spec.trace_max < min_trace) {
      res.note = "empty: trace_max " + spec.trace_max->get_str() +
                 " is below the minimum achievable trace " + min_trace.get_str() +
                 " (all roots have absolute value q)";
      return res;
    }
  }
  if (resume && resume->digest != spec.digest())
    throw std::invalid_argument("checkpoint does not match this search spec");

  Int top_bound = detail::binomial(n, 1) * (2 * q);
  std::vector<Int> tops;
  for (Int v = -top_bound; v <= top_bound; ++v) {
    if (resume && resume->any && v <= resume->last_completed_top) continue;
    tops.push_back(v);
  }

  std::vector<std::vector<CandidateRecord>> slots(tops.size());
  std::vector<SearchStats> stat_slots(tops.size());
  unsigned long workers = std::max<unsigned long>(1, spec.workers);
  if (workers == 1) {
    for (std::size_t i = 0; i < tops.size(); ++i) {
      auto [recs, st] = detail::run_subtree(spec, tops[i]);
      slots[i] = std::move(recs);
      stat_slots[i] = st;
      if (on_subtree_done) {
        SearchCheckpoint cp;
        cp.digest = spec.digest();
        cp.any = true;
        cp.last_completed_top = tops[i];
        on_subtree_done(cp);
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= tops.size()) break;
        auto [recs, st] = detail::run_subtree(spec, tops[i]);
        slots[i] = std::move(recs);
        stat_slots[i] = st;
      }
    };
    std::vector<std::thread> pool;
    for (unsigned long w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (on_subtree_done && !tops.empty()) {
      SearchCheckpoint cp;
      cp.digest = spec.digest();
      cp.any = true;
      cp.last_completed_top = tops.back();
      on_subtree_done(cp);
    }
  }
  for (std::size_t i = 0; i < tops.size(); ++i) {
    res.stats += stat_slots[i];
    for (auto& r : slots[i]) res.records.push_back(std::move(r));
  }
  return res;
}

// The open-Question cut: trace(P) <= -(1 + q^2) - 1, i.e. N_1 < 0.
inline SearchResult question_search(SearchSpec spec,
                                    const SearchCheckpoint* resume = nullptr,
                                    const std::function<void(const SearchCheckpoint&)>& cb = nullptr) {
  const Int& q = spec.params.q;
  Int cut = -(1 + q * q) - 1;
  if (!spec.trace_max || *spec.trace_max > cut) spec.trace_max = cut;
  SearchResult res = enumerate_ordinary_weil(spec, resume, cb);
  if (!res.note.empty()) {
    // sharpen the explanation: with all roots of absolute value q the trace
    // is at least -deg * q, so N_1 < 0 forces q^2 - deg*q + 2 <= 0
    res.note += "; N_1 < 0 requires q^2 - " + Int(spec.total_degree()).get_str() +
                "*q + 2 <= 0, impossible for this q";
  }
  return res;
}

}  // namespace k3frob
