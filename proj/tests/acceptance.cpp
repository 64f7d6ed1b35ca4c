// Acceptance suite: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "tdr/errors.hpp"
#include "tdr/index.hpp"
#include "tdr/query.hpp"
#include "tdr/workload.hpp"

using namespace tdr;
using namespace tdr::testing;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2;
}

double mean(const std::vector<double>& xs) {
  double s = 0;
  for (double x : xs) s += x;
  return xs.empty() ? 0 : s / static_cast<double>(xs.size());
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const std::vector<VerifyCase>& verify_cases() {
  static const std::vector<VerifyCase> cases = [] {
    VerifyConfig c;
    c.graphs = 50;
    c.queries_per_graph = 100;
    c.seed = 7;
    return make_verify_cases(c);
  }();
  return cases;
}

Outcome oracle_equivalence() {
  const auto& cases = verify_cases();
  std::size_t kinds[4] = {0, 0, 0, 0};
  std::size_t er = 0;
  std::size_t max_n = 0;
  for (const VerifyCase& c : cases) {
    max_n = std::max(max_n, c.graph.vertex_count());
    for (const QuerySpec& q : c.queries) ++kinds[static_cast<int>(q.kind)];
  }
  for (std::size_t i = 0; i < cases.size(); i += 2) ++er;
  VerifyResult r = run_verify(cases);
  bool ok = cases.size() >= 50 && r.queries >= 5000 && r.mismatches == 0 && max_n <= 300 &&
            kinds[0] && kinds[1] && kinds[2] && kinds[3];
  return {ok, fmt("%zu graphs (%zu ER), %zu queries (AND %zu, OR %zu, NOT %zu, LCR %zu), "
                  "%zu mismatches",
                  cases.size(), er, r.queries, kinds[0], kinds[1], kinds[2], kinds[3],
                  r.mismatches)};
}

Outcome filter_soundness() {
  const auto& cases = verify_cases();
  VerifyResult all = run_verify(cases);
  std::vector<std::pair<const char*, std::function<void(QueryOptions&)>>> toggles = {
      {"intervals", [](QueryOptions& o) { o.interval_tests = false; }},
      {"masks", [](QueryOptions& o) { o.mask_tests = false; }},
      {"topology", [](QueryOptions& o) { o.topology_filter = false; }},
      {"labels", [](QueryOptions& o) { o.label_filter = false; }},
      {"frontier", [](QueryOptions& o) { o.frontier_filter = false; }},
      {"shortcut", [](QueryOptions& o) { o.skip_shortcut = false; }},
      {"everything",
       [](QueryOptions& o) {
         o = QueryOptions{false, false, false, false, false, false};
       }},
  };
  bool ok = true;
  std::string detail;
  std::uint64_t total_all = 0;
  for (auto v : all.visited) total_all += v;
  for (auto& [name, apply] : toggles) {
    QueryOptions o;
    apply(o);
    VerifyResult r = run_verify(cases, o);
    std::size_t diff = 0;
    std::size_t more = 0;
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < r.answers.size(); ++i) {
      diff += r.answers[i] != all.answers[i];
      more += all.visited[i] > r.visited[i];
      total += r.visited[i];
    }
    ok = ok && diff == 0 && more == 0 && r.mismatches == 0;
    detail += fmt("%s off: %zu answer diffs, %zu queries visiting fewer, visited %llu; ", name,
                  diff, more, static_cast<unsigned long long>(total));
  }
  detail += fmt("all on: visited %llu", static_cast<unsigned long long>(total_all));
  return {ok, detail};
}

Outcome index_space() {
  IndexParams p;
  p.depth = 2;
  p.group_size = 4;
  std::vector<double> per_vertex;
  std::string detail;
  for (std::size_t n : {25000u, 50000u, 100000u}) {
    Graph g = generate_er(n, 6.0, 8, 11);
    TdrIndex idx = build_index(g, p);
    per_vertex.push_back(static_cast<double>(idx.byte_size()) / static_cast<double>(n));
    detail += fmt("n=%zu: %.1f B/vertex; ", n, per_vertex.back());
  }
  double ratio = *std::max_element(per_vertex.begin(), per_vertex.end()) /
                 *std::min_element(per_vertex.begin(), per_vertex.end());
  std::size_t low = build_index(generate_er(50000, 2.0, 8, 11), p).byte_size();
  std::size_t high = build_index(generate_er(50000, 8.0, 8, 11), p).byte_size();
  detail += fmt("ratio %.3f; d=2 %zu B, d=8 %zu B", ratio, low, high);
  return {ratio < 1.3 && high > low, detail};
}

Outcome build_time() {
  Graph g = generate_er(100000, 6.0, 8, 5);
  auto timed = [&](std::uint32_t k) {
    IndexParams p;
    p.depth = k;
    std::vector<double> runs;
    for (int i = 0; i < 5; ++i) runs.push_back(build_index(g, p).build_seconds());
    return median(runs);
  };
  double k1 = timed(1);
  double k4 = timed(4);
  return {k4 <= 3 * k1, fmt("k=1 %.3f s, k=4 %.3f s, ratio %.2f", k1, k4, k4 / k1)};
}

struct PaSetup {
  Graph graph;
  TdrIndex index;
};

const PaSetup& pa_setup() {
  static const PaSetup s = [] {
    PaSetup s;
    s.graph = generate_pa(50000, 6.0, 32, 17);
    s.index = build_index(s.graph);
    return s;
  }();
  return s;
}

Outcome speedup() {
  const PaSetup& s = pa_setup();
  auto w = generate_workload(s.graph, QueryKind::And, 4, 0, 500, 23);
  BenchOptions o;
  o.compare_oracle = true;
  o.dataset = "pa50k";
  BenchReport r = run_bench(s.graph, s.index, w, o);
  double tdr = median(r.times_us);
  double oracle = median(r.oracle_times_us);
  return {tdr * 5 <= oracle,
          fmt("%zu false AND queries: median TDR %.2f us, median oracle %.2f us, speedup %.1fx",
              w.size(), tdr, oracle, oracle / tdr)};
}

Outcome not_polarity() {
  const PaSetup& s = pa_setup();
  auto w = generate_workload(s.graph, QueryKind::Not, 4, 200, 200, 29);
  BenchReport r = run_bench(s.graph, s.index, w);
  std::vector<double> yes;
  std::vector<double> no;
  for (std::size_t i = 0; i < w.size(); ++i) (w[i].ground_truth ? yes : no).push_back(r.times_us[i]);
  double t = mean(yes);
  double f = mean(no);
  return {f < t, fmt("mean false %.2f us over %zu, mean true %.2f us over %zu", f, no.size(), t,
                     yes.size())};
}

Outcome fixtures() {
  std::vector<std::pair<std::string, bool>> checks;
  {
    Graph g = toy_dag();
    TdrIndex idx = build_index(g);
    QueryEngine e(g, idx);
    checks.push_back({"toy (0,4,R={a,d})", e.clause_query(0, 4, clause(g, {"a", "d"}, {}))});
    checks.push_back({"toy (0,5,X={a})", e.clause_query(0, 5, clause(g, {}, {"a"}))});
    checks.push_back({"toy (3,3,X=all)",
                      e.clause_query(3, 3, clause(g, {}, {"a", "b", "c", "d", "e"}))});
    checks.push_back({"toy oracle NONE_OF{b}", !oracle_pcr(g, 0, 4, parse_pattern("NONE_OF{b}"))});
    checks.push_back({"toy engine NONE_OF{b}",
                      !e.pcr_query(0, 4, parse_pattern("NONE_OF{b}"))});
    checks.push_back({"toy oracle (0,4,R={a,d})",
                      oracle_pcr(g, 0, 4, parse_pattern("a AND d"))});
    IndexParams p;
    p.group_size = 1;
    TdrIndex split = build_index(g, p);
    checks.push_back({"toy group without e pruned",
                      !group_admissible(split, 0, 0, prepare_clause(split, clause(g, {"e"}, {})),
                                        0, 4)});
  }
  {
    Graph g = cyclic();
    TdrIndex idx = build_index(g);
    QueryEngine e(g, idx);
    checks.push_back({"cyclic (0,3,X={b})", !e.clause_query(0, 3, clause(g, {}, {"b"}))});
    checks.push_back({"cyclic oracle (0,3,X={b})",
                      !oracle_pcr(g, 0, 3, parse_pattern("NOT b"))});
  }
  {
    Graph g = graph_from("0 1 a\n1 2 b\n2 3 d\n0 3 c\n");
    TdrIndex idx = build_index(g);
    checks.push_back({"b AND d reachable", pcr_query(g, idx, 0, 3, parse_pattern("b AND d"))});
  }
  {
    Graph g = interval_example();
    TdrIndex idx = build_index(g);
    bool shape = idx.interval(4) == Interval{5, 8} && idx.interval(6) == Interval{6, 7};
    checks.push_back({"intervals v4=[5,8], v6=[6,7]", shape});
    checks.push_back({"vertex_reach(v4,v6)=Yes", vertex_reach(idx, 4, 6) == Reach3::Yes});
  }
  bool ok = true;
  std::string failed;
  for (auto& [name, pass] : checks) {
    ok = ok && pass;
    if (!pass) failed += " " + name + ";";
  }
  return {ok, fmt("%zu checks", checks.size()) + (failed.empty() ? "" : ", failed:" + failed)};
}

Outcome pattern_suite() {
  std::vector<std::pair<std::string, bool>> checks;
  auto L = [](const char* n) { return Pattern::leaf(n); };
  checks.push_back({"a AND b", parse_pattern("a AND b") == Pattern::all({L("a"), L("b")})});
  checks.push_back({"NOT(a AND b)", parse_pattern("NOT(a AND b)") ==
                                        Pattern::negate(Pattern::all({L("a"), L("b")}))});
  checks.push_back({"a OR b AND c", parse_pattern("a OR b AND c") ==
                                        Pattern::any({L("a"), Pattern::all({L("b"), L("c")})})});
  bool syntax = false;
  try {
    parse_pattern("a ANDD b");
  } catch (const SyntaxError&) {
    syntax = true;
  }
  checks.push_back({"a ANDD b rejected", syntax});

  LabelDictionary d;
  d.intern("a");
  d.intern("b");
  ClauseSet dm = normalize(bind(parse_pattern("NOT(a AND b)"), d).ast);
  checks.push_back({"De Morgan",
                    dm == ClauseSet{{Clause{{}, {0}}, Clause{{}, {1}}}}});

  std::mt19937_64 rng(99);
  std::size_t asts = 0;
  std::size_t bad = 0;
  while (asts < 10000) {
    std::size_t labels = 1 + rng() % 8;
    Pattern p = random_pattern(rng, labels, 5);
    ClauseSet cs;
    try {
      cs = normalize(p, 1u << 14);
    } catch (const PatternTooComplex&) {
      continue;
    }
    ++asts;
    for (int k = 0; k < 8; ++k) {
      LabelSet s;
      for (LabelId l = 0; l < labels; ++l)
        if (rng() & 1) s.push_back(l);
      bad += eval(p, s) != cs.satisfied_by(s);
    }
  }
  checks.push_back({fmt("DNF equivalence over %zu ASTs", asts), bad == 0});

  bool ok = true;
  std::string failed;
  for (auto& [name, pass] : checks) {
    ok = ok && pass;
    if (!pass) failed += " " + name + ";";
  }
  return {ok, fmt("%zu checks, %zu random ASTs", checks.size(), asts) +
                  (failed.empty() ? "" : ", failed:" + failed)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {1, "oracle equivalence", oracle_equivalence},
      {2, "filter soundness", filter_soundness},
      {3, "index-space scaling", index_space},
      {4, "build-time scaling", build_time},
      {5, "speedup over baseline", speedup},
      {6, "NOT-query polarity asymmetry", not_polarity},
      {7, "worked-example fixtures", fixtures},
      {8, "pattern-language suite", pattern_suite},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("[%s] %d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), seconds_since(start));
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
