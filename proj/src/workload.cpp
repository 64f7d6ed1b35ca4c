#include "tdr/workload.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include "tdr/errors.hpp"

namespace tdr {

std::string_view to_string(QueryKind kind) {
  switch (kind) {
    case QueryKind::And: return "AND";
    case QueryKind::Or: return "OR";
    case QueryKind::Not: return "NOT";
    case QueryKind::Lcr: return "LCR";
  }
  return "?";
}

QueryKind parse_query_kind(std::string_view text) {
  std::string lower(text);
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "and") return QueryKind::And;
  if (lower == "or") return QueryKind::Or;
  if (lower == "not") return QueryKind::Not;
  if (lower == "lcr") return QueryKind::Lcr;
  throw InvalidParam("unknown query kind '" + std::string(text) + "'");
}

namespace {

Pattern leaf_of(const Graph& graph, LabelId l) {
  return Pattern::leaf(graph.labels().name(l), l);
}

Pattern pattern_for(const Graph& graph, QueryKind kind, const LabelSet& labels) {
  std::vector<Pattern> parts;
  switch (kind) {
    case QueryKind::And:
      for (LabelId l : labels) parts.push_back(leaf_of(graph, l));
      return Pattern::all(std::move(parts));
    case QueryKind::Or:
      for (LabelId l : labels) parts.push_back(leaf_of(graph, l));
      return Pattern::any(std::move(parts));
    case QueryKind::Not:
      for (LabelId l : labels) parts.push_back(Pattern::negate(leaf_of(graph, l)));
      return Pattern::all(std::move(parts));
    case QueryKind::Lcr:
      for (LabelId l = 0; l < graph.label_count(); ++l)
        if (!std::binary_search(labels.begin(), labels.end(), l))
          parts.push_back(Pattern::negate(leaf_of(graph, l)));
      if (parts.empty()) {
        // Every label allowed: plain reachability.
        return Pattern::any({leaf_of(graph, 0), Pattern::negate(leaf_of(graph, 0))});
      }
      return Pattern::all(std::move(parts));
  }
  return {};
}

Clause lcr_clause(const Graph& graph, const LabelSet& allowed) {
  Clause c;
  for (LabelId l = 0; l < graph.label_count(); ++l)
    if (!std::binary_search(allowed.begin(), allowed.end(), l)) c.excluded.push_back(l);
  return c;
}

LabelSet sample_labels(std::mt19937_64& rng, std::size_t label_count, std::size_t k) {
  std::vector<LabelId> all(label_count);
  for (LabelId l = 0; l < label_count; ++l) all[l] = l;
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, label_count - 1);
    std::swap(all[i], all[pick(rng)]);
  }
  LabelSet out(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(out.begin(), out.end());
  return out;
}

bool oracle_answer(Oracle& oracle, const Graph& graph, const QuerySpec& spec) {
  if (spec.kind == QueryKind::Lcr) return oracle_lcr(graph, spec.source, spec.target, spec.labels);
  return oracle.pcr_query(spec.source, spec.target, compile_pattern(spec.pattern, graph.labels()));
}

double percentile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0;
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
  return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

}  // namespace

bool oracle_answer(const Graph& graph, const QuerySpec& spec) {
  Oracle oracle(graph);
  return oracle_answer(oracle, graph, spec);
}

bool engine_answer(QueryEngine& engine, const Graph& graph, const QuerySpec& spec,
                   QueryStats* stats) {
  if (spec.kind == QueryKind::Lcr)
    return engine.lcr_query(spec.source, spec.target, spec.labels, stats);
  return engine.pcr_query(spec.source, spec.target, compile_pattern(spec.pattern, graph.labels()),
                          stats);
}

std::vector<QuerySpec> generate_workload(const Graph& graph, QueryKind kind,
                                         std::size_t labels_per_query, std::size_t quota_true,
                                         std::size_t quota_false, std::uint64_t seed,
                                         std::size_t max_attempts) {
  if (labels_per_query < 1 || labels_per_query > graph.label_count())
    throw InvalidParam("labels per query must be in [1, |labels|]");
  if (quota_true + quota_false == 0) return {};
  if (graph.vertex_count() < 2) throw InvalidParam("workload needs at least two vertices");
  if (max_attempts == 0) max_attempts = 1000 * (quota_true + quota_false) + 10000;

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<VertexId> pick(0, static_cast<VertexId>(graph.vertex_count() - 1));
  Oracle oracle(graph);
  std::vector<QuerySpec> out;
  std::size_t have_true = 0, have_false = 0;
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    if (have_true == quota_true && have_false == quota_false) break;
    QuerySpec spec;
    spec.source = pick(rng);
    do spec.target = pick(rng);
    while (spec.target == spec.source);
    spec.kind = kind;
    spec.labels = sample_labels(rng, graph.label_count(), labels_per_query);
    spec.pattern = pattern_for(graph, kind, spec.labels);
    spec.ground_truth = oracle_answer(oracle, graph, spec);
    std::size_t& have = spec.ground_truth ? have_true : have_false;
    if (have == (spec.ground_truth ? quota_true : quota_false)) continue;
    ++have;
    out.push_back(std::move(spec));
  }
  if (have_true < quota_true) throw QuotaUnmet(std::string(to_string(kind)), true);
  if (have_false < quota_false) throw QuotaUnmet(std::string(to_string(kind)), false);
  return out;
}

Pattern random_pattern(std::mt19937_64& rng, std::size_t label_count, std::size_t max_depth) {
  std::uniform_int_distribution<LabelId> pick_label(0, static_cast<LabelId>(label_count - 1));
  std::uniform_int_distribution<int> pick_op(0, 3);
  std::uniform_int_distribution<int> pick_arity(2, 3);
  auto leaf = [&] {
    LabelId l = pick_label(rng);
    return Pattern::leaf("l" + std::to_string(l), l);
  };
  auto grow = [&](auto&& self, std::size_t depth) -> Pattern {
    int op = depth == 0 ? 0 : pick_op(rng);
    switch (op) {
      case 1:
        return Pattern::negate(self(self, depth - 1));
      case 2:
      case 3: {
        std::vector<Pattern> kids;
        int arity = pick_arity(rng);
        for (int i = 0; i < arity; ++i) kids.push_back(self(self, depth - 1));
        Pattern p;
        p.kind = op == 2 ? Pattern::Kind::And : Pattern::Kind::Or;
        p.children = std::move(kids);
        return p;
      }
      default:
        return leaf();
    }
  };
  return grow(grow, max_depth);
}

// ---------------------------------------------------------------- bench

namespace {

std::vector<BenchRow> aggregate(const std::string& dataset, const std::string& engine,
                                const std::vector<QuerySpec>& workload,
                                const std::vector<double>& times) {
  std::vector<BenchRow> rows;
  for (QueryKind kind : {QueryKind::And, QueryKind::Or, QueryKind::Not, QueryKind::Lcr}) {
    for (bool polarity : {true, false}) {
      std::vector<double> sample;
      for (std::size_t i = 0; i < workload.size(); ++i)
        if (workload[i].kind == kind && workload[i].ground_truth == polarity)
          sample.push_back(times[i]);
      if (sample.empty()) continue;
      std::sort(sample.begin(), sample.end());
      BenchRow row;
      row.dataset = dataset;
      row.engine = engine;
      row.kind = kind;
      row.polarity = polarity;
      row.count = sample.size();
      for (double t : sample) row.total_us += t;
      row.mean_us = row.total_us / static_cast<double>(row.count);
      row.p50_us = percentile(sample, 0.50);
      row.p95_us = percentile(sample, 0.95);
      row.max_us = sample.back();
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace

BenchReport run_bench(const Graph& graph, const TdrIndex& index,
                      const std::vector<QuerySpec>& workload, const BenchOptions& options) {
  using Clock = std::chrono::steady_clock;
  BenchReport report;
  report.build_seconds = index.build_seconds();
  report.index_bytes = index.byte_size();
  report.params = index.params();
  report.seed = options.seed;
  const std::size_t n = workload.size();

  // Pattern compilation stays outside the timed region for both engines.
  std::vector<ClauseSet> compiled(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (workload[i].kind == QueryKind::Lcr)
      compiled[i].clauses.push_back(lcr_clause(graph, workload[i].labels));
    else
      compiled[i] = compile_pattern(workload[i].pattern, graph.labels());
  }

  auto run_engine = [&](bool use_oracle, std::vector<bool>& answers, std::vector<double>& times) {
    std::vector<std::uint8_t> raw(n, 0);
    times.assign(n, 0.0);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      QueryEngine engine(graph, index, options.query);
      Oracle oracle(graph);
      auto answer = [&](std::size_t i) {
        const QuerySpec& q = workload[i];
        return use_oracle ? oracle.pcr_query(q.source, q.target, compiled[i])
                          : engine.pcr_query(q.source, q.target, compiled[i]);
      };
      for (std::size_t round = 0; round < options.warmup_rounds; ++round)
        for (std::size_t i = 0; i < n; ++i) answer(i);
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        auto start = Clock::now();
        bool a = answer(i);
        auto stop = Clock::now();
        times[i] = std::chrono::duration<double, std::micro>(stop - start).count();
        raw[i] = a;
      }
    };
    const unsigned threads = std::max(1U, options.threads);
    if (threads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
    answers.assign(raw.begin(), raw.end());
  };

  run_engine(false, report.answers, report.times_us);
  if (options.compare_oracle) run_engine(true, report.oracle_answers, report.oracle_times_us);

  std::vector<std::size_t> offenders;
  for (std::size_t i = 0; i < n; ++i) {
    bool bad = report.answers[i] != workload[i].ground_truth;
    if (options.compare_oracle) bad = bad || report.oracle_answers[i] != workload[i].ground_truth;
    if (bad) offenders.push_back(i);
  }
  if (!offenders.empty()) {
    std::string list;
    for (std::size_t i = 0; i < offenders.size() && i < 20; ++i)
      list += (i ? "," : "") + std::to_string(offenders[i]);
    throw MismatchError(offenders, std::to_string(offenders.size()) +
                                       " answers disagree with ground truth (queries " + list +
                                       (offenders.size() > 20 ? ",...)" : ")"));
  }

  report.rows = aggregate(options.dataset, "tdr", workload, report.times_us);
  if (options.compare_oracle) {
    auto more = aggregate(options.dataset, "oracle", workload, report.oracle_times_us);
    report.rows.insert(report.rows.end(), more.begin(), more.end());
  }
  return report;
}

void write_csv(const BenchReport& report, std::ostream& out) {
  out << "dataset,kind,polarity,count,total_us,mean_us,p50_us,p95_us\n";
  for (const BenchRow& r : report.rows) {
    out << r.dataset << '/' << r.engine << ',' << to_string(r.kind) << ','
        << (r.polarity ? "true" : "false") << ',' << r.count << ',' << r.total_us << ','
        << r.mean_us << ',' << r.p50_us << ',' << r.p95_us << '\n';
  }
}

void write_table(const BenchReport& report, std::ostream& out) {
  char line[256];
  std::snprintf(line, sizeof line, "%-24s %-4s %-5s %7s %12s %10s %10s %10s\n", "dataset", "kind",
                "truth", "count", "total_us", "mean_us", "p50_us", "p95_us");
  out << line;
  for (const BenchRow& r : report.rows) {
    std::string tag = r.dataset + "/" + r.engine;
    std::snprintf(line, sizeof line, "%-24s %-4s %-5s %7zu %12.1f %10.2f %10.2f %10.2f\n",
                  tag.c_str(), std::string(to_string(r.kind)).c_str(),
                  r.polarity ? "true" : "false", r.count, r.total_us, r.mean_us, r.p50_us,
                  r.p95_us);
    out << line;
  }
  std::snprintf(line, sizeof line, "index: %.3f s build, %zu bytes\n", report.build_seconds,
                report.index_bytes);
  out << line;
}

// ---------------------------------------------------------------- verify

std::vector<VerifyCase> make_verify_cases(const VerifyConfig& config) {
  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<std::size_t> pick_n(2, std::max<std::size_t>(2, config.max_vertices));
  std::uniform_real_distribution<double> pick_d(0.5, config.max_degree);
  std::uniform_int_distribution<std::size_t> pick_labels(1, std::max<std::size_t>(1, config.max_labels));
  std::uniform_int_distribution<int> pick_flavour(0, 9);

  std::vector<VerifyCase> cases;
  cases.reserve(config.graphs);
  for (std::size_t gi = 0; gi < config.graphs; ++gi) {
    const std::size_t n = pick_n(rng);
    const double d = std::min(pick_d(rng), static_cast<double>(n - 1));
    const std::size_t labels = pick_labels(rng);
    const std::uint64_t graph_seed = rng();
    Graph graph = gi % 2 == 0 ? generate_er(n, d, labels, graph_seed)
                              : generate_pa(n, d, labels, graph_seed);
    TdrIndex index = build_index(graph, config.index);

    std::uniform_int_distribution<VertexId> pick_v(0, static_cast<VertexId>(n - 1));
    Oracle oracle(graph);
    std::vector<QuerySpec> queries;
    queries.reserve(config.queries_per_graph);
    for (std::size_t qi = 0; qi < config.queries_per_graph; ++qi) {
      QuerySpec q;
      q.source = pick_v(rng);
      // Reachable pairs are rare in sparse random graphs; bias towards them
      // by walking a few random steps from the source half of the time.
      q.target = pick_v(rng);
      if (rng() & 1) {
        VertexId w = q.source;
        std::uniform_int_distribution<int> steps(1, 6);
        for (int s = steps(rng); s > 0 && graph.out_degree(w) > 0; --s) {
          std::uniform_int_distribution<std::size_t> pick_arc(0, graph.out_degree(w) - 1);
          w = graph.successors(w)[pick_arc(rng)].vertex;
        }
        q.target = w;
      }
      const int flavour = pick_flavour(rng);
      if (flavour < 6) {
        // Redraw the rare pattern whose DNF exceeds the clause limit.
        for (;;) {
          q.pattern = random_pattern(rng, labels, config.max_pattern_depth);
          try {
            compile_pattern(q.pattern, graph.labels());
            break;
          } catch (const PatternTooComplex&) {
          }
        }
        switch (q.pattern.kind) {
          case Pattern::Kind::Or: q.kind = QueryKind::Or; break;
          case Pattern::Kind::Not: q.kind = QueryKind::Not; break;
          default: q.kind = QueryKind::And; break;
        }
      } else {
        static constexpr QueryKind kinds[] = {QueryKind::And, QueryKind::Or, QueryKind::Not,
                                              QueryKind::Lcr};
        q.kind = kinds[flavour - 6];
        std::uniform_int_distribution<std::size_t> pick_k(1, labels);
        q.labels = sample_labels(rng, labels, pick_k(rng));
        q.pattern = pattern_for(graph, q.kind, q.labels);
      }
      q.ground_truth = oracle_answer(oracle, graph, q);
      queries.push_back(std::move(q));
    }
    cases.push_back({std::move(graph), std::move(index), std::move(queries)});
  }
  return cases;
}

VerifyResult run_verify(const std::vector<VerifyCase>& cases, const QueryOptions& options) {
  VerifyResult result;
  for (const VerifyCase& c : cases) {
    QueryEngine engine(c.graph, c.index, options);
    for (const QuerySpec& q : c.queries) {
      QueryStats stats;
      bool answer = engine_answer(engine, c.graph, q, &stats);
      ++result.queries;
      if (answer != q.ground_truth) ++result.mismatches;
      result.answers.push_back(answer);
      result.visited.push_back(stats.visited);
    }
  }
  return result;
}

}  // namespace tdr
