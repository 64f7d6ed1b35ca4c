#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <ostream>

#include "CLI11.hpp"
#include "tdr/errors.hpp"
#include "tdr/graph.hpp"
#include "tdr/index.hpp"
#include "tdr/pattern.hpp"
#include "tdr/query.hpp"
#include "tdr/workload.hpp"

namespace tdr::cli {

namespace {

// Usage errors detected after CLI11 parsing (bad pattern text, bad ids).
struct UsageError : Error {
  using Error::Error;
};

struct GenArgs {
  std::string model = "er";
  std::size_t n = 1000;
  double d = 4.0;
  std::size_t labels = 8;
  std::uint64_t seed = 1;
  std::string out;
};

struct BuildArgs {
  std::string graph;
  std::string out;
  std::uint32_t k = 2;
  std::uint32_t group_size = 4;
  std::uint32_t max_groups = 8;
  std::uint32_t vertex_bits = 64;
  std::uint32_t label_bits = 64;
  std::string label_mode = "auto";
  std::uint64_t seed = 0;
};

struct QueryArgs {
  std::string graph;
  std::string index;
  std::string source;
  std::string target;
  std::string pattern;
  bool stats = false;
};

struct BenchArgs {
  std::string graph;
  std::string index;
  std::string kind = "and";
  std::size_t labels_per_query = 4;
  std::size_t quota_true = 100;
  std::size_t quota_false = 100;
  std::uint64_t seed = 1;
  std::string baseline;
  std::string out;
  std::string dataset;
  std::size_t warmup = 1;
  unsigned threads = 1;
};

struct VerifyArgs {
  std::size_t graphs = 50;
  std::size_t queries = 100;
  std::uint64_t seed = 7;
};

IndexParams make_params(const BuildArgs& a) {
  IndexParams p;
  p.depth = a.k;
  p.group_size = a.group_size;
  p.max_groups = a.max_groups;
  p.vertex_bits = a.vertex_bits;
  p.label_bloom_bits = a.label_bits;
  p.label_mode = a.label_mode == "exact"   ? LabelMode::Exact
                 : a.label_mode == "bloom" ? LabelMode::Bloom
                                           : LabelMode::Auto;
  if (a.seed != 0) p.hash_seeds = {a.seed, a.seed * 0x9E3779B97F4A7C15ULL + 1};
  p.validate();
  return p;
}

VertexId resolve_vertex(const Graph& g, const std::string& id, const char* what) {
  auto v = g.find_vertex(id);
  if (!v) throw UsageError(std::string("unknown ") + what + " vertex '" + id + "'");
  return *v;
}

void load_pair(const std::string& graph_path, const std::string& index_path, Graph& graph,
               TdrIndex& index) {
  graph = load_edge_list_file(graph_path);
  index = load_index(index_path);
  if (!index.compatible_with(graph))
    throw Error("index " + index_path + " was not built from " + graph_path);
}

int do_gen(const GenArgs& a, std::ostream& out) {
  Graph g = a.model == "pa" ? generate_pa(a.n, a.d, a.labels, a.seed)
                            : generate_er(a.n, a.d, a.labels, a.seed);
  std::ofstream file;
  std::ostream* sink = &out;
  if (!a.out.empty() && a.out != "-") {
    file.open(a.out);
    if (!file) throw Error("cannot open " + a.out + " for writing");
    sink = &file;
  }
  *sink << "# model=" << a.model << " n=" << a.n << " d=" << a.d << " labels=" << a.labels
        << " seed=" << a.seed << '\n';
  write_edge_list(g, *sink);
  if (!*sink) throw Error("failed writing graph");
  return 0;
}

int do_build(const BuildArgs& a, std::ostream& out) {
  IndexParams params = make_params(a);
  Graph g = load_edge_list_file(a.graph);
  TdrIndex index = build_index(g, params);
  save_index(index, a.out);
  out << "vertices: " << g.vertex_count() << "\nedges: " << g.edge_count()
      << "\nlabels: " << g.label_count()
      << "\nlabel mode: " << (index.label_mode() == LabelMode::Exact ? "exact" : "bloom")
      << "\nbuild seconds: " << index.build_seconds() << "\nindex bytes: " << index.byte_size()
      << '\n';
  return 0;
}

int do_query(const QueryArgs& a, std::ostream& out, std::ostream& err) {
  Pattern pattern;
  try {
    pattern = parse_pattern(a.pattern);
  } catch (const SyntaxError& e) {
    throw UsageError(std::string("bad pattern: ") + e.what());
  }
  Graph graph;
  TdrIndex index;
  load_pair(a.graph, a.index, graph, index);
  VertexId u = resolve_vertex(graph, a.source, "source");
  VertexId v = resolve_vertex(graph, a.target, "target");

  BoundPattern bound = bind(pattern, graph.labels());
  for (const std::string& name : bound.unknown_labels)
    err << "warning: label '" << name << "' does not occur in the graph\n";
  ClauseSet clauses =
      restrict_to_known(normalize(bound.ast), bound.known_label_count);

  QueryEngine engine(graph, index);
  QueryStats stats;
  auto start = std::chrono::steady_clock::now();
  bool answer = engine.pcr_query(u, v, clauses, &stats);
  auto elapsed = std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - start);
  out << (answer ? "reachable" : "unreachable") << '\n';
  if (a.stats) {
    out << "clauses: " << clauses.clauses.size() << "\nvisited: " << stats.visited
        << "\npruned groups: " << stats.pruned_groups << "\nelapsed us: " << elapsed.count()
        << '\n';
  }
  return 0;
}

int do_bench(const BenchArgs& a, std::ostream& out) {
  QueryKind kind = parse_query_kind(a.kind);
  Graph graph;
  TdrIndex index;
  load_pair(a.graph, a.index, graph, index);
  auto workload =
      generate_workload(graph, kind, a.labels_per_query, a.quota_true, a.quota_false, a.seed);
  BenchOptions options;
  options.dataset = a.dataset.empty() ? a.graph : a.dataset;
  options.warmup_rounds = a.warmup;
  options.compare_oracle = a.baseline == "oracle";
  options.threads = a.threads;
  options.seed = a.seed;
  BenchReport report = run_bench(graph, index, workload, options);
  write_table(report, out);
  if (!a.out.empty()) {
    std::ofstream csv(a.out);
    if (!csv) throw Error("cannot open " + a.out + " for writing");
    write_csv(report, csv);
  }
  return 0;
}

int do_verify(const VerifyArgs& a, std::ostream& out) {
  VerifyConfig config;
  config.graphs = a.graphs;
  config.queries_per_graph = a.queries;
  config.seed = a.seed;
  auto cases = make_verify_cases(config);
  VerifyResult result = run_verify(cases);
  out << "graphs: " << cases.size() << "\nqueries: " << result.queries
      << "\nmismatches: " << result.mismatches << '\n';
  return result.mismatches == 0 ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pattern-constrained reachability over edge-labelled graphs", "tdr"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic labelled graph");
  gen_cmd->add_option("--model", gen.model, "er or pa")->check(CLI::IsMember({"er", "pa"}));
  gen_cmd->add_option("--n", gen.n, "Vertex count")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--d", gen.d, "Average out-degree")->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--labels", gen.labels, "Label count")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.seed, "Seed")->envname("TDR_SEED");
  gen_cmd->add_option("--out", gen.out, "Output edge list (stdout if omitted)");

  BuildArgs build;
  auto* build_cmd = app.add_subcommand("build", "Build an index for a graph");
  build_cmd->add_option("--graph", build.graph, "Edge list")->required();
  build_cmd->add_option("--out", build.out, "Index file")->required();
  build_cmd->add_option("--k", build.k, "Vertical depth")->check(CLI::PositiveNumber);
  build_cmd->add_option("--group-size", build.group_size, "Successors per group")
      ->check(CLI::PositiveNumber);
  build_cmd->add_option("--max-groups", build.max_groups, "Groups per vertex")
      ->check(CLI::PositiveNumber);
  build_cmd->add_option("--vertex-bits", build.vertex_bits, "Bits per vertex mask")
      ->check(CLI::PositiveNumber);
  build_cmd->add_option("--label-bits", build.label_bits, "Bits per Bloom label mask")
      ->check(CLI::PositiveNumber);
  build_cmd->add_option("--label-mode", build.label_mode, "auto, exact or bloom")
      ->check(CLI::IsMember({"auto", "exact", "bloom"}));
  build_cmd->add_option("--seed", build.seed, "Hash seed (0 keeps the defaults)")
      ->envname("TDR_SEED");

  QueryArgs query;
  auto* query_cmd = app.add_subcommand("query", "Answer one pattern-constrained query");
  query_cmd->add_option("--graph", query.graph, "Edge list")->required();
  query_cmd->add_option("--index", query.index, "Index file")->required();
  query_cmd->add_option("--source", query.source, "Source vertex id")->required();
  query_cmd->add_option("--target", query.target, "Target vertex id")->required();
  query_cmd->add_option("--pattern", query.pattern, "Pattern expression")->required();
  query_cmd->add_flag("--stats", query.stats, "Print search statistics");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Benchmark a generated workload");
  bench_cmd->add_option("--graph", bench.graph, "Edge list")->required();
  bench_cmd->add_option("--index", bench.index, "Index file")->required();
  bench_cmd->add_option("--kind", bench.kind, "and, or, not or lcr")
      ->check(CLI::IsMember({"and", "or", "not", "lcr"}, CLI::ignore_case));
  bench_cmd->add_option("--labels-per-query", bench.labels_per_query, "Labels per query")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--true", bench.quota_true, "True queries");
  bench_cmd->add_option("--false", bench.quota_false, "False queries");
  bench_cmd->add_option("--seed", bench.seed, "Workload seed")->envname("TDR_SEED");
  bench_cmd->add_option("--baseline", bench.baseline, "Also time the oracle baseline")
      ->check(CLI::IsMember({"oracle"}));
  bench_cmd->add_option("--out", bench.out, "CSV report");
  bench_cmd->add_option("--dataset", bench.dataset, "Dataset tag for the report");
  bench_cmd->add_option("--warmup", bench.warmup, "Untimed warm-up rounds");
  bench_cmd->add_option("--threads", bench.threads, "Worker threads")->check(CLI::PositiveNumber);

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "Randomised index-vs-oracle sweep");
  verify_cmd->add_option("--n-graphs", verify.graphs, "Graphs")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--n-queries", verify.queries, "Queries per graph")
      ->check(CLI::PositiveNumber);
  verify_cmd->add_option("--seed", verify.seed, "Seed")->envname("TDR_SEED");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen_cmd) return do_gen(gen, out);
    if (*build_cmd) return do_build(build, out);
    if (*query_cmd) return do_query(query, out, err);
    if (*bench_cmd) return do_bench(bench, out);
    if (*verify_cmd) return do_verify(verify, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidParam& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace tdr::cli
