#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "tdr/graph.hpp"
#include "tdr/index.hpp"
#include "tdr/pattern.hpp"
#include "tdr/query.hpp"

namespace tdr {

enum class QueryKind : std::uint8_t { And, Or, Not, Lcr };

std::string_view to_string(QueryKind kind);
// Accepts and|or|not|lcr in any case; throws InvalidParam otherwise.
QueryKind parse_query_kind(std::string_view text);

struct QuerySpec {
  VertexId source = 0;
  VertexId target = 0;
  Pattern pattern;  // bound against the generating graph
  QueryKind kind = QueryKind::And;
  LabelSet labels;  // sampled labels; the allowed set for LCR
  bool ground_truth = false;

  friend bool operator==(const QuerySpec&, const QuerySpec&) = default;
};

// Samples (u, v) with u != v uniformly and `labels_per_query` distinct
// labels, builds the pattern for `kind` (NOT is joint exclusion of the
// sampled labels), labels it with the oracle and keeps it if its polarity
// quota is still open. max_attempts == 0 picks a default proportional to
// the quotas. Throws QuotaUnmet.
std::vector<QuerySpec> generate_workload(const Graph& graph, QueryKind kind,
                                         std::size_t labels_per_query, std::size_t quota_true,
                                         std::size_t quota_false, std::uint64_t seed,
                                         std::size_t max_attempts = 0);

// Ground truth of a query by the index-free routes (oracle / subgraph BFS).
bool oracle_answer(const Graph& graph, const QuerySpec& spec);
// Answer of a query by the indexed engine.
bool engine_answer(QueryEngine& engine, const Graph& graph, const QuerySpec& spec,
                   QueryStats* stats = nullptr);

// Random bound pattern over labels [0, label_count): depth <= max_depth,
// And/Or with 2-3 children, leaves named "l<id>".
Pattern random_pattern(std::mt19937_64& rng, std::size_t label_count, std::size_t max_depth);

// ---------------------------------------------------------------- bench

struct BenchRow {
  std::string dataset;
  std::string engine;  // "tdr" or "oracle"
  QueryKind kind = QueryKind::And;
  bool polarity = false;
  std::size_t count = 0;
  double total_us = 0;
  double mean_us = 0;
  double p50_us = 0;
  double p95_us = 0;
  double max_us = 0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  double build_seconds = 0;
  std::size_t index_bytes = 0;
  IndexParams params;
  std::uint64_t seed = 0;
  std::vector<bool> answers;         // indexed engine, in workload order
  std::vector<bool> oracle_answers;  // only in comparative mode
  std::vector<double> times_us;      // indexed engine, per query
  std::vector<double> oracle_times_us;
};

struct BenchOptions {
  std::string dataset = "graph";
  std::size_t warmup_rounds = 1;
  bool compare_oracle = false;
  unsigned threads = 1;
  std::uint64_t seed = 0;
  QueryOptions query;
};

// Warm-up rounds are untimed; then every query is timed on its own. Throws
// MismatchError listing workload positions whose answer differs from the
// ground truth.
BenchReport run_bench(const Graph& graph, const TdrIndex& index,
                      const std::vector<QuerySpec>& workload, const BenchOptions& options = {});

// Header: dataset,kind,polarity,count,total_us,mean_us,p50_us,p95_us.
// The dataset column is "<dataset>/<engine>".
void write_csv(const BenchReport& report, std::ostream& out);
void write_table(const BenchReport& report, std::ostream& out);

// ---------------------------------------------------------------- verify

struct VerifyConfig {
  std::size_t graphs = 50;
  std::size_t queries_per_graph = 100;
  std::uint64_t seed = 7;
  std::size_t max_vertices = 300;
  double max_degree = 4.0;
  std::size_t max_labels = 8;
  std::size_t max_pattern_depth = 4;
  IndexParams index;
};

struct VerifyCase {
  Graph graph;
  TdrIndex index;
  std::vector<QuerySpec> queries;
};

// Alternating ER / PA graphs with random patterns (and LCR allowed sets),
// each labelled by the oracle.
std::vector<VerifyCase> make_verify_cases(const VerifyConfig& config);

struct VerifyResult {
  std::size_t queries = 0;
  std::size_t mismatches = 0;
  std::vector<bool> answers;
  std::vector<std::uint64_t> visited;
};

VerifyResult run_verify(const std::vector<VerifyCase>& cases, const QueryOptions& options = {});

}  // namespace tdr
