#pragma once

#include <cstdint>
#include <vector>

#include "tdr/graph.hpp"
#include "tdr/index.hpp"
#include "tdr/pattern.hpp"
#include "tdr/state_set.hpp"

namespace tdr {

inline constexpr std::size_t kMaxRequiredLabels = 30;

enum class Reach3 : std::uint8_t { Yes, No, Unknown };

// Every pruning device can be switched off on its own; answers must not
// change, only the amount of search.
struct QueryOptions {
  bool interval_tests = true;   // SCC equality, interval containment, finish order
  bool mask_tests = true;       // N_in / N_out subset refutation
  bool topology_filter = true;  // group filter (a)
  bool label_filter = true;     // group filter (b)
  bool frontier_filter = true;  // group filter (c), exact label mode only
  bool skip_shortcut = true;    // plain reachability once the clause is met
};

struct QueryStats {
  std::uint64_t visited = 0;        // (vertex, progress) states expanded
  std::uint64_t pruned_groups = 0;  // groups rejected by group_admissible
  std::uint64_t clauses = 0;        // clause searches started

  QueryStats& operator+=(const QueryStats& o) {
    visited += o.visited;
    pruned_groups += o.pruned_groups;
    clauses += o.clauses;
    return *this;
  }
};

// Yes/No are exact; Unknown means the index cannot decide.
Reach3 vertex_reach(const TdrIndex& index, VertexId u, VertexId v,
                    const QueryOptions& options = {});

// A clause compiled against an index: label positions, exclusion mask and
// the R-progress encoding. Built by QueryEngine; exposed for testing the
// group filter in isolation.
struct PreparedClause {
  std::vector<LabelId> required;            // R, position = progress bit
  std::vector<std::uint32_t> required_bit;  // R in label-mask positions
  std::vector<std::uint64_t> excluded_mask; // X in label-mask positions (exact mode)
  bool has_excluded = false;
  bool unsatisfiable = false;  // R mentions a label the graph lacks

  std::uint32_t full() const { return (std::uint32_t{1} << required.size()) - 1; }
};

PreparedClause prepare_clause(const TdrIndex& index, const Clause& clause);

// False only when no walk from m through group i can reach `target` while
// collecting the labels of R still missing from `progress` and avoiding X.
bool group_admissible(const TdrIndex& index, VertexId m, std::uint32_t group,
                      const PreparedClause& clause, std::uint32_t progress, VertexId target,
                      const QueryOptions& options = {});

// Reusable query state for one (graph, index) pair. Not thread-safe; use one
// engine per thread.
class QueryEngine {
 public:
  QueryEngine(const Graph& graph, const TdrIndex& index, QueryOptions options = {});

  // Walk semantics: a u~>v walk whose label set contains R and avoids X. The
  // empty walk (u == v) counts only when R is empty.
  bool clause_query(VertexId u, VertexId v, const Clause& clause, QueryStats* stats = nullptr);
  // OR over the clauses; the empty set is false.
  bool pcr_query(VertexId u, VertexId v, const ClauseSet& clauses, QueryStats* stats = nullptr);
  // Binds against the graph labels, normalises, drops unsatisfiable terms.
  bool pcr_query(VertexId u, VertexId v, const Pattern& pattern, QueryStats* stats = nullptr);
  // A walk using only labels from `allowed` (sorted).
  bool lcr_query(VertexId u, VertexId v, const LabelSet& allowed, QueryStats* stats = nullptr);

  const QueryOptions& options() const { return options_; }

 private:
  bool search(VertexId u, VertexId v, const PreparedClause& clause, QueryStats& stats);

  struct Frame {
    VertexId vertex;
    std::uint32_t progress;
    std::uint32_t group;
    std::uint32_t slot;
    std::uint32_t slot_end;
  };

  const Graph& graph_;
  const TdrIndex& index_;
  QueryOptions options_;
  StateSet memo_;
  std::vector<Frame> stack_;
  std::vector<std::int8_t> progress_bit_;  // per label id, -1 if not in R
  std::vector<std::uint8_t> excluded_;     // per label id
};

// Binds, normalises and resolves the pattern as QueryEngine::pcr_query does.
ClauseSet compile_pattern(const Pattern& pattern, const LabelDictionary& labels,
                          std::size_t max_clauses = kDefaultMaxClauses);

bool pcr_query(const Graph& graph, const TdrIndex& index, VertexId u, VertexId v,
               const Pattern& pattern, const QueryOptions& options = {},
               QueryStats* stats = nullptr);

bool lcr_query(const Graph& graph, const TdrIndex& index, VertexId u, VertexId v,
               const LabelSet& allowed);

// ---------------------------------------------------------------- oracle

// Index-free exact solver: BFS over (vertex, collected part of R) states,
// never crossing an X-labelled edge. Serves as ground truth and as the DFS
// baseline in benchmarks.
class Oracle {
 public:
  explicit Oracle(const Graph& graph);

  bool clause_query(VertexId u, VertexId v, const Clause& clause);
  bool pcr_query(VertexId u, VertexId v, const ClauseSet& clauses);
  bool pcr_query(VertexId u, VertexId v, const Pattern& pattern);
  std::uint64_t visited() const { return visited_; }

 private:
  const Graph& graph_;
  StateSet seen_;
  std::vector<std::pair<VertexId, std::uint32_t>> queue_;
  std::vector<std::int8_t> progress_bit_;
  std::vector<std::uint8_t> excluded_;
  std::uint64_t visited_ = 0;
};

bool oracle_pcr(const Graph& graph, VertexId u, VertexId v, const Pattern& pattern);

// Plain BFS over the subgraph of edges labelled in `allowed` (sorted).
bool oracle_lcr(const Graph& graph, VertexId u, VertexId v, const LabelSet& allowed);

// Plain BFS reachability; u reaches itself.
bool bfs_reachable(const Graph& graph, VertexId u, VertexId v);

}  // namespace tdr
