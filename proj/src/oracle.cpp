#include <algorithm>

#include "tdr/errors.hpp"
#include "tdr/query.hpp"

namespace tdr {

Oracle::Oracle(const Graph& graph)
    : graph_(graph), progress_bit_(graph.label_count(), -1), excluded_(graph.label_count(), 0) {}

bool Oracle::clause_query(VertexId u, VertexId v, const Clause& clause) {
  if (clause.required.size() > kMaxRequiredLabels)
    throw TooManyRequiredLabels("clause requires " + std::to_string(clause.required.size()) +
                                " labels (limit " + std::to_string(kMaxRequiredLabels) + ")");
  for (LabelId r : clause.required)
    if (r >= graph_.label_count()) return false;
  if (u == v && clause.required.empty()) return true;

  for (std::size_t i = 0; i < clause.required.size(); ++i)
    progress_bit_[clause.required[i]] = static_cast<std::int8_t>(i);
  for (LabelId x : clause.excluded)
    if (x < excluded_.size()) excluded_[x] = 1;

  const std::uint32_t full = (std::uint32_t{1} << clause.required.size()) - 1;
  seen_.reset(graph_.vertex_count(), static_cast<unsigned>(clause.required.size()));
  queue_.clear();
  queue_.emplace_back(u, 0);
  seen_.insert(u, 0);
  bool found = false;
  for (std::size_t head = 0; head < queue_.size() && !found; ++head) {
    auto [w, progress] = queue_[head];
    ++visited_;
    for (const Arc& a : graph_.successors(w)) {
      if (excluded_[a.label]) continue;
      std::uint32_t next = progress;
      if (progress_bit_[a.label] >= 0) next |= std::uint32_t{1} << progress_bit_[a.label];
      if (a.vertex == v && next == full) {
        found = true;
        break;
      }
      if (seen_.insert(a.vertex, next)) queue_.emplace_back(a.vertex, next);
    }
  }

  for (LabelId r : clause.required) progress_bit_[r] = -1;
  for (LabelId x : clause.excluded)
    if (x < excluded_.size()) excluded_[x] = 0;
  return found;
}

bool Oracle::pcr_query(VertexId u, VertexId v, const ClauseSet& clauses) {
  for (const Clause& c : clauses.clauses)
    if (clause_query(u, v, c)) return true;
  return false;
}

bool Oracle::pcr_query(VertexId u, VertexId v, const Pattern& pattern) {
  return pcr_query(u, v, compile_pattern(pattern, graph_.labels()));
}

bool oracle_pcr(const Graph& graph, VertexId u, VertexId v, const Pattern& pattern) {
  Oracle oracle(graph);
  return oracle.pcr_query(u, v, pattern);
}

bool oracle_lcr(const Graph& graph, VertexId u, VertexId v, const LabelSet& allowed) {
  if (u == v) return true;
  std::vector<bool> ok(graph.label_count(), false);
  for (LabelId l : allowed)
    if (l < ok.size()) ok[l] = true;
  std::vector<bool> seen(graph.vertex_count(), false);
  std::vector<VertexId> queue{u};
  seen[u] = true;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (const Arc& a : graph.successors(queue[head])) {
      if (!ok[a.label] || seen[a.vertex]) continue;
      if (a.vertex == v) return true;
      seen[a.vertex] = true;
      queue.push_back(a.vertex);
    }
  }
  return false;
}

bool bfs_reachable(const Graph& graph, VertexId u, VertexId v) {
  std::vector<LabelId> all(graph.label_count());
  for (LabelId l = 0; l < all.size(); ++l) all[l] = l;
  return oracle_lcr(graph, u, v, all);
}

}  // namespace tdr
