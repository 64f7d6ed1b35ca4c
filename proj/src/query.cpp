#include "tdr/query.hpp"

#include <algorithm>
#include <bit>

#include "tdr/errors.hpp"

namespace tdr {

Reach3 vertex_reach(const TdrIndex& index, VertexId u, VertexId v, const QueryOptions& options) {
  if (u == v) return Reach3::Yes;
  if (options.interval_tests) {
    if (index.scc(u) == index.scc(v)) return Reach3::Yes;
    const Interval& iu = index.interval(u);
    const Interval& iv = index.interval(v);
    if (iu.push <= iv.push && iv.pop <= iu.pop) return Reach3::Yes;
    // Finish order only refutes at SCC granularity.
    if (index.scc_finish(u) < index.scc_finish(v)) return Reach3::No;
  }
  if (options.mask_tests) {
    if (!bits::subset(index.n_out(v), index.n_out(u))) return Reach3::No;
    if (!bits::subset(index.n_in(u), index.n_in(v))) return Reach3::No;
  }
  return Reach3::Unknown;
}

PreparedClause prepare_clause(const TdrIndex& index, const Clause& clause) {
  if (clause.required.size() > kMaxRequiredLabels)
    throw TooManyRequiredLabels("clause requires " + std::to_string(clause.required.size()) +
                                " labels (limit " + std::to_string(kMaxRequiredLabels) + ")");
  const LabelEncoding& enc = index.label_encoding();
  PreparedClause p;
  for (LabelId r : clause.required) {
    if (r >= index.label_count()) p.unsatisfiable = true;
    p.required.push_back(r);
    p.required_bit.push_back(r < index.label_count() ? enc.bit(r) : 0);
  }
  p.excluded_mask.assign(enc.words(), 0);
  for (LabelId x : clause.excluded) {
    if (x >= index.label_count()) continue;
    p.has_excluded = true;
    if (enc.mode == LabelMode::Exact) bits::set(p.excluded_mask, enc.bit(x));
  }
  return p;
}

bool group_admissible(const TdrIndex& index, VertexId m, std::uint32_t group,
                      const PreparedClause& clause, std::uint32_t progress, VertexId target,
                      const QueryOptions& options) {
  // (a) the target's reachable set must fit inside what this group reaches.
  if (options.topology_filter && !bits::subset(index.n_out(target), index.h_vtx(m, group)))
    return false;

  const std::uint32_t missing = clause.full() & ~progress;
  if (options.skip_shortcut && missing == 0 && !clause.has_excluded) return true;

  // (b) every still-missing label must occur somewhere below this group.
  if (options.label_filter) {
    auto lab = index.h_lab(m, group);
    for (std::uint32_t rest = missing; rest != 0; rest &= rest - 1) {
      auto r = static_cast<std::size_t>(std::countr_zero(rest));
      if (!bits::test(lab, clause.required_bit[r])) return false;
    }
  }

  // (c) a layer made only of forbidden labels cuts every walk at that depth;
  // the target then has to sit in the shallower frontier.
  if (options.frontier_filter && clause.has_excluded &&
      index.label_mode() == LabelMode::Exact) {
    const std::size_t lw = index.label_words();
    const std::uint32_t eps = index.label_encoding().epsilon();
    const std::size_t eps_word = eps >> 6;
    const std::uint64_t eps_bit = std::uint64_t{1} << (eps & 63);
    const VertexHash& th = index.hash(target);
    const VertexHash& mh = index.hash(m);
    // Tracks the two target bits over {m} and layers 0..j-1.
    auto in_frontier = [&](std::uint32_t bit) { return bit == mh.bit[0] || bit == mh.bit[1]; };
    bool have0 = in_frontier(th.bit[0]);
    bool have1 = in_frontier(th.bit[1]);
    for (std::uint32_t j = 0; j < index.depth(); ++j) {
      auto layer = index.v_lab(m, group, j);
      bool nonempty = false;
      bool blocked = true;
      for (std::size_t w = 0; w < lw; ++w) {
        std::uint64_t bitsw = layer[w];
        if (w == eps_word) bitsw &= ~eps_bit;
        nonempty |= bitsw != 0;
        if (bitsw & ~clause.excluded_mask[w]) {
          blocked = false;
          break;
        }
      }
      if (blocked && nonempty) return have0 && have1;
      auto vtx = index.v_vtx(m, group, j);
      have0 = have0 || bits::test(vtx, th.bit[0]);
      have1 = have1 || bits::test(vtx, th.bit[1]);
    }
  }
  return true;
}

QueryEngine::QueryEngine(const Graph& graph, const TdrIndex& index, QueryOptions options)
    : graph_(graph),
      index_(index),
      options_(options),
      progress_bit_(graph.label_count(), -1),
      excluded_(graph.label_count(), 0) {
  if (!index.compatible_with(graph))
    throw InvalidParam("index was built for a different graph");
}

bool QueryEngine::clause_query(VertexId u, VertexId v, const Clause& clause, QueryStats* stats) {
  PreparedClause prepared = prepare_clause(index_, clause);
  QueryStats local;
  local.clauses = 1;
  bool answer = false;
  if (!prepared.unsatisfiable) {
    for (std::size_t i = 0; i < clause.required.size(); ++i)
      progress_bit_[clause.required[i]] = static_cast<std::int8_t>(i);
    for (LabelId x : clause.excluded)
      if (x < excluded_.size()) excluded_[x] = 1;
    answer = search(u, v, prepared, local);
    for (LabelId r : clause.required) progress_bit_[r] = -1;
    for (LabelId x : clause.excluded)
      if (x < excluded_.size()) excluded_[x] = 0;
  }
  if (stats) *stats += local;
  return answer;
}

bool QueryEngine::search(VertexId u, VertexId v, const PreparedClause& clause, QueryStats& stats) {
  const std::uint32_t full = clause.full();
  const bool plain_after_full = options_.skip_shortcut && !clause.has_excluded;
  if (u == v && full == 0) return true;
  if (vertex_reach(index_, u, v, options_) == Reach3::No) return false;

  memo_.reset(graph_.vertex_count(), static_cast<unsigned>(clause.required.size()));
  stack_.clear();

  // Opens the next admissible group of the top frame; false when exhausted.
  auto open_group = [&](Frame& f) {
    const std::uint32_t groups = index_.group_count(f.vertex);
    const std::size_t degree = graph_.out_degree(f.vertex);
    while (f.group < groups) {
      const std::uint32_t i = f.group++;
      if (group_admissible(index_, f.vertex, i, clause, f.progress, v, options_)) {
        auto [first, last] = group_slots(degree, groups, i);
        f.slot = static_cast<std::uint32_t>(first);
        f.slot_end = static_cast<std::uint32_t>(last);
        return true;
      }
      ++stats.pruned_groups;
    }
    return false;
  };

  // Returns true when the walk can be accepted right here.
  auto enter = [&](VertexId m, std::uint32_t progress, bool moved) {
    if (m == v && progress == full && (moved || full == 0)) return true;
    if (!memo_.insert(m, progress)) return false;
    ++stats.visited;
    Reach3 reach = vertex_reach(index_, m, v, options_);
    if (reach == Reach3::No) return false;
    // Once R is collected and nothing is forbidden, any walk will do.
    if (plain_after_full && progress == full && reach == Reach3::Yes) return true;
    Frame f{m, progress, 0, 0, 0};
    if (open_group(f)) stack_.push_back(f);
    return false;
  };

  if (enter(u, 0, false)) return true;
  while (!stack_.empty()) {
    Frame& f = stack_.back();
    if (f.slot == f.slot_end) {
      if (!open_group(f)) stack_.pop_back();
      continue;
    }
    const Arc arc = graph_.successors(f.vertex)[f.slot++];
    if (excluded_[arc.label]) continue;
    std::uint32_t progress = f.progress;
    if (progress_bit_[arc.label] >= 0) progress |= std::uint32_t{1} << progress_bit_[arc.label];
    // enter() may grow the stack and invalidate f.
    if (enter(arc.vertex, progress, true)) return true;
  }
  return false;
}

bool QueryEngine::pcr_query(VertexId u, VertexId v, const ClauseSet& clauses, QueryStats* stats) {
  for (const Clause& c : clauses.clauses)
    if (clause_query(u, v, c, stats)) return true;
  return false;
}

bool QueryEngine::pcr_query(VertexId u, VertexId v, const Pattern& pattern, QueryStats* stats) {
  return pcr_query(u, v, compile_pattern(pattern, graph_.labels()), stats);
}

bool QueryEngine::lcr_query(VertexId u, VertexId v, const LabelSet& allowed, QueryStats* stats) {
  Clause clause;
  for (LabelId l = 0; l < graph_.label_count(); ++l)
    if (!std::binary_search(allowed.begin(), allowed.end(), l)) clause.excluded.push_back(l);
  return clause_query(u, v, clause, stats);
}

ClauseSet compile_pattern(const Pattern& pattern, const LabelDictionary& labels,
                          std::size_t max_clauses) {
  BoundPattern bound = bind(pattern, labels);
  return restrict_to_known(normalize(bound.ast, max_clauses), bound.known_label_count);
}

bool pcr_query(const Graph& graph, const TdrIndex& index, VertexId u, VertexId v,
               const Pattern& pattern, const QueryOptions& options, QueryStats* stats) {
  QueryEngine engine(graph, index, options);
  return engine.pcr_query(u, v, pattern, stats);
}

bool lcr_query(const Graph& graph, const TdrIndex& index, VertexId u, VertexId v,
               const LabelSet& allowed) {
  QueryEngine engine(graph, index);
  return engine.lcr_query(u, v, allowed);
}

}  // namespace tdr
