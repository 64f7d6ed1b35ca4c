#include "tdr/index.hpp"

#include <algorithm>
#include <bit>
#include <chrono>

#include "tdr/errors.hpp"

namespace tdr {

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

void IndexParams::validate() const {
  if (group_size < 1) throw InvalidParam("group size must be >= 1");
  if (max_groups < 1) throw InvalidParam("max groups must be >= 1");
  if (vertex_bits < 2 || !std::has_single_bit(vertex_bits))
    throw InvalidParam("vertex bits must be a power of two >= 2");
  if (label_bloom_bits < 2 || !std::has_single_bit(label_bloom_bits))
    throw InvalidParam("label bloom bits must be a power of two >= 2");
  if (depth < 1) throw InvalidParam("depth must be >= 1");
  if (!locality_hash && !mixing_hash) throw InvalidParam("at least one vertex hash must be enabled");
  if (locality_shift >= 32) throw InvalidParam("locality shift must be < 32");
}

LabelMode IndexParams::resolve_label_mode(std::size_t label_count) const {
  if (label_mode != LabelMode::Auto) return label_mode;
  return label_count <= exact_label_threshold ? LabelMode::Exact : LabelMode::Bloom;
}

std::uint32_t group_count_for(std::size_t out_degree, const IndexParams& params) {
  if (out_degree == 0) return 0;
  std::size_t g = (out_degree + params.group_size - 1) / params.group_size;
  return static_cast<std::uint32_t>(std::min<std::size_t>(g, params.max_groups));
}

GroupPlan plan_groups(std::size_t out_degree, const IndexParams& params) {
  GroupPlan plan;
  plan.count = group_count_for(out_degree, params);
  plan.slot_group.resize(out_degree);
  for (std::size_t s = 0; s < out_degree; ++s)
    plan.slot_group[s] = static_cast<std::uint32_t>(s * plan.count / out_degree);
  return plan;
}

std::pair<std::size_t, std::size_t> group_slots(std::size_t out_degree, std::uint32_t groups,
                                                std::uint32_t i) {
  // First slot s with floor(s*g/deg) >= i is ceil(i*deg/g).
  auto first = [&](std::size_t j) { return (j * out_degree + groups - 1) / groups; };
  return {first(i), first(std::size_t{i} + 1)};
}

VertexHash vertex_hash(std::uint32_t rank, const IndexParams& params) {
  const std::uint64_t width = params.vertex_bits;
  std::uint32_t locality =
      static_cast<std::uint32_t>(((rank >> params.locality_shift) + params.hash_seeds[0]) % width);
  std::uint32_t mixing = static_cast<std::uint32_t>(mix64(rank ^ params.hash_seeds[1]) % width);
  if (!params.locality_hash) locality = mixing;
  if (!params.mixing_hash) mixing = locality;
  return VertexHash{{locality, mixing}};
}

IntervalLabels compute_intervals(const Graph& graph) {
  const std::size_t n = graph.vertex_count();
  IntervalLabels out;
  out.interval.resize(n);
  out.finish_rank.resize(n);
  std::vector<bool> visited(n, false);
  struct Frame {
    VertexId v;
    std::uint32_t next;
  };
  std::vector<Frame> stack;
  std::uint32_t clock = 0;
  std::uint32_t finished = 0;

  auto run = [&](VertexId root) {
    visited[root] = true;
    out.interval[root].push = clock++;
    stack.push_back({root, 0});
    while (!stack.empty()) {
      Frame& f = stack.back();
      auto succ = graph.successors(f.v);
      if (f.next < succ.size()) {
        VertexId w = succ[f.next++].vertex;
        if (!visited[w]) {
          visited[w] = true;
          out.interval[w].push = clock++;
          stack.push_back({w, 0});
        }
        continue;
      }
      out.interval[f.v].pop = clock++;
      out.finish_rank[f.v] = finished++;
      stack.pop_back();
    }
  };

  for (VertexId v = 0; v < n; ++v)
    if (graph.in_degree(v) == 0 && !visited[v]) run(v);
  for (VertexId v = 0; v < n; ++v)
    if (!visited[v]) run(v);
  return out;
}

LabelEncoding LabelEncoding::make(std::size_t label_count, const IndexParams& params) {
  LabelEncoding enc;
  enc.mode = params.resolve_label_mode(label_count);
  enc.width = enc.mode == LabelMode::Exact ? static_cast<std::uint32_t>(label_count)
                                           : params.label_bloom_bits;
  enc.seed = mix64(params.hash_seeds[1] ^ 0x6C62272E07BB0142ULL);
  return enc;
}

std::uint32_t LabelEncoding::bit(LabelId label) const {
  if (mode == LabelMode::Exact) return label;
  return static_cast<std::uint32_t>(mix64(label ^ seed) % width);
}

VertexHasher::VertexHasher(const IndexParams& params, std::span<const std::uint32_t> rank)
    : words_((params.vertex_bits + 63) / 64), hashes_(rank.size()) {
  for (std::size_t v = 0; v < rank.size(); ++v) hashes_[v] = vertex_hash(rank[v], params);
}

GroupLayout GroupLayout::make(const Graph& graph, const IndexParams& params) {
  GroupLayout layout;
  layout.offsets.assign(graph.vertex_count() + 1, 0);
  for (VertexId v = 0; v < graph.vertex_count(); ++v)
    layout.offsets[v + 1] = layout.offsets[v] + group_count_for(graph.out_degree(v), params);
  return layout;
}

MaskTable build_nin(const Graph& graph, const Condensation& cond, const VertexHasher& hasher) {
  MaskTable n_in(graph.vertex_count(), hasher.words());
  std::vector<std::uint64_t> acc(hasher.words());
  // Arcs run from larger SCC ids to smaller ones, so descending ids visit
  // every predecessor SCC first.
  for (std::size_t k = cond.scc_count; k-- > 0;) {
    auto c = static_cast<std::uint32_t>(k);
    std::fill(acc.begin(), acc.end(), 0);
    for (VertexId u : cond.scc_members(c)) {
      hasher.set_into(acc, u);
      for (const Arc& a : graph.predecessors(u))
        if (cond.scc_of[a.vertex] != c) bits::or_into(acc, n_in.row(a.vertex));
    }
    for (VertexId u : cond.scc_members(c)) std::copy(acc.begin(), acc.end(), n_in.row(u).begin());
  }
  return n_in;
}

HorizontalTables build_horizontal(const Graph& graph, const Condensation& cond,
                                  const VertexHasher& hasher, const LabelEncoding& labels,
                                  const GroupLayout& layout, const IndexParams& /*params*/) {
  const std::size_t vw = hasher.words();
  const std::size_t lw = labels.words();
  HorizontalTables t{MaskTable(layout.total(), vw), MaskTable(layout.total(), lw),
                     MaskTable(graph.vertex_count(), vw)};
  // Everything reachable from (and including) the members of an SCC.
  MaskTable scc_vtx(cond.scc_count, vw);
  MaskTable scc_lab(cond.scc_count, lw);

  for (std::uint32_t c = 0; c < cond.scc_count; ++c) {
    auto vtx = scc_vtx.row(c);
    auto lab = scc_lab.row(c);
    for (VertexId u : cond.scc_members(c)) {
      hasher.set_into(vtx, u);
      for (const Arc& a : graph.successors(u)) {
        bits::set(lab, labels.bit(a.label));
        std::uint32_t d = cond.scc_of[a.vertex];
        if (d != c) {
          bits::or_into(vtx, scc_vtx.row(d));
          bits::or_into(lab, scc_lab.row(d));
        }
      }
    }
    for (VertexId u : cond.scc_members(c)) {
      auto succ = graph.successors(u);
      const std::uint32_t g = layout.count(u);
      auto out = t.n_out.row(u);
      if (g == 0) {
        hasher.set_into(out, u);
        continue;
      }
      for (std::uint32_t i = 0; i < g; ++i) {
        auto hv = t.h_vtx.row(layout.offsets[u] + i);
        auto hl = t.h_lab.row(layout.offsets[u] + i);
        auto [first, last] = group_slots(succ.size(), g, i);
        for (std::size_t s = first; s < last; ++s) {
          const Arc& a = succ[s];
          std::uint32_t d = cond.scc_of[a.vertex];
          hasher.set_into(hv, a.vertex);
          bits::or_into(hv, scc_vtx.row(d));
          bits::set(hl, labels.bit(a.label));
          bits::or_into(hl, scc_lab.row(d));
        }
        hasher.set_into(hv, u);
        bits::or_into(out, hv);
      }
    }
  }
  return t;
}

VerticalTables build_vertical(const Graph& graph, const VertexHasher& hasher,
                              const LabelEncoding& labels, const GroupLayout& layout,
                              const IndexParams& params) {
  const std::size_t n = graph.vertex_count();
  const std::size_t vw = hasher.words();
  const std::size_t lw = labels.words();
  const std::uint32_t k = params.depth;
  VerticalTables t{MaskTable(layout.total() * k, lw), MaskTable(layout.total() * k, vw)};

  auto row = [&](VertexId u, std::uint32_t i, std::uint32_t j) {
    return (std::size_t{layout.offsets[u]} + i) * k + j;
  };

  // Layer 0: direct edges of each group.
  for (VertexId u = 0; u < n; ++u) {
    auto succ = graph.successors(u);
    const std::uint32_t g = layout.count(u);
    for (std::uint32_t i = 0; i < g; ++i) {
      auto [first, last] = group_slots(succ.size(), g, i);
      auto lab = t.v_lab.row(row(u, i, 0));
      auto vtx = t.v_vtx.row(row(u, i, 0));
      for (std::size_t s = first; s < last; ++s) {
        bits::set(lab, labels.bit(succ[s].label));
        hasher.set_into(vtx, succ[s].vertex);
      }
    }
  }
  if (k == 1) return t;

  // agg_*[u] holds what lies at depth j+1 below u (all groups together);
  // a vertex without successors contributes only epsilon at every depth.
  MaskTable agg_lab(n, lw), agg_vtx(n, vw);
  for (VertexId u = 0; u < n; ++u) {
    auto succ = graph.successors(u);
    if (succ.empty()) {
      bits::set(agg_lab.row(u), labels.epsilon());
      continue;
    }
    for (const Arc& a : succ) {
      bits::set(agg_lab.row(u), labels.bit(a.label));
      hasher.set_into(agg_vtx.row(u), a.vertex);
    }
  }

  MaskTable next_lab(n, lw), next_vtx(n, vw);
  for (std::uint32_t j = 1; j < k; ++j) {
    for (VertexId u = 0; u < n; ++u) {
      auto succ = graph.successors(u);
      const std::uint32_t g = layout.count(u);
      for (std::uint32_t i = 0; i < g; ++i) {
        auto [first, last] = group_slots(succ.size(), g, i);
        auto lab = t.v_lab.row(row(u, i, j));
        auto vtx = t.v_vtx.row(row(u, i, j));
        for (std::size_t s = first; s < last; ++s) {
          bits::or_into(lab, agg_lab.row(succ[s].vertex));
          bits::or_into(vtx, agg_vtx.row(succ[s].vertex));
        }
      }
    }
    if (j + 1 == k) break;
    std::fill(next_lab.data().begin(), next_lab.data().end(), 0);
    std::fill(next_vtx.data().begin(), next_vtx.data().end(), 0);
    for (VertexId u = 0; u < n; ++u) {
      auto succ = graph.successors(u);
      if (succ.empty()) {
        bits::set(next_lab.row(u), labels.epsilon());
        continue;
      }
      for (const Arc& a : succ) {
        bits::or_into(next_lab.row(u), agg_lab.row(a.vertex));
        bits::or_into(next_vtx.row(u), agg_vtx.row(a.vertex));
      }
    }
    std::swap(agg_lab, next_lab);
    std::swap(agg_vtx, next_vtx);
  }
  return t;
}

void TdrIndex::refresh_derived() {
  hashes_.resize(rank_.size());
  for (std::size_t v = 0; v < rank_.size(); ++v) hashes_[v] = vertex_hash(rank_[v], params_);
  std::uint32_t sccs = 0;
  for (std::uint32_t c : scc_of_) sccs = std::max(sccs, c + 1);
  scc_finish_.assign(sccs, 0);
  for (std::size_t v = 0; v < scc_of_.size(); ++v)
    scc_finish_[scc_of_[v]] = std::max<std::uint64_t>(scc_finish_[scc_of_[v]], interval_[v].pop);
}

std::size_t TdrIndex::byte_size() const {
  auto bytes = [](const auto& v) { return v.size() * sizeof(v[0]); };
  return sizeof(TdrIndex) + bytes(interval_) + bytes(rank_) + bytes(scc_of_) + bytes(hashes_) +
         bytes(scc_finish_) +
         bytes(n_in_.data()) + bytes(n_out_.data()) + bytes(layout_.offsets) +
         bytes(horizontal_vtx_.data()) + bytes(horizontal_lab_.data()) +
         bytes(vertical_lab_.data()) + bytes(vertical_vtx_.data());
}

bool TdrIndex::compatible_with(const Graph& graph) const {
  if (vertex_count() != graph.vertex_count() || label_count_ != graph.label_count() ||
      edge_count_ != graph.edge_count())
    return false;
  for (VertexId v = 0; v < graph.vertex_count(); ++v)
    if (layout_.count(v) != group_count_for(graph.out_degree(v), params_)) return false;
  return true;
}

bool operator==(const TdrIndex& a, const TdrIndex& b) {
  return a.params_ == b.params_ && a.labels_.mode == b.labels_.mode &&
         a.labels_.width == b.labels_.width && a.labels_.seed == b.labels_.seed &&
         a.label_count_ == b.label_count_ && a.edge_count_ == b.edge_count_ &&
         a.interval_ == b.interval_ && a.rank_ == b.rank_ && a.scc_of_ == b.scc_of_ &&
         a.n_in_ == b.n_in_ && a.n_out_ == b.n_out_ && a.layout_.offsets == b.layout_.offsets &&
         a.horizontal_vtx_ == b.horizontal_vtx_ && a.horizontal_lab_ == b.horizontal_lab_ &&
         a.vertical_lab_ == b.vertical_lab_ && a.vertical_vtx_ == b.vertical_vtx_;
}

TdrIndex build_index(const Graph& graph, const IndexParams& params) {
  params.validate();
  const auto start = std::chrono::steady_clock::now();

  TdrIndex index;
  index.params_ = params;
  index.labels_ = LabelEncoding::make(graph.label_count(), params);
  index.label_count_ = graph.label_count();
  index.edge_count_ = graph.edge_count();

  Condensation cond = compute_sccs(graph);
  IntervalLabels intervals = compute_intervals(graph);
  index.interval_ = std::move(intervals.interval);
  index.rank_ = std::move(intervals.finish_rank);
  index.scc_of_ = cond.scc_of;
  index.refresh_derived();

  VertexHasher hasher(params, index.rank_);
  index.layout_ = GroupLayout::make(graph, params);
  index.n_in_ = build_nin(graph, cond, hasher);
  HorizontalTables h = build_horizontal(graph, cond, hasher, index.labels_, index.layout_, params);
  index.horizontal_vtx_ = std::move(h.h_vtx);
  index.horizontal_lab_ = std::move(h.h_lab);
  index.n_out_ = std::move(h.n_out);
  VerticalTables v = build_vertical(graph, hasher, index.labels_, index.layout_, params);
  index.vertical_lab_ = std::move(v.v_lab);
  index.vertical_vtx_ = std::move(v.v_vtx);

  index.build_seconds_ =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return index;
}

}  // namespace tdr
