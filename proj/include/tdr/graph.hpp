#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tdr {

using VertexId = std::uint32_t;
using LabelId = std::uint32_t;

struct Edge {
  VertexId source = 0;
  VertexId target = 0;
  LabelId label = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// One adjacency entry: the neighbour on the other side and the edge label.
struct Arc {
  VertexId vertex = 0;
  LabelId label = 0;

  friend bool operator==(const Arc&, const Arc&) = default;
};

// Dense label ids in first-interned order.
class LabelDictionary {
 public:
  LabelId intern(std::string_view name);
  std::optional<LabelId> find(std::string_view name) const;
  const std::string& name(LabelId id) const { return names_.at(id); }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  // Convenience for generators and tests: labels "l0".."l{n-1}".
  static LabelDictionary numbered(std::size_t count);

  friend bool operator==(const LabelDictionary& a, const LabelDictionary& b) {
    return a.names_ == b.names_;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, LabelId> ids_;
};

// Immutable edge-labelled digraph. Edges are a set of (source, target, label)
// triples; an edge carrying several labels is several triples. Adjacency is
// stored CSR-style in both directions, each list sorted by (vertex, label).
class Graph {
 public:
  Graph() : forward_offsets_(1, 0), reverse_offsets_(1, 0) {}

  // Validates endpoints and labels, drops duplicate triples (first
  // occurrence wins) and builds both adjacency directions. `original_ids`
  // is either empty or one external name per vertex.
  static Graph from_edges(std::size_t vertex_count, std::vector<Edge> edges,
                          LabelDictionary labels,
                          std::vector<std::string> original_ids = {});

  std::size_t vertex_count() const { return vertex_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t label_count() const { return labels_.size(); }

  // Edges in insertion order (after de-duplication).
  std::span<const Edge> edges() const { return edges_; }

  std::span<const Arc> successors(VertexId u) const {
    return {forward_.data() + forward_offsets_[u],
            forward_.data() + forward_offsets_[u + 1]};
  }
  std::span<const Arc> predecessors(VertexId u) const {
    return {reverse_.data() + reverse_offsets_[u],
            reverse_.data() + reverse_offsets_[u + 1]};
  }
  std::size_t out_degree(VertexId u) const {
    return forward_offsets_[u + 1] - forward_offsets_[u];
  }
  std::size_t in_degree(VertexId u) const {
    return reverse_offsets_[u + 1] - reverse_offsets_[u];
  }

  const LabelDictionary& labels() const { return labels_; }

  // External vertex name; the decimal id when the graph was not loaded.
  std::string original_id(VertexId v) const;
  std::optional<VertexId> find_vertex(std::string_view original) const;
  bool has_original_ids() const { return !original_ids_.empty(); }

  friend bool operator==(const Graph& a, const Graph& b);

 private:
  std::size_t vertex_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::uint32_t> forward_offsets_;
  std::vector<Arc> forward_;
  std::vector<std::uint32_t> reverse_offsets_;
  std::vector<Arc> reverse_;
  LabelDictionary labels_;
  std::vector<std::string> original_ids_;
  std::unordered_map<std::string, VertexId> original_lookup_;
};

// Reads `<src> <tgt> <label>` lines; `#` starts a comment line. Vertex ids
// are densified in first-seen order, labels interned in first-seen order.
Graph load_edge_list(std::istream& in);
Graph load_edge_list_file(const std::string& path);

// Writes one line per edge using original vertex ids and label names.
void write_edge_list(const Graph& graph, std::ostream& out);

// Erdos-Renyi style: exactly round(n*d) distinct edges, uniform endpoints,
// no self-loops, uniform labels.
Graph generate_er(std::size_t n, double d, std::size_t label_count,
                  std::uint64_t seed);

// Growing preferential-attachment graph. Vertices arrive one at a time; each
// edge picks a uniform source among arrived vertices and a target with
// probability proportional to in-degree + 1. Early vertices accumulate many
// out-edges, which gives the skewed out-degree profile.
Graph generate_pa(std::size_t n, double d, std::size_t label_count,
                  std::uint64_t seed);

struct Condensation {
  std::vector<std::uint32_t> scc_of;
  std::size_t scc_count = 0;
  // CSR adjacency of the condensation DAG (no duplicate arcs).
  std::vector<std::uint32_t> dag_offsets;
  std::vector<std::uint32_t> dag_targets;
  // Sinks first. Reversing it gives a topological order of the DAG.
  std::vector<std::uint32_t> reverse_topo_order;
  // Members of every SCC, grouped by SCC id.
  std::vector<std::uint32_t> member_offsets;
  std::vector<VertexId> members;

  std::span<const std::uint32_t> dag_successors(std::uint32_t c) const {
    return {dag_targets.data() + dag_offsets[c],
            dag_targets.data() + dag_offsets[c + 1]};
  }
  std::span<const VertexId> scc_members(std::uint32_t c) const {
    return {members.data() + member_offsets[c],
            members.data() + member_offsets[c + 1]};
  }
};

// Iterative Tarjan. SCC ids come out sinks-first, so every DAG arc goes from
// a larger id to a smaller one.
Condensation compute_sccs(const Graph& graph);

}  // namespace tdr
