#include <cmath>
#include <random>
#include <unordered_set>

#include "tdr/errors.hpp"
#include "tdr/graph.hpp"

namespace tdr {

namespace {

struct TripleHash {
  std::size_t operator()(const Edge& e) const {
    std::uint64_t h = (static_cast<std::uint64_t>(e.source) << 32) | e.target;
    h ^= static_cast<std::uint64_t>(e.label) * 0x9E3779B97F4A7C15ULL;
    h ^= h >> 31;
    h *= 0xBF58476D1CE4E5B9ULL;
    return h ^ (h >> 29);
  }
};

std::size_t checked_edge_count(std::size_t n, double d, std::size_t label_count) {
  if (n < 1) throw InvalidParam("n must be >= 1");
  if (!(d >= 0.0) || !std::isfinite(d)) throw InvalidParam("d must be >= 0");
  if (label_count < 1) throw InvalidParam("label_count must be >= 1");
  long double m = std::llround(static_cast<long double>(n) * d);
  long double capacity = static_cast<long double>(n) * static_cast<long double>(n - 1) *
                         static_cast<long double>(label_count);
  if (m > capacity)
    throw InvalidParam("round(n*d) exceeds the number of distinct labelled edges");
  if (m > 4294967295.0L) throw CapacityError("too many edges");
  return static_cast<std::size_t>(m);
}

}  // namespace

Graph generate_er(std::size_t n, double d, std::size_t label_count,
                  std::uint64_t seed) {
  const std::size_t m = checked_edge_count(n, d, label_count);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<VertexId> pick_vertex(0, static_cast<VertexId>(n - 1));
  std::uniform_int_distribution<LabelId> pick_label(0, static_cast<LabelId>(label_count - 1));

  std::vector<Edge> edges;
  edges.reserve(m);
  std::unordered_set<Edge, TripleHash> seen;
  seen.reserve(m);
  while (edges.size() < m) {
    Edge e{pick_vertex(rng), pick_vertex(rng), pick_label(rng)};
    if (e.source == e.target) continue;
    if (!seen.insert(e).second) continue;
    edges.push_back(e);
  }
  return Graph::from_edges(n, std::move(edges), LabelDictionary::numbered(label_count));
}

Graph generate_pa(std::size_t n, double d, std::size_t label_count,
                  std::uint64_t seed) {
  const std::size_t m = checked_edge_count(n, d, label_count);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<LabelId> pick_label(0, static_cast<LabelId>(label_count - 1));

  std::vector<Edge> edges;
  edges.reserve(m);
  std::unordered_set<Edge, TripleHash> seen;
  seen.reserve(m);
  // One urn entry per arrived vertex plus one per received edge, so a uniform
  // draw from the urn is proportional to in-degree + 1.
  std::vector<VertexId> urn;
  urn.reserve(n + m);
  urn.push_back(0);

  auto add_edges_until = [&](std::size_t arrived, std::size_t want) {
    const long double capacity = static_cast<long double>(arrived) *
                                 static_cast<long double>(arrived - 1) *
                                 static_cast<long double>(label_count);
    std::uniform_int_distribution<VertexId> pick_source(0, static_cast<VertexId>(arrived - 1));
    while (edges.size() < want && static_cast<long double>(edges.size()) < capacity) {
      std::uniform_int_distribution<std::size_t> pick_slot(0, urn.size() - 1);
      Edge e{pick_source(rng), urn[pick_slot(rng)], pick_label(rng)};
      if (e.source == e.target) continue;
      if (!seen.insert(e).second) continue;
      edges.push_back(e);
      urn.push_back(e.target);
    }
  };

  for (std::size_t arrived = 2; arrived <= n; ++arrived) {
    urn.push_back(static_cast<VertexId>(arrived - 1));
    // Cumulative budget keeps the final count at exactly round(n*d); budget
    // that does not fit among few early vertices carries over.
    const auto want = static_cast<std::size_t>(
        std::llround(static_cast<long double>(m) * arrived / static_cast<long double>(n)));
    add_edges_until(arrived, want);
  }
  return Graph::from_edges(n, std::move(edges), LabelDictionary::numbered(label_count));
}

}  // namespace tdr
