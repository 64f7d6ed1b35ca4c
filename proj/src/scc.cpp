#include <algorithm>
#include <limits>

#include "tdr/graph.hpp"

namespace tdr {

Condensation compute_sccs(const Graph& graph) {
  constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();
  const std::size_t n = graph.vertex_count();

  Condensation c;
  c.scc_of.assign(n, kUnset);
  std::vector<std::uint32_t> index(n, kUnset), low(n, 0);
  std::vector<VertexId> stack;
  std::vector<bool> on_stack(n, false);
  struct Frame {
    VertexId v;
    std::uint32_t next;
  };
  std::vector<Frame> call;
  std::uint32_t counter = 0;
  std::uint32_t scc_count = 0;

  for (VertexId root = 0; root < n; ++root) {
    if (index[root] != kUnset) continue;
    call.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      auto succ = graph.successors(f.v);
      if (f.next < succ.size()) {
        VertexId w = succ[f.next++].vertex;
        if (index[w] == kUnset) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      VertexId v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        VertexId w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          c.scc_of[w] = scc_count;
        } while (w != v);
        ++scc_count;
      }
    }
  }
  c.scc_count = scc_count;

  c.member_offsets.assign(scc_count + 1, 0);
  for (VertexId v = 0; v < n; ++v) ++c.member_offsets[c.scc_of[v] + 1];
  for (std::size_t i = 0; i < scc_count; ++i) c.member_offsets[i + 1] += c.member_offsets[i];
  c.members.resize(n);
  {
    std::vector<std::uint32_t> cursor(c.member_offsets.begin(), c.member_offsets.end() - 1);
    for (VertexId v = 0; v < n; ++v) c.members[cursor[c.scc_of[v]]++] = v;
  }

  std::vector<std::pair<std::uint32_t, std::uint32_t>> arcs;
  for (const Edge& e : graph.edges()) {
    std::uint32_t a = c.scc_of[e.source], b = c.scc_of[e.target];
    if (a != b) arcs.emplace_back(a, b);
  }
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
  c.dag_offsets.assign(scc_count + 1, 0);
  for (auto [a, b] : arcs) ++c.dag_offsets[a + 1];
  for (std::size_t i = 0; i < scc_count; ++i) c.dag_offsets[i + 1] += c.dag_offsets[i];
  c.dag_targets.reserve(arcs.size());
  for (auto [a, b] : arcs) c.dag_targets.push_back(b);

  c.reverse_topo_order.resize(scc_count);
  for (std::uint32_t i = 0; i < scc_count; ++i) c.reverse_topo_order[i] = i;
  return c;
}

}  // namespace tdr
