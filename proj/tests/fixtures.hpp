#pragma once

#include <algorithm>
#include <initializer_list>
#include <sstream>
#include <string>

#include "tdr/graph.hpp"
#include "tdr/pattern.hpp"

namespace tdr::testing {

inline Graph graph_from(const std::string& text) {
  std::istringstream in(text);
  return load_edge_list(in);
}

// Vertices 0-5, labels interned as a, b, d, c, e.
inline Graph toy_dag() {
  return graph_from("0 1 a\n0 2 b\n1 3 d\n2 3 c\n3 4 b\n2 5 e\n5 4 a\n");
}

inline Graph cyclic() { return graph_from("0 1 a\n1 2 b\n2 0 c\n2 3 d\n"); }

// 7 vertices; DFS from 0 gives v4=[5,8] and v6=[6,7].
inline Graph interval_example() {
  return graph_from("#!vertices 7\n0 1 x\n0 2 x\n0 4 x\n4 6 x\n");
}

inline LabelId label(const Graph& g, const std::string& name) { return *g.labels().find(name); }

inline Clause clause(const Graph& g, std::initializer_list<const char*> r,
                     std::initializer_list<const char*> x) {
  Clause c;
  for (const char* n : r) c.required.push_back(label(g, n));
  for (const char* n : x) c.excluded.push_back(label(g, n));
  std::sort(c.required.begin(), c.required.end());
  std::sort(c.excluded.begin(), c.excluded.end());
  return c;
}

}  // namespace tdr::testing
