#include "tdr/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <unordered_set>

#include "tdr/errors.hpp"

namespace tdr {

namespace {

constexpr std::size_t kMaxIds = std::numeric_limits<std::uint32_t>::max();

std::uint64_t triple_key(const Edge& e) {
  // 64-bit mixing of the three fields; collisions are resolved by the set
  // holding full triples below.
  return (static_cast<std::uint64_t>(e.source) << 32 | e.target) * 0x9E3779B97F4A7C15ULL ^
         (static_cast<std::uint64_t>(e.label) + 0x632BE59BD9B4E019ULL);
}

struct EdgeHash {
  std::size_t operator()(const Edge& e) const { return triple_key(e); }
};

void build_csr(std::size_t n, std::span<const Edge> edges, bool forward,
               std::vector<std::uint32_t>& offsets, std::vector<Arc>& arcs) {
  offsets.assign(n + 1, 0);
  for (const Edge& e : edges) ++offsets[(forward ? e.source : e.target) + 1];
  for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
  arcs.resize(edges.size());
  std::vector<std::uint32_t> cursor(offsets.begin(), offsets.end() - 1);
  for (const Edge& e : edges) {
    if (forward)
      arcs[cursor[e.source]++] = {e.target, e.label};
    else
      arcs[cursor[e.target]++] = {e.source, e.label};
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(arcs.begin() + offsets[i], arcs.begin() + offsets[i + 1],
              [](const Arc& a, const Arc& b) {
                return a.vertex != b.vertex ? a.vertex < b.vertex : a.label < b.label;
              });
  }
}

}  // namespace

LabelId LabelDictionary::intern(std::string_view name) {
  auto it = ids_.find(std::string(name));
  if (it != ids_.end()) return it->second;
  if (names_.size() >= kMaxIds) throw CapacityError("too many labels");
  auto id = static_cast<LabelId>(names_.size());
  names_.emplace_back(name);
  ids_.emplace(names_.back(), id);
  return id;
}

std::optional<LabelId> LabelDictionary::find(std::string_view name) const {
  auto it = ids_.find(std::string(name));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

LabelDictionary LabelDictionary::numbered(std::size_t count) {
  LabelDictionary dict;
  for (std::size_t i = 0; i < count; ++i) dict.intern("l" + std::to_string(i));
  return dict;
}

Graph Graph::from_edges(std::size_t vertex_count, std::vector<Edge> edges,
                        LabelDictionary labels,
                        std::vector<std::string> original_ids) {
  if (vertex_count > kMaxIds) throw CapacityError("too many vertices");
  if (edges.size() > kMaxIds) throw CapacityError("too many edges");
  if (!original_ids.empty() && original_ids.size() != vertex_count)
    throw InvalidParam("original id table does not match vertex count");

  Graph g;
  g.vertex_count_ = vertex_count;
  g.edges_.reserve(edges.size());
  std::unordered_set<Edge, EdgeHash> seen;
  seen.reserve(edges.size());
  for (const Edge& e : edges) {
    if (e.source >= vertex_count || e.target >= vertex_count)
      throw InvalidParam("edge endpoint out of range");
    if (e.label >= labels.size()) throw InvalidParam("edge label out of range");
    if (seen.insert(e).second) g.edges_.push_back(e);
  }
  build_csr(vertex_count, g.edges_, true, g.forward_offsets_, g.forward_);
  build_csr(vertex_count, g.edges_, false, g.reverse_offsets_, g.reverse_);
  g.labels_ = std::move(labels);
  g.original_ids_ = std::move(original_ids);
  for (std::size_t v = 0; v < g.original_ids_.size(); ++v)
    g.original_lookup_.emplace(g.original_ids_[v], static_cast<VertexId>(v));
  return g;
}

std::string Graph::original_id(VertexId v) const {
  if (original_ids_.empty()) return std::to_string(v);
  return original_ids_.at(v);
}

std::optional<VertexId> Graph::find_vertex(std::string_view original) const {
  if (original_ids_.empty()) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(original.data(), original.data() + original.size(), v);
    if (ec != std::errc{} || ptr != original.data() + original.size() || v >= vertex_count_)
      return std::nullopt;
    return static_cast<VertexId>(v);
  }
  auto it = original_lookup_.find(std::string(original));
  if (it == original_lookup_.end()) return std::nullopt;
  return it->second;
}

bool operator==(const Graph& a, const Graph& b) {
  if (a.vertex_count_ != b.vertex_count_ || a.edges_ != b.edges_ ||
      !(a.labels_ == b.labels_))
    return false;
  for (VertexId v = 0; v < a.vertex_count_; ++v)
    if (a.original_id(v) != b.original_id(v)) return false;
  return true;
}

Graph load_edge_list(std::istream& in) {
  std::vector<Edge> edges;
  LabelDictionary labels;
  std::vector<std::string> ids;
  std::unordered_map<std::string, VertexId> id_of;

  auto vertex = [&](const std::string& name) -> VertexId {
    auto it = id_of.find(name);
    if (it != id_of.end()) return it->second;
    if (ids.size() >= kMaxIds) throw CapacityError("too many vertices");
    auto v = static_cast<VertexId>(ids.size());
    ids.push_back(name);
    id_of.emplace(name, v);
    return v;
  };

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> tokens;
  while (std::getline(in, line)) {
    ++line_no;
    tokens.clear();
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
      if (pos >= line.size()) break;
      std::size_t end = pos;
      while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
      tokens.emplace_back(line.substr(pos, end - pos));
      pos = end;
    }
    if (tokens.empty()) continue;
    if (tokens.front() == "#!vertices" && tokens.size() == 2) {
      std::uint64_t count = 0;
      auto [ptr, ec] = std::from_chars(tokens[1].data(), tokens[1].data() + tokens[1].size(), count);
      if (ec != std::errc{} || ptr != tokens[1].data() + tokens[1].size())
        throw ParseError(line_no, "bad vertex count");
      if (count > kMaxIds) throw CapacityError("too many vertices");
      for (std::uint64_t v = 0; v < count; ++v) vertex(std::to_string(v));
      continue;
    }
    if (tokens.front() == "#!labels") {
      for (std::size_t i = 1; i < tokens.size(); ++i) labels.intern(tokens[i]);
      continue;
    }
    if (tokens.front() == "#!vertex" && tokens.size() == 2) {
      vertex(tokens[1]);
      continue;
    }
    if (tokens.front().front() == '#') continue;
    if (tokens.size() < 3)
      throw ParseError(line_no, "expected '<src> <tgt> <label>'");
    VertexId s = vertex(tokens[0]);
    VertexId t = vertex(tokens[1]);
    // Extra tokens are further labels of the same edge.
    for (std::size_t i = 2; i < tokens.size(); ++i) {
      edges.push_back({s, t, labels.intern(tokens[i])});
    }
    if (edges.size() > kMaxIds) throw CapacityError("too many edges");
  }
  std::size_t n = ids.size();
  return Graph::from_edges(n, std::move(edges), std::move(labels), std::move(ids));
}

Graph load_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return load_edge_list(in);
}

void write_edge_list(const Graph& graph, std::ostream& out) {
  // Declare vertices up front unless first-seen order already rebuilds the ids.
  std::vector<char> seen(graph.vertex_count(), 0);
  VertexId next = 0;
  bool in_order = true;
  for (const Edge& e : graph.edges()) {
    for (VertexId v : {e.source, e.target}) {
      if (seen[v]) continue;
      seen[v] = 1;
      in_order = in_order && v == next++;
    }
  }
  std::vector<char> used(graph.label_count(), 0);
  LabelId next_label = 0;
  bool labels_in_order = true;
  for (const Edge& e : graph.edges()) {
    if (used[e.label]) continue;
    used[e.label] = 1;
    labels_in_order = labels_in_order && e.label == next_label++;
  }
  if (!labels_in_order || next_label != graph.label_count()) {
    out << "#!labels";
    for (const std::string& name : graph.labels().names()) out << ' ' << name;
    out << '\n';
  }
  if (!in_order || next != graph.vertex_count()) {
    if (!graph.has_original_ids()) {
      out << "#!vertices " << graph.vertex_count() << '\n';
    } else {
      for (VertexId v = 0; v < graph.vertex_count(); ++v)
        out << "#!vertex " << graph.original_id(v) << '\n';
    }
  }
  for (const Edge& e : graph.edges()) {
    out << graph.original_id(e.source) << ' ' << graph.original_id(e.target)
        << ' ' << graph.labels().name(e.label) << '\n';
  }
}

}  // namespace tdr
