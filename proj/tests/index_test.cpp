#include <gtest/gtest.h>

#include <queue>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "tdr/errors.hpp"
#include "tdr/index.hpp"
#include "tdr/query.hpp"

using namespace tdr;
using namespace tdr::testing;

namespace {

using Mask = std::vector<std::uint64_t>;

std::vector<bool> reachable_from(const Graph& g, VertexId s) {
  std::vector<bool> seen(g.vertex_count(), false);
  std::queue<VertexId> q;
  seen[s] = true;
  q.push(s);
  while (!q.empty()) {
    VertexId x = q.front();
    q.pop();
    for (const Arc& a : g.successors(x))
      if (!seen[a.vertex]) {
        seen[a.vertex] = true;
        q.push(a.vertex);
      }
  }
  return seen;
}

void add_vertex(const TdrIndex& idx, Mask& m, VertexId v) {
  bits::set(m, idx.hash(v).bit[0]);
  bits::set(m, idx.hash(v).bit[1]);
}

Mask vertex_mask(const TdrIndex& idx, const std::vector<bool>& members) {
  Mask m(idx.vertex_words(), 0);
  for (VertexId v = 0; v < members.size(); ++v)
    if (members[v]) add_vertex(idx, m, v);
  return m;
}

Mask to_mask(std::span<const std::uint64_t> s) { return Mask(s.begin(), s.end()); }

// Successor slots of group i of u.
std::vector<Arc> group_arcs(const Graph& g, const TdrIndex& idx, VertexId u, std::uint32_t i) {
  auto [first, last] = group_slots(g.out_degree(u), idx.group_count(u), i);
  auto succ = g.successors(u);
  return {succ.begin() + first, succ.begin() + last};
}

IndexParams exact_params(std::uint32_t depth = 2) {
  IndexParams p;
  p.label_mode = LabelMode::Exact;
  p.depth = depth;
  return p;
}

// Horizontal tables, n_in and n_out against closures.
void check_against_brute_force(const Graph& g, const TdrIndex& idx) {
  const std::size_t n = g.vertex_count();
  const LabelEncoding& enc = idx.label_encoding();
  std::vector<std::vector<bool>> reach(n);
  for (VertexId v = 0; v < n; ++v) reach[v] = reachable_from(g, v);

  for (VertexId u = 0; u < n; ++u) {
    EXPECT_EQ(to_mask(idx.n_out(u)), vertex_mask(idx, reach[u])) << u;
    std::vector<bool> into(n, false);
    for (VertexId w = 0; w < n; ++w) into[w] = reach[w][u];
    EXPECT_EQ(to_mask(idx.n_in(u)), vertex_mask(idx, into)) << u;

    for (std::uint32_t i = 0; i < idx.group_count(u); ++i) {
      std::vector<bool> through(n, false);
      through[u] = true;
      Mask lab(enc.words(), 0);
      for (const Arc& a : group_arcs(g, idx, u, i)) {
        bits::set(lab, enc.bit(a.label));
        for (VertexId w = 0; w < n; ++w)
          if (reach[a.vertex][w]) through[w] = true;
      }
      for (const Edge& e : g.edges()) {
        bool below = false;
        for (const Arc& a : group_arcs(g, idx, u, i)) below = below || reach[a.vertex][e.source];
        if (below) bits::set(lab, enc.bit(e.label));
      }
      EXPECT_EQ(to_mask(idx.h_vtx(u, i)), vertex_mask(idx, through)) << u << "/" << i;
      EXPECT_EQ(to_mask(idx.h_lab(u, i)), lab) << u << "/" << i;
    }
  }
}

// Per-depth label and vertex unions through every group.
void check_vertical(const Graph& g, const TdrIndex& idx) {
  const std::size_t n = g.vertex_count();
  const LabelEncoding& enc = idx.label_encoding();
  for (VertexId u = 0; u < n; ++u) {
    for (std::uint32_t i = 0; i < idx.group_count(u); ++i) {
      std::vector<bool> frontier(n, false);
      Mask lab0(enc.words(), 0);
      for (const Arc& a : group_arcs(g, idx, u, i)) {
        frontier[a.vertex] = true;
        bits::set(lab0, enc.bit(a.label));
      }
      EXPECT_EQ(to_mask(idx.v_lab(u, i, 0)), lab0);
      EXPECT_EQ(to_mask(idx.v_vtx(u, i, 0)), vertex_mask(idx, frontier));
      bool ended = false;
      for (std::uint32_t j = 1; j < idx.depth(); ++j) {
        Mask lab(enc.words(), 0);
        std::vector<bool> next(n, false);
        for (VertexId x = 0; x < n; ++x) {
          if (!frontier[x]) continue;
          if (g.out_degree(x) == 0) ended = true;
          for (const Arc& a : g.successors(x)) {
            next[a.vertex] = true;
            bits::set(lab, enc.bit(a.label));
          }
        }
        if (ended) bits::set(lab, enc.epsilon());
        EXPECT_EQ(to_mask(idx.v_lab(u, i, j)), lab) << u << "/" << i << "/" << j;
        EXPECT_EQ(to_mask(idx.v_vtx(u, i, j)), vertex_mask(idx, next)) << u << "/" << i << "/" << j;
        frontier = std::move(next);
      }
    }
  }
}

void check_invariants(const Graph& g, const TdrIndex& idx) {
  Condensation c = compute_sccs(g);
  for (VertexId u = 0; u < g.vertex_count(); ++u) {
    auto succ = g.successors(u);
    if (succ.empty()) {
      EXPECT_EQ(idx.group_count(u), 0u);
      Mask own(idx.vertex_words(), 0);
      add_vertex(idx, own, u);
      EXPECT_EQ(to_mask(idx.n_out(u)), own);
    }
    for (std::size_t s = 0; s < succ.size(); ++s) {
      VertexId v = succ[s].vertex;
      auto h = idx.h_vtx(u, idx.group_of(u, s, succ.size()));
      EXPECT_TRUE(bits::subset(idx.n_out(v), h));
      EXPECT_TRUE(idx.hash_in(h, v));
      EXPECT_TRUE(bits::subset(idx.n_in(u), idx.n_in(v)));
      EXPECT_TRUE(bits::subset(idx.n_out(v), idx.n_out(u)));
    }
    for (VertexId w = 0; w < g.vertex_count(); ++w) {
      if (c.scc_of[u] != c.scc_of[w]) continue;
      EXPECT_EQ(to_mask(idx.n_in(u)), to_mask(idx.n_in(w)));
      EXPECT_EQ(to_mask(idx.n_out(u)), to_mask(idx.n_out(w)));
    }
  }
}

}  // namespace

TEST(PlanGroups, Examples) {
  IndexParams p;
  GroupPlan seven = plan_groups(7, p);
  EXPECT_EQ(seven.count, 2u);
  EXPECT_EQ(seven.slot_group, (std::vector<std::uint32_t>{0, 0, 0, 0, 1, 1, 1}));
  EXPECT_EQ(plan_groups(1000, p).count, 8u);
  EXPECT_EQ(plan_groups(0, p).count, 0u);
  EXPECT_EQ(plan_groups(1, p).count, 1u);
  EXPECT_EQ(group_slots(7, 2, 0), (std::pair<std::size_t, std::size_t>{0, 4}));
  EXPECT_EQ(group_slots(7, 2, 1), (std::pair<std::size_t, std::size_t>{4, 7}));
}

TEST(PlanGroups, SlotsMatchAssignment) {
  IndexParams p;
  p.group_size = 3;
  p.max_groups = 5;
  for (std::size_t deg = 1; deg < 60; ++deg) {
    GroupPlan plan = plan_groups(deg, p);
    for (std::uint32_t i = 0; i < plan.count; ++i) {
      auto [first, last] = group_slots(deg, plan.count, i);
      EXPECT_LT(first, last);
      for (std::size_t s = 0; s < deg; ++s)
        EXPECT_EQ(plan.slot_group[s] == i, s >= first && s < last);
    }
  }
}

TEST(VertexHash, LocalityRuns) {
  IndexParams p;
  auto b = vertex_hash(4, p).bit[0];
  for (std::uint32_t r : {5u, 6u, 7u}) EXPECT_EQ(vertex_hash(r, p).bit[0], b);
  EXPECT_NE(vertex_hash(8, p).bit[0], b);
}

TEST(VertexHash, PopcountAndDeterminism) {
  IndexParams p;
  for (std::uint32_t r = 0; r < 5000; ++r) {
    VertexHash h = vertex_hash(r, p);
    EXPECT_TRUE(h.popcount() == 1 || h.popcount() == 2);
    EXPECT_LT(h.bit[0], p.vertex_bits);
    EXPECT_LT(h.bit[1], p.vertex_bits);
    EXPECT_EQ(h.bit, vertex_hash(r, p).bit);
  }
  p.mixing_hash = false;
  EXPECT_EQ(vertex_hash(9, p).popcount(), 1u);
  p.mixing_hash = true;
  p.locality_hash = false;
  EXPECT_EQ(vertex_hash(9, p).popcount(), 1u);
}

TEST(Params, Validation) {
  IndexParams p;
  EXPECT_NO_THROW(p.validate());
  p.vertex_bits = 48;
  EXPECT_THROW(p.validate(), InvalidParam);
  p = {};
  p.depth = 0;
  EXPECT_THROW(p.validate(), InvalidParam);
  p = {};
  p.group_size = 0;
  EXPECT_THROW(p.validate(), InvalidParam);
  p = {};
  p.label_bloom_bits = 100;
  EXPECT_THROW(p.validate(), InvalidParam);
  p = {};
  EXPECT_EQ(p.resolve_label_mode(4096), LabelMode::Exact);
  EXPECT_EQ(p.resolve_label_mode(4097), LabelMode::Bloom);
}

TEST(Intervals, ChainNesting) {
  IntervalLabels il = compute_intervals(graph_from("0 1 a\n1 2 a\n"));
  auto inside = [](const Interval& a, const Interval& b) {
    return b.push < a.push && a.pop < b.pop;
  };
  EXPECT_TRUE(inside(il.interval[2], il.interval[1]));
  EXPECT_TRUE(inside(il.interval[1], il.interval[0]));
}

TEST(Intervals, CounterContract) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Graph g = generate_er(80, 1.5, 3, seed);
    IntervalLabels il = compute_intervals(g);
    std::set<std::uint32_t> stamps;
    for (const Interval& iv : il.interval) {
      EXPECT_LT(iv.push, iv.pop);
      stamps.insert(iv.push);
      stamps.insert(iv.pop);
    }
    EXPECT_EQ(stamps.size(), 2 * g.vertex_count());
    EXPECT_EQ(*stamps.begin(), 0u);
    EXPECT_EQ(*stamps.rbegin(), 2 * g.vertex_count() - 1);
    std::vector<std::uint32_t> ranks = il.finish_rank;
    std::sort(ranks.begin(), ranks.end());
    for (std::uint32_t r = 0; r < ranks.size(); ++r) EXPECT_EQ(ranks[r], r);
  }
}

TEST(Intervals, WorkedExample) {
  IntervalLabels il = compute_intervals(interval_example());
  EXPECT_EQ(il.interval[4], (Interval{5, 8}));
  EXPECT_EQ(il.interval[6], (Interval{6, 7}));
}

TEST(Intervals, CycleOnlyComponentsCovered) {
  Graph g = cyclic();
  IntervalLabels il = compute_intervals(g);
  std::set<std::uint32_t> stamps;
  for (const Interval& iv : il.interval) {
    stamps.insert(iv.push);
    stamps.insert(iv.pop);
  }
  EXPECT_EQ(stamps.size(), 8u);
}

TEST(Nin, RootAndChain) {
  Graph g = graph_from("0 1 a\n1 2 b\n");
  TdrIndex idx = build_index(g);
  Mask own(idx.vertex_words(), 0);
  add_vertex(idx, own, 0);
  EXPECT_EQ(to_mask(idx.n_in(0)), own);
  EXPECT_TRUE(bits::subset(idx.n_in(0), idx.n_in(1)));
  EXPECT_TRUE(bits::subset(idx.n_in(1), idx.n_in(2)));
}

TEST(Nin, CycleShared) {
  TdrIndex idx = build_index(cyclic());
  EXPECT_EQ(to_mask(idx.n_in(0)), to_mask(idx.n_in(1)));
  EXPECT_EQ(to_mask(idx.n_in(1)), to_mask(idx.n_in(2)));
}

TEST(Horizontal, LeafSuccessor) {
  Graph g = graph_from("0 1 a\n");
  TdrIndex idx = build_index(g, exact_params());
  Mask expect(idx.vertex_words(), 0);
  add_vertex(idx, expect, 0);
  add_vertex(idx, expect, 1);
  EXPECT_EQ(to_mask(idx.h_vtx(0, 0)), expect);
  Mask lab(idx.label_words(), 0);
  bits::set(lab, label(g, "a"));
  EXPECT_EQ(to_mask(idx.h_lab(0, 0)), lab);
}

TEST(Horizontal, CycleLabelsShared) {
  Graph g = cyclic();
  TdrIndex idx = build_index(g, exact_params());
  for (VertexId v : {0u, 1u, 2u}) {
    Mask all(idx.label_words(), 0);
    for (std::uint32_t i = 0; i < idx.group_count(v); ++i) bits::or_into(all, idx.h_lab(v, i));
    for (const char* l : {"a", "b", "c"}) EXPECT_TRUE(bits::test(all, label(g, l))) << v << l;
  }
}

TEST(Horizontal, ToyFixturesBruteForce) {
  for (const Graph& g : {toy_dag(), cyclic()}) {
    for (std::uint32_t m : {1u, 2u, 4u}) {
      IndexParams p = exact_params();
      p.group_size = m;
      TdrIndex idx = build_index(g, p);
      check_against_brute_force(g, idx);
    }
  }
}

TEST(Horizontal, RandomBruteForce) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Graph g = seed % 2 ? generate_er(40, 2.0, 4, seed) : generate_pa(40, 2.5, 4, seed);
    IndexParams p = exact_params(3);
    p.group_size = 1 + seed % 3;
    p.max_groups = 1 + seed % 4;
    p.vertex_bits = seed % 3 == 0 ? 128 : 64;
    check_against_brute_force(g, build_index(g, p));
  }
}

TEST(Vertical, EpsilonAfterShortPath) {
  Graph g = graph_from("0 1 a\n1 2 b\n");
  TdrIndex idx = build_index(g, exact_params(3));
  std::uint32_t eps = idx.label_encoding().epsilon();
  EXPECT_FALSE(bits::test(idx.v_lab(0, 0, 0), eps));
  EXPECT_FALSE(bits::test(idx.v_lab(0, 0, 1), eps));
  EXPECT_TRUE(bits::test(idx.v_lab(0, 0, 2), eps));
}

TEST(Vertical, BruteForce) {
  for (std::uint32_t k : {1u, 2u, 3u, 4u}) {
    for (const Graph& g : {toy_dag(), cyclic()}) check_vertical(g, build_index(g, exact_params(k)));
  }
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Graph g = generate_er(30, 1.5, 4, seed);
    IndexParams p = exact_params(3);
    p.group_size = 2;
    check_vertical(g, build_index(g, p));
  }
}

TEST(Index, Invariants) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Graph g = seed % 2 ? generate_er(200, 3.0, 6, seed) : generate_pa(200, 3.0, 6, seed);
    IndexParams p;
    if (seed % 3 == 0) {
      p.label_mode = LabelMode::Bloom;
      p.label_bloom_bits = 64;
    }
    check_invariants(g, build_index(g, p));
  }
  check_invariants(cyclic(), build_index(cyclic()));
}

TEST(Index, EmptyAndSingleEdge) {
  TdrIndex empty = build_index(Graph{});
  EXPECT_EQ(empty.vertex_count(), 0u);
  Graph one = graph_from("0 1 a\n");
  TdrIndex idx = build_index(one);
  EXPECT_EQ(idx.vertex_count(), 2u);
  EXPECT_EQ(idx.group_count(0), 1u);
  EXPECT_EQ(idx.group_count(1), 0u);
  check_invariants(one, idx);
  EXPECT_GT(idx.byte_size(), 0u);
  EXPECT_TRUE(idx.compatible_with(one));
  EXPECT_FALSE(idx.compatible_with(toy_dag()));
}

TEST(Index, IntervalSoundnessAgainstBfs) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    std::size_t n = 10 + seed % 51;
    Graph g = seed % 2 ? generate_er(n, 1.2, 2, seed) : generate_pa(n, 1.5, 2, seed);
    TdrIndex idx = build_index(g);
    for (VertexId u = 0; u < n; ++u) {
      auto reach = reachable_from(g, u);
      for (VertexId v = 0; v < n; ++v) {
        const Interval& iu = idx.interval(u);
        const Interval& iv = idx.interval(v);
        if (iu.push <= iv.push && iv.pop <= iu.pop) ASSERT_TRUE(reach[v]);
        if (idx.scc(u) != idx.scc(v) && idx.scc_finish(u) < idx.scc_finish(v))
          ASSERT_FALSE(reach[v]);
      }
    }
  }
}

TEST(Serialize, RoundTrip) {
  for (const Graph& g : {toy_dag(), cyclic(), generate_pa(500, 3.0, 8, 4), Graph{}}) {
    TdrIndex idx = build_index(g);
    std::stringstream buf;
    serialize(idx, buf);
    TdrIndex back = deserialize(buf);
    EXPECT_EQ(back, idx);
    EXPECT_TRUE(back.compatible_with(g));
  }
}

TEST(Serialize, RecordedParamsWin) {
  Graph g = generate_er(300, 3.0, 5, 8);
  IndexParams p;
  p.vertex_bits = 256;
  p.depth = 3;
  p.label_mode = LabelMode::Bloom;
  p.label_bloom_bits = 128;
  TdrIndex idx = build_index(g, p);
  std::stringstream buf;
  serialize(idx, buf);
  TdrIndex back = deserialize(buf);
  EXPECT_EQ(back.params(), p);
  EXPECT_EQ(back.vertex_words(), 4u);
  EXPECT_EQ(back, idx);
}

TEST(Serialize, CorruptMagic) {
  std::stringstream buf;
  serialize(build_index(toy_dag()), buf);
  std::string bytes = buf.str();
  bytes[0] = 'X';
  std::stringstream bad(bytes);
  EXPECT_THROW(deserialize(bad), FormatError);
}

TEST(Serialize, BadVersion) {
  std::stringstream buf;
  serialize(build_index(toy_dag()), buf);
  std::string bytes = buf.str();
  bytes[4] = 9;
  std::stringstream bad(bytes);
  EXPECT_THROW(deserialize(bad), FormatError);
}

TEST(Serialize, Truncation) {
  std::stringstream buf;
  serialize(build_index(toy_dag()), buf);
  std::string bytes = buf.str();
  for (std::size_t cut : {std::size_t{0}, std::size_t{3}, std::size_t{10}, bytes.size() / 2,
                          bytes.size() - 1}) {
    std::stringstream bad(bytes.substr(0, cut));
    EXPECT_THROW(deserialize(bad), FormatError) << cut;
  }
}

TEST(Serialize, Files) {
  TdrIndex idx = build_index(toy_dag());
  std::string path = ::testing::TempDir() + "toy.tdr";
  save_index(idx, path);
  EXPECT_EQ(load_index(path), idx);
  EXPECT_THROW(load_index(::testing::TempDir() + "missing.tdr"), Error);
}
