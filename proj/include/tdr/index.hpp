#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tdr/graph.hpp"

namespace tdr {

// ---------------------------------------------------------------- bitmasks

namespace bits {

inline bool test(std::span<const std::uint64_t> mask, std::size_t bit) {
  return (mask[bit >> 6] >> (bit & 63)) & 1U;
}
inline void set(std::span<std::uint64_t> mask, std::size_t bit) {
  mask[bit >> 6] |= std::uint64_t{1} << (bit & 63);
}
inline void or_into(std::span<std::uint64_t> dst, std::span<const std::uint64_t> src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] |= src[i];
}
// a is a bitwise subset of b
inline bool subset(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] & ~b[i]) return false;
  return true;
}
inline bool any(std::span<const std::uint64_t> mask) {
  for (std::uint64_t w : mask)
    if (w) return true;
  return false;
}

}  // namespace bits

// Fixed-width masks stored back to back.
class MaskTable {
 public:
  MaskTable() = default;
  MaskTable(std::size_t rows, std::size_t words) : words_(words), data_(rows * words, 0) {}

  std::size_t words() const { return words_; }
  std::size_t rows() const { return words_ ? data_.size() / words_ : 0; }
  std::span<std::uint64_t> row(std::size_t i) { return {data_.data() + i * words_, words_}; }
  std::span<const std::uint64_t> row(std::size_t i) const {
    return {data_.data() + i * words_, words_};
  }
  std::vector<std::uint64_t>& data() { return data_; }
  const std::vector<std::uint64_t>& data() const { return data_; }

  friend bool operator==(const MaskTable&, const MaskTable&) = default;

 private:
  std::size_t words_ = 0;
  std::vector<std::uint64_t> data_;
};

// ---------------------------------------------------------------- params

enum class LabelMode : std::uint8_t { Auto = 0, Exact = 1, Bloom = 2 };

struct IndexParams {
  std::uint32_t group_size = 4;  // target successors per group
  std::uint32_t max_groups = 8;
  std::uint32_t vertex_bits = 64;
  LabelMode label_mode = LabelMode::Auto;
  std::uint32_t exact_label_threshold = 4096;
  std::uint32_t label_bloom_bits = 64;
  std::uint32_t depth = 2;  // vertical layers
  std::uint32_t locality_shift = 2;
  bool locality_hash = true;
  bool mixing_hash = true;
  std::array<std::uint64_t, 2> hash_seeds{0, 0x2545F4914F6CDD1DULL};

  // Throws InvalidParam.
  void validate() const;
  // Auto resolves against the alphabet size.
  LabelMode resolve_label_mode(std::size_t label_count) const;

  friend bool operator==(const IndexParams&, const IndexParams&) = default;
};

// ---------------------------------------------------------------- building blocks

struct GroupPlan {
  std::uint32_t count = 0;
  std::vector<std::uint32_t> slot_group;  // successor slot -> group
};

// g = min(max_groups, ceil(out_degree / group_size)); slots are split into
// contiguous runs, slot s going to floor(s * g / out_degree).
GroupPlan plan_groups(std::size_t out_degree, const IndexParams& params);
std::uint32_t group_count_for(std::size_t out_degree, const IndexParams& params);
// Half-open slot range of group i.
std::pair<std::size_t, std::size_t> group_slots(std::size_t out_degree, std::uint32_t groups,
                                                std::uint32_t i);

// Up to two bit positions; equal positions mean a single set bit.
struct VertexHash {
  std::array<std::uint32_t, 2> bit{0, 0};
  std::size_t popcount() const { return bit[0] == bit[1] ? 1 : 2; }
};

// Hash of a vertex by its DFS-finish rank: a locality bit shared by runs of
// 2^locality_shift consecutive ranks plus an avalanche-mixed bit.
VertexHash vertex_hash(std::uint32_t rank, const IndexParams& params);

struct Interval {
  std::uint32_t push = 0;
  std::uint32_t pop = 0;
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct IntervalLabels {
  std::vector<Interval> interval;
  std::vector<std::uint32_t> finish_rank;  // 0 for the first vertex popped
};

// DFS from every vertex without predecessors (id order), then from every
// still-unvisited vertex. One counter ticks on every push and pop.
IntervalLabels compute_intervals(const Graph& graph);

// Maps labels and the epsilon marker to mask positions.
struct LabelEncoding {
  LabelMode mode = LabelMode::Exact;
  std::uint32_t width = 1;  // label positions; epsilon sits at `width`
  std::uint64_t seed = 0;

  static LabelEncoding make(std::size_t label_count, const IndexParams& params);
  std::size_t words() const { return (width + 1 + 63) / 64; }
  std::uint32_t epsilon() const { return width; }
  std::uint32_t bit(LabelId label) const;
};

// Vertex hashing bound to a finish-rank permutation.
class VertexHasher {
 public:
  VertexHasher(const IndexParams& params, std::span<const std::uint32_t> rank);
  std::size_t words() const { return words_; }
  const VertexHash& operator()(VertexId v) const { return hashes_[v]; }
  void set_into(std::span<std::uint64_t> mask, VertexId v) const {
    bits::set(mask, hashes_[v].bit[0]);
    bits::set(mask, hashes_[v].bit[1]);
  }
  bool contained_in(std::span<const std::uint64_t> mask, VertexId v) const {
    return bits::test(mask, hashes_[v].bit[0]) && bits::test(mask, hashes_[v].bit[1]);
  }

 private:
  std::size_t words_;
  std::vector<VertexHash> hashes_;
};

// Per-vertex group counts as prefix offsets (leaves own no groups).
struct GroupLayout {
  std::vector<std::uint32_t> offsets;  // size |V|+1
  static GroupLayout make(const Graph& graph, const IndexParams& params);
  std::uint32_t count(VertexId v) const { return offsets[v + 1] - offsets[v]; }
  std::size_t total() const { return offsets.back(); }
};

// Reverse single-way masks: own hash OR every predecessor's mask, with one
// shared mask per SCC.
MaskTable build_nin(const Graph& graph, const Condensation& cond, const VertexHasher& hasher);

struct HorizontalTables {
  MaskTable h_vtx;  // one row per group
  MaskTable h_lab;  // one row per group
  MaskTable n_out;  // one row per vertex
};

HorizontalTables build_horizontal(const Graph& graph, const Condensation& cond,
                                  const VertexHasher& hasher, const LabelEncoding& labels,
                                  const GroupLayout& layout, const IndexParams& params);

struct VerticalTables {
  MaskTable v_lab;  // row = group * depth + layer
  MaskTable v_vtx;
};

VerticalTables build_vertical(const Graph& graph, const VertexHasher& hasher,
                              const LabelEncoding& labels, const GroupLayout& layout,
                              const IndexParams& params);

// ---------------------------------------------------------------- index

class TdrIndex {
 public:
  TdrIndex() = default;

  const IndexParams& params() const { return params_; }
  LabelMode label_mode() const { return labels_.mode; }
  const LabelEncoding& label_encoding() const { return labels_; }
  std::size_t vertex_count() const { return interval_.size(); }
  std::size_t label_count() const { return label_count_; }
  std::size_t edge_count() const { return edge_count_; }
  std::uint32_t depth() const { return params_.depth; }

  const Interval& interval(VertexId v) const { return interval_[v]; }
  std::uint32_t rank(VertexId v) const { return rank_[v]; }
  std::uint32_t scc(VertexId v) const { return scc_of_[v]; }
  // Latest pop among the members of v's SCC.
  std::uint64_t scc_finish(VertexId v) const { return scc_finish_[scc_of_[v]]; }
  const VertexHash& hash(VertexId v) const { return hashes_[v]; }
  bool hash_in(std::span<const std::uint64_t> mask, VertexId v) const {
    return bits::test(mask, hashes_[v].bit[0]) && bits::test(mask, hashes_[v].bit[1]);
  }

  std::span<const std::uint64_t> n_in(VertexId v) const { return n_in_.row(v); }
  std::span<const std::uint64_t> n_out(VertexId v) const { return n_out_.row(v); }

  std::uint32_t group_count(VertexId v) const { return layout_.count(v); }
  std::span<const std::uint64_t> h_vtx(VertexId v, std::uint32_t i) const {
    return horizontal_vtx_.row(layout_.offsets[v] + i);
  }
  std::span<const std::uint64_t> h_lab(VertexId v, std::uint32_t i) const {
    return horizontal_lab_.row(layout_.offsets[v] + i);
  }
  std::span<const std::uint64_t> v_lab(VertexId v, std::uint32_t i, std::uint32_t j) const {
    return vertical_lab_.row((std::size_t{layout_.offsets[v]} + i) * params_.depth + j);
  }
  std::span<const std::uint64_t> v_vtx(VertexId v, std::uint32_t i, std::uint32_t j) const {
    return vertical_vtx_.row((std::size_t{layout_.offsets[v]} + i) * params_.depth + j);
  }
  // Group of successor slot `slot` of v.
  std::uint32_t group_of(VertexId v, std::size_t slot, std::size_t out_degree) const {
    return static_cast<std::uint32_t>(slot * group_count(v) / out_degree);
  }

  std::size_t vertex_words() const { return n_out_.words(); }
  std::size_t label_words() const { return horizontal_lab_.words(); }

  // Sizes and group layout agree with `graph`.
  bool compatible_with(const Graph& graph) const;

  // Bytes held by the index arrays.
  std::size_t byte_size() const;
  double build_seconds() const { return build_seconds_; }

  friend TdrIndex build_index(const Graph& graph, const IndexParams& params);
  friend void serialize(const TdrIndex& index, std::ostream& out);
  friend TdrIndex deserialize(std::istream& in);
  // Build time is not part of the identity.
  friend bool operator==(const TdrIndex& a, const TdrIndex& b);

 private:
  void refresh_derived();

  IndexParams params_;
  LabelEncoding labels_;
  std::size_t label_count_ = 0;
  std::size_t edge_count_ = 0;
  std::vector<Interval> interval_;
  std::vector<std::uint32_t> rank_;
  std::vector<std::uint32_t> scc_of_;
  std::vector<VertexHash> hashes_;  // derived from rank_, not stored
  std::vector<std::uint64_t> scc_finish_;  // derived, not stored
  MaskTable n_in_;
  MaskTable n_out_;
  GroupLayout layout_;
  MaskTable horizontal_vtx_;
  MaskTable horizontal_lab_;
  MaskTable vertical_lab_;
  MaskTable vertical_vtx_;
  double build_seconds_ = 0.0;
};

// SCCs, DFS intervals, finish-rank hashing, N_in, horizontal and vertical
// masks. Throws InvalidParam for bad params.
TdrIndex build_index(const Graph& graph, const IndexParams& params = {});

// Binary format, little-endian: "TDR1", u16 version, params, sizes, arrays.
void serialize(const TdrIndex& index, std::ostream& out);
TdrIndex deserialize(std::istream& in);
void save_index(const TdrIndex& index, const std::string& path);
TdrIndex load_index(const std::string& path);

}  // namespace tdr
