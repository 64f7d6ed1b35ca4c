#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "tdr/errors.hpp"
#include "tdr/index.hpp"

namespace tdr {

namespace {

constexpr std::array<char, 4> kMagic{'T', 'D', 'R', '1'};
constexpr std::uint16_t kVersion = 1;
// Upper bound on any single array, guards allocations on corrupt input.
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 36;

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  template <typename T>
  void put(T value) {
    static_assert(std::is_integral_v<T>);
    using U = std::make_unsigned_t<T>;
    auto u = static_cast<U>(value);
    char buf[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<char>((u >> (8 * i)) & 0xFF);
    out_.write(buf, sizeof(T));
  }

  template <typename T>
  void put_array(const std::vector<T>& values) {
    put<std::uint64_t>(values.size());
    for (const T& v : values) put(v);
  }

  void put_table(const MaskTable& t) {
    put<std::uint64_t>(t.words());
    put_array(t.data());
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  template <typename T>
  T get() {
    static_assert(std::is_integral_v<T>);
    unsigned char buf[sizeof(T)];
    if (!in_.read(reinterpret_cast<char*>(buf), sizeof(T))) throw FormatError("truncated index file");
    std::make_unsigned_t<T> u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      u |= static_cast<std::make_unsigned_t<T>>(buf[i]) << (8 * i);
    return static_cast<T>(u);
  }

  template <typename T>
  std::vector<T> get_array() {
    auto count = get<std::uint64_t>();
    if (count > kMaxElements) throw FormatError("array length out of range");
    std::vector<T> out;
    // Grow as data arrives so a bogus length cannot force a huge allocation.
    out.reserve(std::min<std::uint64_t>(count, 1 << 20));
    for (std::uint64_t i = 0; i < count; ++i) out.push_back(get<T>());
    return out;
  }

  MaskTable get_table(std::size_t expected_words, std::size_t expected_rows) {
    auto words = get<std::uint64_t>();
    if (words != expected_words) throw FormatError("mask width mismatch");
    auto data = get_array<std::uint64_t>();
    if (data.size() != expected_words * expected_rows) throw FormatError("mask table size mismatch");
    MaskTable t(expected_rows, expected_words);
    t.data() = std::move(data);
    return t;
  }

 private:
  std::istream& in_;
};

}  // namespace

void serialize(const TdrIndex& index, std::ostream& out) {
  Writer w(out);
  out.write(kMagic.data(), kMagic.size());
  w.put(kVersion);

  const IndexParams& p = index.params_;
  w.put(p.group_size);
  w.put(p.max_groups);
  w.put(p.vertex_bits);
  w.put(static_cast<std::uint8_t>(p.label_mode));
  w.put(p.exact_label_threshold);
  w.put(p.label_bloom_bits);
  w.put(p.depth);
  w.put(p.locality_shift);
  w.put(static_cast<std::uint8_t>(p.locality_hash));
  w.put(static_cast<std::uint8_t>(p.mixing_hash));
  w.put(p.hash_seeds[0]);
  w.put(p.hash_seeds[1]);

  w.put(static_cast<std::uint8_t>(index.labels_.mode));
  w.put(index.labels_.width);
  w.put(index.labels_.seed);

  w.put<std::uint64_t>(index.vertex_count());
  w.put<std::uint64_t>(index.label_count_);
  w.put<std::uint64_t>(index.edge_count_);

  w.put_array(index.rank_);
  std::vector<std::uint32_t> flat;
  flat.reserve(index.interval_.size() * 2);
  for (const Interval& iv : index.interval_) {
    flat.push_back(iv.push);
    flat.push_back(iv.pop);
  }
  w.put_array(flat);
  w.put_array(index.scc_of_);
  w.put_table(index.n_in_);
  w.put_table(index.n_out_);
  w.put_array(index.layout_.offsets);
  w.put_table(index.horizontal_vtx_);
  w.put_table(index.horizontal_lab_);
  w.put_table(index.vertical_lab_);
  w.put_table(index.vertical_vtx_);
  if (!out) throw Error("failed writing index");
}

TdrIndex deserialize(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic)
    throw FormatError("bad magic, not a TDR index file");
  Reader r(in);
  auto version = r.get<std::uint16_t>();
  if (version != kVersion) throw FormatError("unsupported index version " + std::to_string(version));

  TdrIndex index;
  IndexParams& p = index.params_;
  p.group_size = r.get<std::uint32_t>();
  p.max_groups = r.get<std::uint32_t>();
  p.vertex_bits = r.get<std::uint32_t>();
  auto mode = r.get<std::uint8_t>();
  if (mode > 2) throw FormatError("bad label mode");
  p.label_mode = static_cast<LabelMode>(mode);
  p.exact_label_threshold = r.get<std::uint32_t>();
  p.label_bloom_bits = r.get<std::uint32_t>();
  p.depth = r.get<std::uint32_t>();
  p.locality_shift = r.get<std::uint32_t>();
  p.locality_hash = r.get<std::uint8_t>() != 0;
  p.mixing_hash = r.get<std::uint8_t>() != 0;
  p.hash_seeds[0] = r.get<std::uint64_t>();
  p.hash_seeds[1] = r.get<std::uint64_t>();
  try {
    p.validate();
  } catch (const InvalidParam& e) {
    throw FormatError(std::string("bad params: ") + e.what());
  }

  auto enc_mode = r.get<std::uint8_t>();
  if (enc_mode != 1 && enc_mode != 2) throw FormatError("bad resolved label mode");
  index.labels_.mode = static_cast<LabelMode>(enc_mode);
  index.labels_.width = r.get<std::uint32_t>();
  index.labels_.seed = r.get<std::uint64_t>();

  auto n = r.get<std::uint64_t>();
  index.label_count_ = r.get<std::uint64_t>();
  index.edge_count_ = r.get<std::uint64_t>();
  if (n > kMaxElements) throw FormatError("vertex count out of range");

  index.rank_ = r.get_array<std::uint32_t>();
  auto flat = r.get_array<std::uint32_t>();
  index.scc_of_ = r.get_array<std::uint32_t>();
  if (index.rank_.size() != n || flat.size() != 2 * n || index.scc_of_.size() != n)
    throw FormatError("per-vertex array size mismatch");
  index.interval_.resize(n);
  for (std::size_t v = 0; v < n; ++v) index.interval_[v] = {flat[2 * v], flat[2 * v + 1]};
  for (std::uint32_t rank : index.rank_)
    if (rank >= n) throw FormatError("rank out of range");

  const std::size_t vw = (p.vertex_bits + 63) / 64;
  const std::size_t lw = index.labels_.words();
  index.n_in_ = r.get_table(vw, n);
  index.n_out_ = r.get_table(vw, n);
  index.layout_.offsets = r.get_array<std::uint32_t>();
  if (index.layout_.offsets.size() != n + 1 || index.layout_.offsets.front() != 0 ||
      !std::is_sorted(index.layout_.offsets.begin(), index.layout_.offsets.end()))
    throw FormatError("bad group layout");
  const std::size_t groups = index.layout_.total();
  index.horizontal_vtx_ = r.get_table(vw, groups);
  index.horizontal_lab_ = r.get_table(lw, groups);
  index.vertical_lab_ = r.get_table(lw, groups * p.depth);
  index.vertical_vtx_ = r.get_table(vw, groups * p.depth);
  index.refresh_derived();
  return index;
}

void save_index(const TdrIndex& index, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  serialize(index, out);
}

TdrIndex load_index(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return deserialize(in);
}

}  // namespace tdr
