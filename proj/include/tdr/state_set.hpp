#pragma once

#include <cstddef>
#include <cstdint>
#include <unordered_set>
#include <vector>

namespace tdr {

// Visited set over (vertex, progress) product states. Dense epoch-stamped
// storage when |V| * 2^bits is small enough, a hash set otherwise. reset()
// is O(1) in the dense case, so one instance serves many queries.
class StateSet {
 public:
  static constexpr std::size_t kDenseLimit = std::size_t{1} << 26;

  void reset(std::size_t vertex_count, unsigned progress_bits) {
    bits_ = progress_bits;
    const std::size_t slots =
        progress_bits >= 40 ? kDenseLimit + 1 : vertex_count << progress_bits;
    dense_ = slots <= kDenseLimit;
    if (dense_) {
      if (stamp_.size() < slots) stamp_.resize(slots, 0);
      if (++epoch_ == 0) {
        std::fill(stamp_.begin(), stamp_.end(), 0);
        epoch_ = 1;
      }
    } else {
      sparse_.clear();
    }
  }

  // True when the state was not present before.
  bool insert(std::uint32_t vertex, std::uint32_t progress) {
    if (dense_) {
      std::uint32_t& s = stamp_[(std::size_t{vertex} << bits_) | progress];
      if (s == epoch_) return false;
      s = epoch_;
      return true;
    }
    return sparse_.insert((std::uint64_t{vertex} << 32) | progress).second;
  }

 private:
  unsigned bits_ = 0;
  bool dense_ = true;
  std::uint32_t epoch_ = 0;
  std::vector<std::uint32_t> stamp_;
  std::unordered_set<std::uint64_t> sparse_;
};

}  // namespace tdr
