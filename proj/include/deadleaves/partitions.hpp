#ifndef DEADLEAVES_PARTITIONS_HPP
#define DEADLEAVES_PARTITIONS_HPP

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "deadleaves/geometry.hpp"

namespace deadleaves {

// Family of disjoint non-empty pixel subsets covering a parent set. Blocks are
// bitmasks over the parent's enumeration order. Canonical (unordered) form
// sorts blocks by lowest member index, which matches restricted-growth
// labeling; ordered form lists blocks by depth, topmost first.
struct Partition {
  std::vector<SubsetMask> blocks;

  SubsetMask union_mask() const {
    SubsetMask u = 0;
    for (SubsetMask b : blocks) u |= b;
    return u;
  }
  bool operator==(const Partition& o) const { return blocks == o.blocks; }
};

inline void validate_partition(const Partition& m, SubsetMask parent) {
  SubsetMask seen = 0;
  for (SubsetMask b : m.blocks) {
    if (b == 0) throw std::invalid_argument("partition: empty block");
    if (b & seen) throw std::invalid_argument("partition: overlapping blocks");
    seen |= b;
  }
  if (seen != parent) throw std::invalid_argument("partition: blocks do not cover the parent set");
}

inline Partition canonicalize(const Partition& m) {
  Partition out = m;
  std::sort(out.blocks.begin(), out.blocks.end(), [](SubsetMask p, SubsetMask q) {
    return (p & -p) < (q & -q);  // by lowest set bit
  });
  return out;
}

// label of each pixel = 1-based index of its block
inline std::vector<int> membership_labels(const Partition& m, int n) {
  std::vector<int> lab(static_cast<std::size_t>(n), 0);
  for (std::size_t bi = 0; bi < m.blocks.size(); ++bi)
    for (int k = 0; k < n; ++k)
      if (m.blocks[bi] >> k & 1u) lab[static_cast<std::size_t>(k)] = static_cast<int>(bi) + 1;
  for (int v : lab)
    if (v == 0) throw std::invalid_argument("membership_labels: pixel not covered");
  return lab;
}

// blocks intersected with keep, empties dropped
inline Partition restrict_partition(const Partition& m, SubsetMask keep) {
  Partition out;
  for (SubsetMask b : m.blocks)
    if (SubsetMask r = b & keep) out.blocks.push_back(r);
  return out;
}

// Bell numbers via the Bell-triangle recurrence; exact in u64 up to n = 25.
inline std::uint64_t bell_number(int n) {
  if (n < 0 || n > 25) throw std::invalid_argument("bell_number: n out of exact u64 range (0..25)");
  std::vector<std::uint64_t> row{1};
  for (int i = 0; i < n; ++i) {
    std::vector<std::uint64_t> next(row.size() + 1);
    next[0] = row.back();
    for (std::size_t k = 0; k < row.size(); ++k) next[k + 1] = next[k] + row[k];
    row = std::move(next);
  }
  return row[0];
}

// Streams every unordered partition of {0..n-1} exactly once, as
// restricted-growth strings in lexicographic order; O(n) state.
class PartitionEnumerator {
 public:
  explicit PartitionEnumerator(int n, int cap = kDefaultCap) : n_(n) {
    if (n < 1) throw std::invalid_argument("PartitionEnumerator: need n >= 1");
    if (n > cap) {
      std::string msg = "PartitionEnumerator: |a| = " + std::to_string(n) + " exceeds cap " +
                        std::to_string(cap);
      if (n <= 25) msg += " (would enumerate " + std::to_string(bell_number(n)) + " partitions)";
      throw std::length_error(msg);
    }
    rgs_.assign(static_cast<std::size_t>(n), 0);
  }

  // Constrain the stream to RGS strings with the given prefix; used to split
  // work into disjoint sub-streams for parallel consumers.
  PartitionEnumerator(int n, const std::vector<int>& prefix, int cap = kDefaultCap)
      : PartitionEnumerator(n, cap) {
    if (static_cast<int>(prefix.size()) > n)
      throw std::invalid_argument("PartitionEnumerator: prefix longer than n");
    prefix_len_ = static_cast<int>(prefix.size());
    std::copy(prefix.begin(), prefix.end(), rgs_.begin());
  }

  static constexpr int kDefaultCap = 12;

  // false once the stream is exhausted
  bool next(Partition& out) {
    if (done_) return false;
    if (first_) {
      first_ = false;
    } else if (!advance()) {
      done_ = true;
      return false;
    }
    emit(out);
    return true;
  }

  const std::vector<int>& rgs() const { return rgs_; }

  // all valid RGS prefixes of the given length, in lexicographic order
  static std::vector<std::vector<int>> prefixes(int n, int len) {
    len = std::min(len, n);
    if (len <= 0) return {{}};
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<std::size_t>(len), 0);
    while (true) {
      out.push_back(cur);
      int i = len - 1;
      for (; i > 0; --i) {
        int mx = 0;
        for (int k = 0; k < i; ++k) mx = std::max(mx, cur[static_cast<std::size_t>(k)]);
        if (cur[static_cast<std::size_t>(i)] <= mx) {
          ++cur[static_cast<std::size_t>(i)];
          std::fill(cur.begin() + i + 1, cur.end(), 0);
          break;
        }
      }
      if (i == 0) break;
    }
    return out;
  }

 private:
  bool advance() {
    for (int i = n_ - 1; i >= std::max(prefix_len_, 1); --i) {
      int mx = 0;
      for (int k = 0; k < i; ++k) mx = std::max(mx, rgs_[static_cast<std::size_t>(k)]);
      if (rgs_[static_cast<std::size_t>(i)] <= mx) {
        ++rgs_[static_cast<std::size_t>(i)];
        std::fill(rgs_.begin() + i + 1, rgs_.end(), 0);
        return true;
      }
    }
    return false;
  }

  void emit(Partition& out) const {
    out.blocks.clear();
    for (int k = 0; k < n_; ++k) {
      const std::size_t lab = static_cast<std::size_t>(rgs_[static_cast<std::size_t>(k)]);
      if (lab >= out.blocks.size()) out.blocks.resize(lab + 1, 0);
      out.blocks[lab] |= SubsetMask{1} << k;
    }
  }

  int n_;
  int prefix_len_ = 0;
  std::vector<int> rgs_;
  bool first_ = true;
  bool done_ = false;
};

}  // namespace deadleaves

#endif  // DEADLEAVES_PARTITIONS_HPP
