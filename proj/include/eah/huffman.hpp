#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include "eah/bits.hpp"
#include "eah/error.hpp"

namespace eah {

// Optimal code lengths for a frequency tuple (h >= 2, every F_i >= 1).
//
// Nodes are ordered by (weight, creation order): leaves are created first in
// index order, merged nodes after them.  Sorting the leaves once and keeping
// merged nodes in a FIFO realises that order with two queues, since merged
// weights come out non-decreasing.
inline std::vector<unsigned>
huffman_lengths(std::span<const std::uint64_t> freqs) {
  const std::size_t h = freqs.size();
  detail::require(h >= 2, "huffman needs at least two frequencies");
  for (auto f : freqs) {
    detail::require(f >= 1, "huffman frequencies must be positive");
  }

  std::vector<std::uint32_t> leaves(h);
  std::iota(leaves.begin(), leaves.end(), 0U);
  std::stable_sort(leaves.begin(), leaves.end(),
                   [&](std::uint32_t a, std::uint32_t b) {
                     return freqs[a] < freqs[b];
                   });

  // Node ids: [0, h) leaves by index, [h, 2h-1) merged nodes.
  std::vector<std::uint64_t> weight(2 * h - 1);
  std::vector<std::uint32_t> parent(2 * h - 1, 0);
  std::copy(freqs.begin(), freqs.end(), weight.begin());

  std::size_t next_leaf = 0;
  std::size_t next_merged = h;
  std::size_t created = h;
  auto pop_min = [&]() -> std::uint32_t {
    const bool have_leaf = next_leaf < h;
    const bool have_merged = next_merged < created;
    if (have_leaf &&
        (!have_merged || weight[leaves[next_leaf]] <= weight[next_merged])) {
      return leaves[next_leaf++];
    }
    return static_cast<std::uint32_t>(next_merged++);
  };

  for (std::size_t step = 0; step + 1 < h; ++step) {
    const std::uint32_t a = pop_min();
    const std::uint32_t b = pop_min();
    weight[created] = weight[a] + weight[b];
    parent[a] = static_cast<std::uint32_t>(created);
    parent[b] = static_cast<std::uint32_t>(created);
    ++created;
  }

  // Parents always have larger ids, so one descending sweep fills depths.
  const std::size_t root = created - 1;
  std::vector<unsigned> depth(created, 0);
  for (std::size_t node = root; node-- > 0;) {
    depth[node] = depth[parent[node]] + 1;
  }
  std::vector<unsigned> lengths(depth.begin(),
                                depth.begin() + static_cast<std::ptrdiff_t>(h));
  for (auto len : lengths) {
    if (len > Codeword::kMaxLength) {
      throw contract_error("huffman code longer than 64 bits");
    }
  }
  return lengths;
}

/// Canonical bit assignment: indices ordered by (length, index) receive
/// consecutive codes, left-shifted whenever the length grows.
inline std::vector<Codeword>
canonical_codewords(std::span<const unsigned> lengths) {
  std::vector<std::uint32_t> order(lengths.size());
  std::iota(order.begin(), order.end(), 0U);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) {
                     return lengths[a] < lengths[b];
                   });

  std::vector<Codeword> words(lengths.size());
  std::uint64_t code = 0;
  unsigned previous = 0;
  bool first = true;
  for (auto index : order) {
    const unsigned len = lengths[index];
    detail::require(len >= 1 && len <= Codeword::kMaxLength,
                    "canonical code length out of range");
    if (!first) {
      ++code;
    }
    code <<= (len - previous);
    previous = len;
    first = false;
    words[index] = Codeword(code, len);
  }
  return words;
}

/// Huffman code over `freqs`; words[i] belongs to freqs[i].  Deterministic.
inline std::vector<Codeword> build_huffman(std::span<const std::uint64_t> freqs) {
  const auto lengths = huffman_lengths(freqs);
  return canonical_codewords(lengths);
}

inline double kraft_sum(std::span<const unsigned> lengths) {
  double sum = 0.0;
  for (auto len : lengths) {
    sum += std::ldexp(1.0, -static_cast<int>(len));
  }
  return sum;
}

/// Empirical entropy (1/t) * sum F_i log2(t / F_i), in bits per symbol.
inline double entropy_h(std::span<const std::uint64_t> freqs, std::uint64_t t) {
  std::uint64_t total = 0;
  for (auto f : freqs) {
    detail::require(f >= 1, "entropy frequencies must be positive");
    total += f;
  }
  detail::require(total == t && t > 0, "t must equal the frequency sum");
  const double td = static_cast<double>(t);
  double sum = 0.0;
  for (auto f : freqs) {
    const double fd = static_cast<double>(f);
    sum += fd * (std::log(td / fd) / std::numbers::ln2);
  }
  return sum / td;
}

/// Realised rate (1/t) * sum F_i L_i.
inline double rate_h(std::span<const std::uint64_t> freqs,
                     std::span<const unsigned> lengths, std::uint64_t t) {
  detail::require(freqs.size() == lengths.size(),
                  "lengths must align with frequencies");
  const std::uint64_t total =
      std::accumulate(freqs.begin(), freqs.end(), std::uint64_t{0});
  detail::require(total == t && t > 0, "t must equal the frequency sum");
  double cost = 0.0;
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    cost += static_cast<double>(freqs[i]) * lengths[i];
  }
  return cost / static_cast<double>(t);
}

} // namespace eah
