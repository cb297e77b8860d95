#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "eah/bits.hpp"
#include "eah/eahn_codec.hpp"
#include "eah/error.hpp"
#include "eah/huffman.hpp"

namespace eah {

inline constexpr unsigned kLiteralBits = 8;

/// Running per-context counts for the streaming variant.  The code for a
/// context is Huffman over the counts seen so far (followers in first-seen
/// order) plus an escape pseudo-symbol of weight 1, placed last.  Unseen
/// symbols go out as escape + 8-bit literal; a context with no history
/// sends the bare literal.  Encoder and decoder make identical transitions.
class OnlineState {
public:
  explicit OnlineState(unsigned order) : order_(order), mask_(context_mask(order)) {
    check_order(order);
  }

  void encode(Symbol symbol, BitString &out) {
    if (processed_ < order_) {
      out.append(symbol, kLiteralBits);
      advance(symbol);
      return;
    }
    auto &followers = table_[context_];
    if (followers.empty()) {
      out.append(symbol, kLiteralBits);
      followers.push_back({symbol, 1});
      advance(symbol);
      return;
    }
    const auto words = build_huffman(weights(followers));
    const auto it = std::find_if(followers.begin(), followers.end(),
                                 [&](const FollowerCount &f) { return f.symbol == symbol; });
    if (it != followers.end()) {
      out.append(words[static_cast<std::size_t>(it - followers.begin())]);
      ++it->count;
    } else {
      out.append(words.back());
      out.append(symbol, kLiteralBits);
      followers.push_back({symbol, 1});
    }
    advance(symbol);
  }

  Symbol decode(BitReader &in) {
    if (processed_ < order_) {
      const auto symbol = static_cast<Symbol>(in.read(kLiteralBits));
      advance(symbol);
      return symbol;
    }
    auto &followers = table_[context_];
    if (followers.empty()) {
      const auto symbol = static_cast<Symbol>(in.read(kLiteralBits));
      followers.push_back({symbol, 1});
      advance(symbol);
      return symbol;
    }
    const auto words = build_huffman(weights(followers));
    const std::size_t index = match(words, in);
    Symbol symbol;
    if (index + 1 < words.size()) {
      symbol = followers[index].symbol;
      ++followers[index].count;
    } else {
      symbol = static_cast<Symbol>(in.read(kLiteralBits));
      detail::require_stream(
          std::none_of(followers.begin(), followers.end(),
                       [&](const FollowerCount &f) { return f.symbol == symbol; }),
          "escaped literal is already a known follower");
      followers.push_back({symbol, 1});
    }
    advance(symbol);
    return symbol;
  }

  /// Code the next symbol would use (followers then escape); empty while in
  /// the literal prefix or when the current context has no history.
  std::vector<Codeword> current_code() const {
    if (processed_ < order_) {
      return {};
    }
    const auto it = table_.find(context_);
    if (it == table_.end() || it->second.empty()) {
      return {};
    }
    return build_huffman(weights(it->second));
  }

  /// Context-sorted copy of the counts, for comparing two states.
  std::vector<std::pair<std::uint64_t, std::vector<FollowerCount>>> snapshot() const {
    std::vector<std::pair<std::uint64_t, std::vector<FollowerCount>>> out;
    for (const auto &[ctx, followers] : table_) {
      if (!followers.empty()) {
        out.emplace_back(ctx, followers);
      }
    }
    std::sort(out.begin(), out.end(),
              [](const auto &a, const auto &b) { return a.first < b.first; });
    return out;
  }

  std::uint64_t processed() const noexcept { return processed_; }

private:
  static std::vector<std::uint64_t> weights(const std::vector<FollowerCount> &followers) {
    std::vector<std::uint64_t> w;
    w.reserve(followers.size() + 1);
    for (const auto &f : followers) {
      w.push_back(f.count);
    }
    w.push_back(1); // escape
    return w;
  }

  // Reads bits until they spell one of `words`.
  static std::size_t match(const std::vector<Codeword> &words, BitReader &in) {
    unsigned max_len = 0;
    for (const auto &w : words) {
      max_len = std::max(max_len, w.size());
    }
    std::uint64_t bits = 0;
    for (unsigned len = 1; len <= max_len; ++len) {
      bits = (bits << 1) | static_cast<std::uint64_t>(in.read_bit());
      const Codeword candidate(bits, len);
      for (std::size_t i = 0; i < words.size(); ++i) {
        if (words[i] == candidate) {
          return i;
        }
      }
    }
    throw corrupt_stream("bits do not match any codeword of the context");
  }

  void advance(Symbol symbol) {
    context_ = ((context_ << 8) | symbol) & mask_;
    ++processed_;
  }

  unsigned order_;
  std::uint64_t mask_;
  std::uint64_t context_ = 0;
  std::uint64_t processed_ = 0;
  std::unordered_map<std::uint64_t, std::vector<FollowerCount>> table_;
};

inline BitString online_encode(std::span<const Symbol> x, unsigned order) {
  OnlineState state(order);
  BitString out;
  for (auto s : x) {
    state.encode(s, out);
  }
  return out;
}

/// Decodes exactly `count` symbols; leftover bits are a corrupt stream.
inline std::vector<Symbol> online_decode(const BitString &bits, unsigned order,
                                         std::uint64_t count) {
  OnlineState state(order);
  BitReader in(bits);
  std::vector<Symbol> x;
  // Every symbol costs at least one bit, so a sane count never exceeds this.
  detail::require_stream(count <= bits.size(), "symbol count exceeds payload");
  x.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    x.push_back(state.decode(in));
  }
  detail::require_stream(in.remaining() == 0, "payload bits left after decoding");
  return x;
}

} // namespace eah
