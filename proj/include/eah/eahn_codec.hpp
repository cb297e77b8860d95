#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "eah/adaptive_code.hpp"
#include "eah/bits.hpp"
#include "eah/error.hpp"
#include "eah/huffman.hpp"

namespace eah {

/// Largest supported order.  A context plus the symbol that follows it must
/// fit in one 64-bit key.
inline constexpr unsigned kMaxOrder = 7;

// Contexts are packed big-endian into an integer, so numeric order on
// equal-length keys is ascending lexicographic symbol order.
inline std::uint64_t pack_context(std::span<const Symbol> symbols) {
  std::uint64_t key = 0;
  for (auto s : symbols) {
    key = (key << 8) | s;
  }
  return key;
}

inline ContextKey unpack_context(std::uint64_t key, unsigned order) {
  ContextKey out(order);
  for (unsigned i = order; i-- > 0;) {
    out[i] = static_cast<Symbol>(key & 0xFF);
    key >>= 8;
  }
  return out;
}

inline std::uint64_t context_mask(unsigned order) {
  return (std::uint64_t{1} << (8 * order)) - 1;
}

inline void check_order(unsigned order) {
  detail::require(order >= 1 && order <= kMaxOrder, "order must be in 1..7");
}

namespace detail {

// Open-addressing map from 64-bit keys to dense 32-bit slots (0, 1, 2, ...
// in insertion order).  Linear probing over a power-of-two table.
class KeyIndex {
public:
  static constexpr std::uint32_t kMissing = ~std::uint32_t{0};

  explicit KeyIndex(std::size_t expected = 16) { rehash(expected * 2 + 16); }

  /// Slot of `key`, inserting it if absent.
  std::uint32_t insert(std::uint64_t key) {
    if ((size_ + 1) * 2 > keys_.size()) {
      rehash(keys_.size() * 2);
    }
    std::size_t at = probe(key);
    if (slots_[at] == kMissing) {
      keys_[at] = key;
      slots_[at] = size_++;
    }
    return slots_[at];
  }

  std::uint32_t find(std::uint64_t key) const { return slots_[probe(key)]; }

  std::uint32_t size() const noexcept { return size_; }

private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::size_t probe(std::uint64_t key) const {
    const std::size_t mask = keys_.size() - 1;
    std::size_t at = mix(key) & mask;
    while (slots_[at] != kMissing && keys_[at] != key) {
      at = (at + 1) & mask;
    }
    return at;
  }

  void rehash(std::size_t want) {
    std::size_t cap = 16;
    while (cap < want) {
      cap *= 2;
    }
    auto old_keys = std::move(keys_);
    auto old_slots = std::move(slots_);
    keys_.assign(cap, 0);
    slots_.assign(cap, kMissing);
    for (std::size_t i = 0; i < old_slots.size(); ++i) {
      if (old_slots[i] != kMissing) {
        const std::size_t at = probe(old_keys[i]);
        keys_[at] = old_keys[i];
        slots_[at] = old_slots[i];
      }
    }
  }

  std::vector<std::uint64_t> keys_;
  std::vector<std::uint32_t> slots_;
  std::uint32_t size_ = 0;
};

} // namespace detail

struct FollowerCount {
  Symbol symbol;
  std::uint64_t count;

  bool operator==(const FollowerCount &) const = default;
};

struct ContextStats {
  std::uint64_t context = 0;
  std::vector<FollowerCount> followers; // ascending symbol, counts >= 1

  std::uint64_t positions() const {
    std::uint64_t n = 0;
    for (const auto &f : followers) {
      n += f.count;
    }
    return n;
  }
};

/// Follower occurrence (b) and frequency (c) functions over the contexts
/// that actually occur, in ascending context order (the index d).
class ContextModel {
public:
  ContextModel() = default;
  ContextModel(unsigned order, std::uint64_t length,
               std::vector<ContextStats> contexts)
      : order_(order), length_(length), contexts_(std::move(contexts)) {}

  unsigned order() const noexcept { return order_; }
  std::uint64_t length() const noexcept { return length_; }
  std::span<const ContextStats> contexts() const noexcept { return contexts_; }

  const ContextStats *find(std::uint64_t context) const {
    const auto it = std::lower_bound(
        contexts_.begin(), contexts_.end(), context,
        [](const ContextStats &s, std::uint64_t key) { return s.context < key; });
    return it != contexts_.end() && it->context == context ? &*it : nullptr;
  }

  std::uint64_t count(Symbol symbol, std::uint64_t context) const {
    if (const auto *stats = find(context)) {
      for (const auto &f : stats->followers) {
        if (f.symbol == symbol) {
          return f.count;
        }
      }
    }
    return 0;
  }

  bool occurs(Symbol symbol, std::uint64_t context) const {
    return count(symbol, context) != 0;
  }

  std::uint64_t total() const {
    std::uint64_t sum = 0;
    for (const auto &s : contexts_) {
      sum += s.positions();
    }
    return sum;
  }

private:
  unsigned order_ = 1;
  std::uint64_t length_ = 0;
  std::vector<ContextStats> contexts_;
};

/// Counts c(x_i, x_{i-n}..x_{i-1}) for i = n+1..t.
inline ContextModel scan_frequencies(std::span<const Symbol> x, unsigned order) {
  check_order(order);
  detail::require(x.size() >= order, "input shorter than the order");
  std::vector<ContextStats> contexts;

  if (order == 1) {
    std::vector<std::uint64_t> counts(256 * 256, 0);
    for (std::size_t i = 1; i < x.size(); ++i) {
      ++counts[(std::size_t{x[i - 1]} << 8) | x[i]];
    }
    for (unsigned ctx = 0; ctx < 256; ++ctx) {
      ContextStats stats{ctx, {}};
      for (unsigned s = 0; s < 256; ++s) {
        if (const auto c = counts[(ctx << 8) | s]) {
          stats.followers.push_back({static_cast<Symbol>(s), c});
        }
      }
      if (!stats.followers.empty()) {
        contexts.push_back(std::move(stats));
      }
    }
    return {order, x.size(), std::move(contexts)};
  }

  // Key = context << 8 | follower.
  detail::KeyIndex index(std::min<std::size_t>(x.size(), std::size_t{1} << 16));
  std::vector<std::pair<std::uint64_t, std::uint64_t>> sorted;
  const std::uint64_t mask = context_mask(order);
  std::uint64_t ctx = pack_context(x.first(order));
  for (std::size_t i = order; i < x.size(); ++i) {
    const std::uint64_t key = (ctx << 8) | x[i];
    const auto slot = index.insert(key);
    if (slot == sorted.size()) {
      sorted.emplace_back(key, 0);
    }
    ++sorted[slot].second;
    ctx = ((ctx << 8) | x[i]) & mask;
  }
  std::sort(sorted.begin(), sorted.end());
  for (const auto &[key, count] : sorted) {
    const std::uint64_t context = key >> 8;
    if (contexts.empty() || contexts.back().context != context) {
      contexts.push_back({context, {}});
    }
    contexts.back().followers.push_back({static_cast<Symbol>(key & 0xFF), count});
  }
  return {order, x.size(), std::move(contexts)};
}

/// Codewords for one context, aligned with its ascending followers.  A
/// single follower gets the empty word.
struct ContextCode {
  std::uint64_t context = 0;
  std::vector<Symbol> followers;
  std::vector<Codeword> words;

  bool multi() const noexcept { return followers.size() >= 2; }
};

/// Huffman over one context's follower frequencies.
inline ContextCode build_context_code(const ContextStats &stats) {
  ContextCode code;
  code.context = stats.context;
  code.followers.reserve(stats.followers.size());
  for (const auto &f : stats.followers) {
    code.followers.push_back(f.symbol);
  }
  if (stats.followers.size() >= 2) {
    std::vector<std::uint64_t> freqs;
    freqs.reserve(stats.followers.size());
    for (const auto &f : stats.followers) {
      freqs.push_back(f.count);
    }
    code.words = build_huffman(freqs);
  } else {
    code.words.assign(stats.followers.size(), Codeword{});
  }
  return code;
}

/// The function a: per-context codewords; entries not stored are empty.
struct Codebook {
  unsigned order = 1;
  std::vector<ContextCode> contexts; // ascending context

  /// Partial table holding only the nonempty words.
  AdaptiveCodeTable to_table() const {
    AdaptiveCodeTable table(Alphabet::first(256), order);
    for (const auto &code : contexts) {
      const auto key = unpack_context(code.context, order);
      for (std::size_t i = 0; i < code.followers.size(); ++i) {
        if (!code.words[i].empty()) {
          table.set(code.followers[i], key, code.words[i]);
        }
      }
    }
    return table;
  }

  const Codeword *find(Symbol symbol, std::uint64_t context) const {
    const auto it = std::lower_bound(
        contexts.begin(), contexts.end(), context,
        [](const ContextCode &c, std::uint64_t key) { return c.context < key; });
    if (it == contexts.end() || it->context != context) {
      return nullptr;
    }
    for (std::size_t i = 0; i < it->followers.size(); ++i) {
      if (it->followers[i] == symbol) {
        return &it->words[i];
      }
    }
    return nullptr;
  }
};

inline Codebook build_codebook(const ContextModel &model) {
  Codebook book;
  book.order = model.order();
  book.contexts.reserve(model.contexts().size());
  for (const auto &stats : model.contexts()) {
    book.contexts.push_back(build_context_code(stats));
  }
  return book;
}

/// Sparse b: the followers of each occurring context.
struct ContextFollowers {
  std::uint64_t context = 0;
  std::vector<Symbol> followers; // ascending

  bool operator==(const ContextFollowers &) const = default;
};

/// Encoder output (x_1..x_n, b, Y, Z) plus the original length t.
struct EahnOutput {
  unsigned order = 1;
  std::vector<Symbol> prefix;
  std::vector<ContextFollowers> occurrence;
  std::vector<Codeword> codewords; // Y
  BitString payload;               // Z
  std::uint64_t length = 0;        // t

  bool occurs(Symbol symbol, std::uint64_t context) const {
    const auto it = std::lower_bound(
        occurrence.begin(), occurrence.end(), context,
        [](const ContextFollowers &c, std::uint64_t key) { return c.context < key; });
    return it != occurrence.end() && it->context == context &&
           std::binary_search(it->followers.begin(), it->followers.end(), symbol);
  }

  bool operator==(const EahnOutput &) const = default;
};

namespace detail {

// (context, symbol) -> codeword for payload emission.
class CodeLookup {
public:
  explicit CodeLookup(const Codebook &book) : order_(book.order) {
    if (order_ == 1) {
      dense_.resize(256 * 256);
      for (const auto &code : book.contexts) {
        for (std::size_t i = 0; i < code.followers.size(); ++i) {
          dense_[(code.context << 8) | code.followers[i]] = code.words[i];
        }
      }
    } else {
      for (const auto &code : book.contexts) {
        for (std::size_t i = 0; i < code.followers.size(); ++i) {
          index_.insert((code.context << 8) | code.followers[i]);
          dense_.push_back(code.words[i]);
        }
      }
    }
  }

  const Codeword &operator()(std::uint64_t key) const {
    if (order_ == 1) {
      return dense_[key];
    }
    const auto slot = index_.find(key);
    require(slot != KeyIndex::kMissing, "symbol pair missing from the codebook");
    return dense_[slot];
  }

private:
  unsigned order_;
  std::vector<Codeword> dense_;
  KeyIndex index_;
};

inline BitString emit_payload(std::span<const Symbol> x, const Codebook &book) {
  const unsigned order = book.order;
  const CodeLookup lookup(book);
  BitString z;
  z.reserve_bits(x.size() * 4);
  const std::uint64_t mask = context_mask(order);
  std::uint64_t ctx = pack_context(x.first(order));
  for (std::size_t i = order; i < x.size(); ++i) {
    z.append(lookup((ctx << 8) | x[i]));
    ctx = ((ctx << 8) | x[i]) & mask;
  }
  return z;
}

inline std::vector<ContextFollowers> occurrence_of(const Codebook &book) {
  std::vector<ContextFollowers> b;
  b.reserve(book.contexts.size());
  for (const auto &code : book.contexts) {
    b.push_back({code.context, code.followers});
  }
  return b;
}

} // namespace detail

/// Y in (context ascending, follower ascending) order, nonempty words only.
inline std::vector<Codeword> collect_codewords(const Codebook &book) {
  std::vector<Codeword> y;
  for (const auto &code : book.contexts) {
    if (code.multi()) {
      y.insert(y.end(), code.words.begin(), code.words.end());
    }
  }
  return y;
}

inline EahnOutput assemble_output(std::span<const Symbol> x, const Codebook &book,
                                  std::vector<Codeword> y) {
  EahnOutput out;
  out.order = book.order;
  out.prefix.assign(x.begin(), x.begin() + book.order);
  out.occurrence = detail::occurrence_of(book);
  out.codewords = std::move(y);
  out.payload = detail::emit_payload(x, book);
  out.length = x.size();
  return out;
}

inline EahnOutput eahn_encode(std::span<const Symbol> x, unsigned order) {
  const auto model = scan_frequencies(x, order);
  const auto book = build_codebook(model);
  return assemble_output(x, book, collect_codewords(book));
}

/// Re-associates Y with the follower sets of b; the inverse of
/// collect_codewords.  Throws corrupt_stream when the counts disagree.
inline Codebook codebook_from_output(const EahnOutput &out) {
  Codebook book;
  book.order = out.order;
  std::size_t next = 0;
  for (const auto &entry : out.occurrence) {
    ContextCode code{entry.context, entry.followers, {}};
    if (code.multi()) {
      detail::require_stream(next + code.followers.size() <= out.codewords.size(),
                             "codeword tuple shorter than the follower sets");
      code.words.assign(out.codewords.begin() + static_cast<std::ptrdiff_t>(next),
                        out.codewords.begin() +
                            static_cast<std::ptrdiff_t>(next + code.followers.size()));
      next += code.followers.size();
    } else {
      code.words.assign(code.followers.size(), Codeword{});
    }
    book.contexts.push_back(std::move(code));
  }
  detail::require_stream(next == out.codewords.size(),
                         "codeword tuple longer than the follower sets");
  return book;
}

namespace detail {

// Binary trie for one context.  Child >= 0 is a node index, -1 is missing,
// <= -2 is the leaf for symbol -(child + 2).
class ContextDecoder {
public:
  explicit ContextDecoder(const ContextCode &code) {
    if (!code.multi()) {
      single_ = code.followers.empty() ? -1 : code.followers.front();
      return;
    }
    nodes_.push_back({-1, -1});
    for (std::size_t i = 0; i < code.words.size(); ++i) {
      insert(code.words[i], code.followers[i]);
    }
  }

  Symbol decode(BitReader &reader) const {
    if (single_ >= 0) {
      return static_cast<Symbol>(single_);
    }
    std::int32_t node = 0;
    while (true) {
      const std::int32_t next = nodes_[node][reader.read_bit() ? 1 : 0];
      require_stream(next != -1, "codeword not in the context's code");
      if (next <= -2) {
        return static_cast<Symbol>(-(next + 2));
      }
      node = next;
    }
  }

private:
  void insert(const Codeword &word, Symbol symbol) {
    require_stream(!word.empty(), "empty codeword in a multi-follower context");
    std::int32_t node = 0;
    for (unsigned i = 0; i < word.size(); ++i) {
      auto &slot = nodes_[node][word[i] ? 1 : 0];
      const bool last = i + 1 == word.size();
      if (last) {
        require_stream(slot == -1, "context code is not prefix-free");
        slot = -2 - static_cast<std::int32_t>(symbol);
      } else {
        require_stream(slot >= -1, "context code is not prefix-free");
        if (slot == -1) {
          slot = static_cast<std::int32_t>(nodes_.size());
          nodes_.push_back({-1, -1});
        }
        node = nodes_[node][word[i] ? 1 : 0];
      }
    }
  }

  std::int32_t single_ = -1;
  std::vector<std::array<std::int32_t, 2>> nodes_;
};

inline void validate_output_shape(const EahnOutput &out) {
  require_stream(out.order >= 1 && out.order <= kMaxOrder, "order out of range");
  require_stream(out.prefix.size() == out.order, "prefix length differs from order");
  require_stream(out.length >= out.order, "length shorter than the order");
  const std::uint64_t mask = context_mask(out.order);
  for (std::size_t i = 0; i < out.occurrence.size(); ++i) {
    const auto &entry = out.occurrence[i];
    require_stream(entry.context <= mask, "context key out of range");
    require_stream(i == 0 || out.occurrence[i - 1].context < entry.context,
                   "contexts not strictly ascending");
    require_stream(!entry.followers.empty(), "context without followers");
    require_stream(std::adjacent_find(entry.followers.begin(), entry.followers.end(),
                                      std::greater_equal<>()) == entry.followers.end(),
                   "followers not strictly ascending");
  }
}

} // namespace detail

/// Inverse of eahn_encode.  Single-follower contexts consume no bits; the
/// recorded length terminates decoding and every payload bit must be used.
inline std::vector<Symbol> eahn_decode(const EahnOutput &out) {
  detail::validate_output_shape(out);
  const auto book = codebook_from_output(out);
  const unsigned order = out.order;

  std::vector<detail::ContextDecoder> decoders;
  decoders.reserve(book.contexts.size());
  for (const auto &code : book.contexts) {
    decoders.emplace_back(code);
  }
  // Contexts are strictly ascending, so insertion slot i is context i.
  detail::KeyIndex index(book.contexts.size());
  for (const auto &code : book.contexts) {
    index.insert(code.context);
  }

  std::vector<Symbol> x(out.prefix);
  x.reserve(out.length);
  BitReader reader(out.payload);
  const std::uint64_t mask = context_mask(order);
  std::uint64_t ctx = pack_context(out.prefix);
  for (std::uint64_t i = order; i < out.length; ++i) {
    const auto slot = index.find(ctx);
    detail::require_stream(slot != detail::KeyIndex::kMissing,
                           "context has no recorded followers");
    const Symbol s = decoders[slot].decode(reader);
    x.push_back(s);
    ctx = ((ctx << 8) | s) & mask;
  }
  detail::require_stream(reader.remaining() == 0, "payload bits left after decoding");
  return x;
}

} // namespace eah
