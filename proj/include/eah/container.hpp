#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <bitset>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "eah/bits.hpp"
#include "eah/eahn_codec.hpp"
#include "eah/error.hpp"

namespace eah {

// Envelope: magic EA 48, version, order, original length (u64 LE).
inline constexpr std::array<std::uint8_t, 2> kMagic{0xEA, 0x48};
inline constexpr std::size_t kEnvelopeSize = 12;

enum class Version : std::uint8_t { raw = 0, v1 = 1, v2 = 2, online = 3 };

struct Envelope {
  Version version = Version::raw;
  std::uint8_t order = 1;
  std::uint64_t length = 0;

  bool operator==(const Envelope &) const = default;
};

namespace detail {

inline void put_le(std::vector<std::uint8_t> &out, std::uint64_t value, unsigned bytes) {
  for (unsigned i = 0; i < bytes; ++i) {
    out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
}

inline std::uint64_t get_le(std::span<const std::uint8_t> in, std::size_t offset,
                            unsigned bytes) {
  require_stream(offset + bytes <= in.size(), "container truncated");
  std::uint64_t value = 0;
  for (unsigned i = 0; i < bytes; ++i) {
    value |= std::uint64_t{in[offset + i]} << (8 * i);
  }
  return value;
}

// Copies `count` bits from the reader into a fresh BitString.
inline BitString read_bits(BitReader &in, std::size_t count) {
  require_stream(in.remaining() >= count, "bit field truncated");
  BitString out;
  out.reserve_bits(count);
  for (; count >= 64; count -= 64) {
    out.append(in.read(64), 64);
  }
  out.append(in.read(static_cast<unsigned>(count)), static_cast<unsigned>(count));
  return out;
}

} // namespace detail

inline void write_envelope(std::vector<std::uint8_t> &out, const Envelope &env) {
  out.insert(out.end(), kMagic.begin(), kMagic.end());
  out.push_back(static_cast<std::uint8_t>(env.version));
  out.push_back(env.order);
  detail::put_le(out, env.length, 8);
}

inline Envelope read_envelope(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != kMagic[0] || bytes[1] != kMagic[1]) {
    throw format_error("not an EAH container (bad magic)");
  }
  detail::require_stream(bytes.size() >= kEnvelopeSize, "envelope truncated");
  if (bytes[2] > static_cast<std::uint8_t>(Version::online)) {
    throw format_error("unknown container version " + std::to_string(bytes[2]));
  }
  Envelope env;
  env.version = static_cast<Version>(bytes[2]);
  env.order = bytes[3];
  env.length = detail::get_le(bytes, 4, 8);
  return env;
}

// Fixed-width codeword: MAXLC+1 bits.  A word of length MAXLC is written as
// B1 B1 B2..Bi; a shorter one as B1, then MAXLC-i copies of !B1, then the word.
inline void put_codeword_fixed(BitString &out, const Codeword &cw, unsigned maxlc) {
  detail::require(cw.size() >= 1 && cw.size() <= maxlc,
                  "codeword length must be in 1..MAXLC");
  const bool first = cw[0];
  out.push_back(first);
  for (unsigned i = cw.size(); i < maxlc; ++i) {
    out.push_back(!first);
  }
  out.append(cw);
}

inline BitString encode_codeword_fixed(const Codeword &cw, unsigned maxlc) {
  BitString out;
  put_codeword_fixed(out, cw, maxlc);
  return out;
}

inline Codeword get_codeword_fixed(BitReader &in, unsigned maxlc) {
  detail::require(maxlc >= 1 && maxlc <= Codeword::kMaxLength, "MAXLC out of range");
  std::array<bool, Codeword::kMaxLength + 1> c{};
  for (unsigned i = 0; i <= maxlc; ++i) {
    c[i] = in.read_bit();
  }
  unsigned start = 1;
  if (c[0] != c[1]) {
    unsigned j = 1;
    while (j < maxlc && c[j + 1] == c[1]) {
      ++j;
    }
    if (j < maxlc) {
      start = j + 1;
    }
  }
  std::uint64_t bits = 0;
  for (unsigned i = start; i <= maxlc; ++i) {
    bits = (bits << 1) | static_cast<std::uint64_t>(c[i]);
  }
  return {bits, maxlc + 1 - start};
}

inline Codeword decode_codeword_fixed(const BitString &bits, unsigned maxlc) {
  detail::require(bits.size() == maxlc + 1, "expected MAXLC+1 bits");
  BitReader in(bits);
  return get_codeword_fixed(in, maxlc);
}

inline unsigned max_codeword_length(std::span<const Codeword> words) {
  unsigned maxlc = 0;
  for (const auto &w : words) {
    maxlc = std::max(maxlc, w.size());
  }
  return maxlc;
}

/// Field widths and header values of a v1 body, in bits.
struct V1Layout {
  std::array<std::size_t, 9> widths{}; // Z1..Z9
  unsigned padding = 0;
  Symbol first_symbol = 0;
  unsigned maxlc = 0;
  unsigned contexts = 0;  // NC
  unsigned followers = 0; // NL
  std::size_t codewords = 0;

  std::size_t total_bits() const {
    std::size_t sum = 0;
    for (auto w : widths) {
      sum += w;
    }
    return sum;
  }
};

namespace detail {

using Bitmap = std::bitset<256>;

// Bitmaps travel as four 64-bit words, symbol 0 first.
inline void put_bitmap(BitString &out, const Bitmap &map) {
  for (unsigned word = 0; word < 4; ++word) {
    std::uint64_t bits = 0;
    for (unsigned i = 0; i < 64; ++i) {
      bits = (bits << 1) | static_cast<std::uint64_t>(map[word * 64 + i]);
    }
    out.append(bits, 64);
  }
}

inline void put_followers(BitString &out, std::span<const Symbol> followers) {
  std::array<std::uint64_t, 4> words{};
  for (auto f : followers) {
    words[f >> 6] |= std::uint64_t{1} << (63 - (f & 63));
  }
  for (auto w : words) {
    out.append(w, 64);
  }
}

inline Bitmap get_bitmap(BitReader &in) {
  Bitmap map;
  for (unsigned word = 0; word < 4; ++word) {
    const std::uint64_t bits = in.read(64);
    for (unsigned i = 0; i < 64; ++i) {
      map[word * 64 + i] = ((bits >> (63 - i)) & 1U) != 0;
    }
  }
  return map;
}

inline std::vector<Symbol> get_followers(BitReader &in) {
  std::vector<Symbol> out;
  for (unsigned word = 0; word < 4; ++word) {
    std::uint64_t bits = in.read(64);
    while (bits != 0) {
      const unsigned lead = static_cast<unsigned>(std::countl_zero(bits));
      out.push_back(static_cast<Symbol>(word * 64 + lead));
      bits &= ~(std::uint64_t{1} << (63 - lead));
    }
  }
  return out;
}

inline std::size_t codeword_count(const std::vector<ContextFollowers> &b) {
  std::size_t n = 0;
  for (const auto &entry : b) {
    if (entry.followers.size() >= 2) {
      n += entry.followers.size();
    }
  }
  return n;
}

inline std::vector<Symbol> members(const Bitmap &map) {
  std::vector<Symbol> out;
  for (unsigned s = 0; s < 256; ++s) {
    if (map[s]) {
      out.push_back(static_cast<Symbol>(s));
    }
  }
  return out;
}

inline void check_for_serialization(const EahnOutput &out) {
  validate_output_shape(out);
  require(codeword_count(out.occurrence) == out.codewords.size(),
          "codeword tuple does not match the follower sets");
  for (const auto &w : out.codewords) {
    require(!w.empty(), "codeword tuple holds an empty word");
  }
}

inline std::vector<Codeword> read_codeword_block(BitReader &in, std::size_t count,
                                                 unsigned maxlc) {
  require_stream(count == 0 || maxlc >= 1, "MAXLC is zero but codewords follow");
  require_stream(maxlc <= Codeword::kMaxLength, "MAXLC exceeds 64");
  require_stream(count == 0 || in.remaining() / (maxlc + 1) >= count,
                 "codeword block truncated");
  std::vector<Codeword> words;
  words.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    words.push_back(get_codeword_fixed(in, maxlc));
  }
  return words;
}

inline EahnOutput parse_v1_impl(std::span<const std::uint8_t> bytes, V1Layout *layout) {
  const auto env = read_envelope(bytes);
  if (env.version != Version::v1) {
    throw format_error("container is not version 1");
  }
  require_stream(env.order == 1, "version 1 requires order 1");
  require_stream(env.length >= 1, "version 1 requires a nonempty input");
  const auto body = bytes.subspan(kEnvelopeSize);
  BitReader in(body);

  V1Layout info;
  info.padding = static_cast<unsigned>(in.read(8));
  require_stream(info.padding <= 7, "padding count above 7");
  require_stream(in.read(info.padding) == 0, "nonzero padding bits");
  info.first_symbol = static_cast<Symbol>(in.read(8));
  info.maxlc = static_cast<unsigned>(in.read(8));
  const auto context_map = get_bitmap(in);
  const auto follower_map = get_bitmap(in);
  const auto contexts = members(context_map);
  const auto followers = members(follower_map);
  info.contexts = static_cast<unsigned>(contexts.size());
  info.followers = static_cast<unsigned>(followers.size());

  EahnOutput out;
  out.order = 1;
  out.length = env.length;
  out.prefix = {info.first_symbol};
  Bitmap seen_followers;
  for (auto ctx : contexts) {
    ContextFollowers entry{ctx, {}};
    for (auto f : followers) {
      if (in.read_bit()) {
        entry.followers.push_back(f);
        seen_followers[f] = true;
      }
    }
    require_stream(!entry.followers.empty(), "context bit set without followers");
    out.occurrence.push_back(std::move(entry));
  }
  require_stream(seen_followers == follower_map, "follower bitmap inconsistent with b");

  info.codewords = codeword_count(out.occurrence);
  out.codewords = read_codeword_block(in, info.codewords, info.maxlc);
  require_stream(info.codewords == 0 || max_codeword_length(out.codewords) == info.maxlc,
                 "MAXLC disagrees with the codewords");
  out.payload = read_bits(in, in.remaining());

  info.widths = {8,
                 info.padding,
                 8,
                 8,
                 256,
                 256,
                 std::size_t{info.followers} * info.contexts,
                 info.codewords * (info.maxlc + 1),
                 out.payload.size()};
  if (layout != nullptr) {
    *layout = info;
  }
  return out;
}

} // namespace detail

/// Order-1 body laid out as Z1..Z9 behind the envelope.
inline std::vector<std::uint8_t> serialize_v1(const EahnOutput &out) {
  detail::require(out.order == 1, "version 1 holds order-1 output only");
  detail::check_for_serialization(out);

  detail::Bitmap context_map;
  detail::Bitmap follower_map;
  for (const auto &entry : out.occurrence) {
    context_map[entry.context] = true;
    for (auto f : entry.followers) {
      follower_map[f] = true;
    }
  }
  const auto followers = detail::members(follower_map);
  const unsigned maxlc = max_codeword_length(out.codewords);

  const std::size_t unpadded = 8 + 8 + 8 + 256 + 256 +
                               followers.size() * out.occurrence.size() +
                               out.codewords.size() * (maxlc + 1) + out.payload.size();
  const unsigned padding = static_cast<unsigned>((8 - unpadded % 8) % 8);

  BitString body;
  body.reserve_bits(unpadded + padding);
  body.append(padding, 8);             // Z1
  body.append(0, padding);             // Z2
  body.append(out.prefix.front(), 8);  // Z3
  body.append(maxlc, 8);               // Z4
  detail::put_bitmap(body, context_map);  // Z5
  detail::put_bitmap(body, follower_map); // Z6
  for (const auto &entry : out.occurrence) { // Z7, context-major
    auto it = entry.followers.begin();
    for (auto f : followers) {
      const bool hit = it != entry.followers.end() && *it == f;
      body.push_back(hit);
      if (hit) {
        ++it;
      }
    }
  }
  for (const auto &w : out.codewords) { // Z8
    put_codeword_fixed(body, w, maxlc);
  }
  body.append(out.payload); // Z9

  std::vector<std::uint8_t> bytes;
  bytes.reserve(kEnvelopeSize + body.size() / 8);
  write_envelope(bytes, {Version::v1, 1, out.length});
  const auto packed = body.bytes();
  bytes.insert(bytes.end(), packed.begin(), packed.end());
  return bytes;
}

inline EahnOutput parse_v1(std::span<const std::uint8_t> bytes) {
  return detail::parse_v1_impl(bytes, nullptr);
}

/// Field-by-field widths of a v1 container.
inline V1Layout inspect_v1(std::span<const std::uint8_t> bytes) {
  V1Layout layout;
  detail::parse_v1_impl(bytes, &layout);
  return layout;
}

// Version 2 body, any order:
//   prefix (n bytes) | context count (u32 LE) | contexts (n bytes each,
//   ascending) | payload bit count (u64 LE) | bit section: one 256-bit
//   follower bitmap per context, MAXLC (8), fixed-width codewords, payload,
//   zero padding to a byte.
inline std::vector<std::uint8_t> serialize_v2(const EahnOutput &out) {
  detail::check_for_serialization(out);
  const unsigned n = out.order;
  std::vector<std::uint8_t> bytes;
  write_envelope(bytes, {Version::v2, static_cast<std::uint8_t>(n), out.length});
  bytes.insert(bytes.end(), out.prefix.begin(), out.prefix.end());
  detail::put_le(bytes, out.occurrence.size(), 4);
  for (const auto &entry : out.occurrence) {
    const auto key = unpack_context(entry.context, n);
    bytes.insert(bytes.end(), key.begin(), key.end());
  }
  detail::put_le(bytes, out.payload.size(), 8);

  const unsigned maxlc = max_codeword_length(out.codewords);
  BitString bits;
  bits.reserve_bits(out.occurrence.size() * 256 + 8 +
                    out.codewords.size() * (maxlc + 1) + out.payload.size());
  for (const auto &entry : out.occurrence) {
    detail::put_followers(bits, entry.followers);
  }
  bits.append(maxlc, 8);
  for (const auto &w : out.codewords) {
    put_codeword_fixed(bits, w, maxlc);
  }
  bits.append(out.payload);
  const auto packed = bits.bytes();
  bytes.insert(bytes.end(), packed.begin(), packed.end());
  return bytes;
}

inline EahnOutput parse_v2(std::span<const std::uint8_t> bytes) {
  const auto env = read_envelope(bytes);
  if (env.version != Version::v2) {
    throw format_error("container is not version 2");
  }
  const unsigned n = env.order;
  detail::require_stream(n >= 1 && n <= kMaxOrder, "order out of range");
  detail::require_stream(env.length >= n, "length shorter than the order");

  std::size_t offset = kEnvelopeSize;
  detail::require_stream(bytes.size() >= offset + n + 4, "container truncated");
  EahnOutput out;
  out.order = n;
  out.length = env.length;
  out.prefix.assign(bytes.begin() + static_cast<std::ptrdiff_t>(offset),
                    bytes.begin() + static_cast<std::ptrdiff_t>(offset + n));
  offset += n;
  const std::uint64_t count = detail::get_le(bytes, offset, 4);
  offset += 4;
  detail::require_stream(count <= (bytes.size() - offset) / n, "context list truncated");
  out.occurrence.resize(count);
  for (auto &entry : out.occurrence) {
    entry.context = pack_context(bytes.subspan(offset, n));
    offset += n;
  }
  const std::uint64_t payload_bits = detail::get_le(bytes, offset, 8);
  offset += 8;

  BitReader in(bytes.subspan(offset));
  for (auto &entry : out.occurrence) {
    entry.followers = detail::get_followers(in);
    detail::require_stream(!entry.followers.empty(), "context without followers");
  }
  const unsigned maxlc = static_cast<unsigned>(in.read(8));
  const std::size_t ycount = detail::codeword_count(out.occurrence);
  out.codewords = detail::read_codeword_block(in, ycount, maxlc);
  detail::require_stream(ycount == 0 || max_codeword_length(out.codewords) == maxlc,
                         "MAXLC disagrees with the codewords");
  detail::require_stream(payload_bits <= in.remaining(), "payload truncated");
  out.payload = detail::read_bits(in, payload_bits);
  detail::require_stream(in.remaining() < 8, "trailing bytes after payload");
  detail::require_stream(in.read(static_cast<unsigned>(in.remaining())) == 0,
                         "nonzero padding bits");
  detail::validate_output_shape(out);
  return out;
}

inline std::vector<std::uint8_t> serialize_raw(std::span<const Symbol> x, unsigned order) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(kEnvelopeSize + x.size());
  write_envelope(bytes, {Version::raw, static_cast<std::uint8_t>(order), x.size()});
  bytes.insert(bytes.end(), x.begin(), x.end());
  return bytes;
}

inline std::vector<Symbol> parse_raw(std::span<const std::uint8_t> bytes) {
  const auto env = read_envelope(bytes);
  if (env.version != Version::raw) {
    throw format_error("container is not raw");
  }
  detail::require_stream(bytes.size() - kEnvelopeSize == env.length,
                         "raw body size differs from the recorded length");
  return {bytes.begin() + kEnvelopeSize, bytes.end()};
}

/// Online stream: payload bit count (u64 LE), then the bits, zero-padded.
inline std::vector<std::uint8_t> serialize_online(const BitString &bits, unsigned order,
                                                  std::uint64_t length) {
  std::vector<std::uint8_t> bytes;
  write_envelope(bytes, {Version::online, static_cast<std::uint8_t>(order), length});
  detail::put_le(bytes, bits.size(), 8);
  const auto packed = bits.bytes();
  bytes.insert(bytes.end(), packed.begin(), packed.end());
  return bytes;
}

inline BitString parse_online(std::span<const std::uint8_t> bytes) {
  const auto env = read_envelope(bytes);
  if (env.version != Version::online) {
    throw format_error("container is not an online stream");
  }
  const std::uint64_t count = detail::get_le(bytes, kEnvelopeSize, 8);
  const auto body = bytes.subspan(kEnvelopeSize + 8);
  detail::require_stream(count <= body.size() * 8, "payload truncated");
  detail::require_stream(body.size() == (count + 7) / 8, "trailing bytes after payload");
  BitReader in(body);
  auto bits = detail::read_bits(in, count);
  detail::require_stream(in.read(static_cast<unsigned>(in.remaining())) == 0,
                         "nonzero padding bits");
  return bits;
}

} // namespace eah
