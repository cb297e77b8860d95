#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "eah/bits.hpp"
#include "eah/container.hpp"
#include "eah/eahn_codec.hpp"
#include "eah/error.hpp"
#include "eah/huffman.hpp"

namespace eah {

// Order-0 Huffman reference coder used as the comparison baseline.
// Layout: 256 x u32 LE symbol frequencies, then the codes, zero-padded.
inline constexpr std::size_t kBaselineHeaderBytes = 256 * 4;

namespace detail {

struct Order0Code {
  std::array<std::uint64_t, 256> freqs{};
  std::array<Codeword, 256> words{};
  int single = -1; // the only symbol present, coded in zero bits
};

inline Order0Code order0_code(const std::array<std::uint64_t, 256> &freqs) {
  Order0Code code;
  code.freqs = freqs;
  std::vector<std::uint64_t> present;
  std::vector<unsigned> symbols;
  for (unsigned s = 0; s < 256; ++s) {
    if (freqs[s] > 0) {
      present.push_back(freqs[s]);
      symbols.push_back(s);
    }
  }
  if (symbols.size() == 1) {
    code.single = static_cast<int>(symbols.front());
  } else if (symbols.size() >= 2) {
    const auto words = build_huffman(present);
    for (std::size_t i = 0; i < symbols.size(); ++i) {
      code.words[symbols[i]] = words[i];
    }
  }
  return code;
}

} // namespace detail

inline std::vector<std::uint8_t> huffman0_compress(std::span<const std::uint8_t> x) {
  std::array<std::uint64_t, 256> freqs{};
  for (auto s : x) {
    ++freqs[s];
  }
  std::vector<std::uint8_t> out;
  out.reserve(kBaselineHeaderBytes + x.size());
  for (auto f : freqs) {
    detail::require(f <= std::numeric_limits<std::uint32_t>::max(),
                    "baseline frequencies are 32-bit");
    detail::put_le(out, f, 4);
  }
  const auto code = detail::order0_code(freqs);
  BitString bits;
  bits.reserve_bits(x.size() * 8);
  for (auto s : x) {
    bits.append(code.words[s]);
  }
  const auto packed = bits.bytes();
  out.insert(out.end(), packed.begin(), packed.end());
  return out;
}

inline std::vector<std::uint8_t> huffman0_decompress(std::span<const std::uint8_t> bytes) {
  detail::require_stream(bytes.size() >= kBaselineHeaderBytes, "baseline header truncated");
  std::array<std::uint64_t, 256> freqs{};
  std::uint64_t total = 0;
  for (unsigned s = 0; s < 256; ++s) {
    freqs[s] = detail::get_le(bytes, 4 * s, 4);
    total += freqs[s];
  }
  const auto code = detail::order0_code(freqs);
  const auto body = bytes.subspan(kBaselineHeaderBytes);
  std::vector<std::uint8_t> x;
  if (code.single >= 0) {
    detail::require_stream(body.empty(), "trailing bytes after payload");
    x.assign(total, static_cast<std::uint8_t>(code.single));
    return x;
  }

  ContextCode as_context;
  for (unsigned s = 0; s < 256; ++s) {
    if (freqs[s] > 0) {
      as_context.followers.push_back(static_cast<Symbol>(s));
      as_context.words.push_back(code.words[s]);
    }
  }
  BitReader in(body);
  detail::require_stream(total <= body.size() * 8, "payload truncated");
  x.reserve(total);
  if (total > 0) {
    const detail::ContextDecoder decoder(as_context);
    for (std::uint64_t i = 0; i < total; ++i) {
      x.push_back(decoder.decode(in));
    }
  }
  detail::require_stream(in.remaining() < 8, "trailing bytes after payload");
  detail::require_stream(in.read(static_cast<unsigned>(in.remaining())) == 0,
                         "nonzero padding bits");
  return x;
}

} // namespace eah
