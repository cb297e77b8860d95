#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eah/error.hpp"

namespace eah {

/// A short binary word, at most 64 bits, stored MSB-first: bit 0 is the
/// first bit emitted.  Length 0 is the empty word.
class Codeword {
public:
  static constexpr unsigned kMaxLength = 64;

  constexpr Codeword() = default;
  constexpr Codeword(std::uint64_t bits, unsigned length)
      : bits_(length == 0 ? 0 : bits & mask(length)),
        length_(static_cast<std::uint8_t>(length)) {
    if (length > kMaxLength) {
      throw contract_error("codeword longer than 64 bits");
    }
  }

  static Codeword from_string(std::string_view text) {
    if (text == "-") {
      return {};
    }
    if (text.size() > kMaxLength) {
      throw contract_error("codeword longer than 64 bits");
    }
    std::uint64_t bits = 0;
    for (char ch : text) {
      if (ch != '0' && ch != '1') {
        throw contract_error("codeword text must be binary digits");
      }
      bits = (bits << 1) | static_cast<std::uint64_t>(ch == '1');
    }
    return {bits, static_cast<unsigned>(text.size())};
  }

  constexpr std::uint64_t bits() const noexcept { return bits_; }
  constexpr unsigned size() const noexcept { return length_; }
  constexpr bool empty() const noexcept { return length_ == 0; }

  constexpr bool operator[](unsigned i) const noexcept {
    return ((bits_ >> (length_ - 1 - i)) & 1U) != 0;
  }

  /// True when *this is a prefix of other (equal words count).
  constexpr bool is_prefix_of(const Codeword &other) const noexcept {
    if (length_ > other.length_) {
      return false;
    }
    if (length_ == 0) {
      return true;
    }
    return (other.bits_ >> (other.length_ - length_)) == bits_;
  }

  std::string to_string() const {
    std::string out(length_, '0');
    for (unsigned i = 0; i < length_; ++i) {
      out[i] = (*this)[i] ? '1' : '0';
    }
    return out;
  }

  constexpr auto operator<=>(const Codeword &) const = default;

private:
  static constexpr std::uint64_t mask(unsigned length) noexcept {
    return length >= 64 ? ~std::uint64_t{0}
                        : (std::uint64_t{1} << length) - 1;
  }

  std::uint64_t bits_ = 0;
  std::uint8_t length_ = 0;
};

/// Growable bit sequence packed MSB-first into bytes.  Doubles as the
/// writer side of the bit I/O pair; unused low bits of the last byte are 0.
class BitString {
public:
  BitString() = default;

  static BitString from_string(std::string_view text) {
    BitString out;
    for (char ch : text) {
      if (ch != '0' && ch != '1') {
        throw contract_error("bit text must be binary digits");
      }
      out.push_back(ch == '1');
    }
    return out;
  }

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }
  std::span<const std::uint8_t> bytes() const noexcept { return bytes_; }

  bool operator[](std::size_t i) const noexcept {
    return ((bytes_[i >> 3] >> (7 - (i & 7))) & 1U) != 0;
  }

  void push_back(bool bit) {
    if ((size_ & 7) == 0) {
      bytes_.push_back(0);
    }
    if (bit) {
      bytes_.back() |= static_cast<std::uint8_t>(0x80U >> (size_ & 7));
    }
    ++size_;
  }

  /// Appends the low `count` bits of value, most significant first.
  void append(std::uint64_t value, unsigned count) {
    while (count > 0) {
      const unsigned used = static_cast<unsigned>(size_ & 7);
      if (used == 0) {
        bytes_.push_back(0);
      }
      const unsigned room = 8 - used;
      const unsigned take = std::min(room, count);
      const auto chunk = static_cast<std::uint8_t>(
          (value >> (count - take)) & ((1U << take) - 1));
      bytes_.back() |= static_cast<std::uint8_t>(chunk << (room - take));
      count -= take;
      size_ += take;
    }
  }

  void append(const Codeword &word) { append(word.bits(), word.size()); }

  void append(const BitString &other) {
    if ((size_ & 7) == 0) {
      bytes_.insert(bytes_.end(), other.bytes_.begin(), other.bytes_.end());
      size_ += other.size_;
      return;
    }
    std::size_t i = 0;
    for (; i + 8 <= other.size_; i += 8) {
      append(other.bytes_[i >> 3], 8);
    }
    for (; i < other.size_; ++i) {
      push_back(other[i]);
    }
  }

  /// Zero-fills up to the next byte boundary.
  void pad_to_byte() { size_ = bytes_.size() * 8; }

  void reserve_bits(std::size_t bits) { bytes_.reserve((bits + 7) / 8); }

  std::vector<std::uint8_t> take_bytes() && { return std::move(bytes_); }

  std::string to_string() const {
    std::string out(size_, '0');
    for (std::size_t i = 0; i < size_; ++i) {
      out[i] = (*this)[i] ? '1' : '0';
    }
    return out;
  }

  bool operator==(const BitString &other) const = default;

private:
  std::vector<std::uint8_t> bytes_;
  std::size_t size_ = 0;
};

/// MSB-first reader over a byte span limited to `bit_count` bits.
/// Reading past the limit throws corrupt_stream.
class BitReader {
public:
  BitReader(std::span<const std::uint8_t> data, std::size_t bit_count,
            std::size_t start_bit = 0)
      : data_(data), limit_(bit_count), pos_(start_bit) {
    detail::require(bit_count <= data.size() * 8, "bit count exceeds buffer");
    detail::require(start_bit <= bit_count, "start past end of bit range");
  }

  explicit BitReader(std::span<const std::uint8_t> data)
      : BitReader(data, data.size() * 8) {}

  explicit BitReader(const BitString &bits)
      : BitReader(bits.bytes(), bits.size()) {}

  bool read_bit() {
    detail::require_stream(pos_ < limit_, "bit stream exhausted");
    const bool bit = ((data_[pos_ >> 3] >> (7 - (pos_ & 7))) & 1U) != 0;
    ++pos_;
    return bit;
  }

  std::uint64_t read(unsigned count) {
    detail::require(count <= 64, "at most 64 bits per read");
    detail::require_stream(remaining() >= count, "bit stream exhausted");
    std::uint64_t value = 0;
    while (count > 0) {
      const unsigned offset = static_cast<unsigned>(pos_ & 7);
      const unsigned room = 8 - offset;
      const unsigned take = std::min(room, count);
      const unsigned chunk =
          (data_[pos_ >> 3] >> (room - take)) & ((1U << take) - 1);
      value = (value << take) | chunk;
      pos_ += take;
      count -= take;
    }
    return value;
  }

  void skip(std::size_t count) {
    detail::require_stream(remaining() >= count, "bit stream exhausted");
    pos_ += count;
  }

  std::size_t position() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return limit_ - pos_; }

private:
  std::span<const std::uint8_t> data_;
  std::size_t limit_;
  std::size_t pos_;
};

} // namespace eah
