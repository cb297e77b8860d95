#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eah/container.hpp"
#include "eah/eahn_codec.hpp"
#include "eah/error.hpp"
#include "eah/online_codec.hpp"
#include "eah/parallel_encoder.hpp"

namespace eah {

enum class Mode { offline, online };
enum class Format { automatic, v1, v2, raw };

struct CompressOptions {
  unsigned order = 1;
  Mode mode = Mode::offline;
  Format format = Format::automatic;
  unsigned threads = 1;
  // Store the input verbatim when the coded container would be larger.
  bool raw_fallback = true;
};

struct DecompressOptions {
  // Refuse containers declaring more output than this.
  std::uint64_t max_length = std::uint64_t{1} << 36;
};

inline std::vector<std::uint8_t> compress(std::span<const std::uint8_t> x,
                                          const CompressOptions &options = {}) {
  check_order(options.order);
  if (options.format == Format::raw || x.size() < options.order) {
    return serialize_raw(x, options.order);
  }
  std::vector<std::uint8_t> coded;
  if (options.mode == Mode::online) {
    detail::require(options.format != Format::v1 && options.format != Format::v2,
                    "online mode has its own stream format");
    coded = serialize_online(online_encode(x, options.order), options.order, x.size());
  } else {
    const bool v1 = options.format == Format::v1 ||
                    (options.format == Format::automatic && options.order == 1);
    detail::require(!v1 || options.order == 1, "format v1 requires order 1");
    const unsigned workers = resolve_worker_count(options.threads);
    const auto out = workers > 1 ? eahn_encode_parallel(x, options.order, workers)
                                 : eahn_encode(x, options.order);
    coded = v1 ? serialize_v1(out) : serialize_v2(out);
  }
  if (options.raw_fallback && coded.size() > kEnvelopeSize + x.size()) {
    return serialize_raw(x, options.order);
  }
  return coded;
}

inline std::vector<std::uint8_t> decompress(std::span<const std::uint8_t> bytes,
                                            const DecompressOptions &options = {}) {
  const auto env = read_envelope(bytes);
  detail::require_stream(env.length <= options.max_length,
                         "declared length exceeds the decompression limit");
  std::vector<std::uint8_t> x;
  switch (env.version) {
  case Version::raw:
    return parse_raw(bytes);
  case Version::v1:
    x = eahn_decode(parse_v1(bytes));
    break;
  case Version::v2:
    x = eahn_decode(parse_v2(bytes));
    break;
  case Version::online:
    detail::require_stream(env.order >= 1 && env.order <= kMaxOrder, "order out of range");
    x = online_decode(parse_online(bytes), env.order, env.length);
    break;
  }
  detail::require_stream(x.size() == env.length, "decoded length differs from envelope");
  return x;
}

inline std::string_view version_name(Version v) {
  switch (v) {
  case Version::raw:
    return "raw";
  case Version::v1:
    return "v1";
  case Version::v2:
    return "v2";
  case Version::online:
    return "online";
  }
  return "unknown";
}

} // namespace eah
