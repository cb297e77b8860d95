#include <gtest/gtest.h>

#include <random>
#include <set>
#include <vector>

#include "eah/compressor.hpp"
#include "eah/container.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using eah::BitString;
using eah::Codeword;
using eah::test::bytes_of;

namespace {

std::string fixed(const char *word, unsigned maxlc) {
  return eah::encode_codeword_fixed(Codeword::from_string(word), maxlc).to_string();
}

} // namespace

TEST(FixedWidthCodeword, WorkedCases) {
  EXPECT_EQ(fixed("010", 3), "0010");
  EXPECT_EQ(fixed("1", 3), "1001");
  EXPECT_EQ(fixed("01", 2), "001");
  EXPECT_EQ(fixed("0", 1), "00");
  EXPECT_EQ(fixed("10", 4), "10010");
  EXPECT_EQ(eah::decode_codeword_fixed(BitString::from_string("1001"), 3).to_string(), "1");
  EXPECT_EQ(eah::decode_codeword_fixed(BitString::from_string("0111"), 3).to_string(), "111");
  EXPECT_EQ(eah::decode_codeword_fixed(BitString::from_string("0010"), 3).to_string(), "010");
  EXPECT_THROW(fixed("0101", 3), eah::contract_error);
}

TEST(FixedWidthCodeword, ExhaustiveUpToSix) {
  for (unsigned maxlc = 1; maxlc <= 6; ++maxlc) {
    std::set<std::string> images;
    for (unsigned len = 1; len <= maxlc; ++len) {
      for (std::uint64_t v = 0; v < (std::uint64_t{1} << len); ++v) {
        const Codeword cw(v, len);
        const auto enc = eah::encode_codeword_fixed(cw, maxlc);
        ASSERT_EQ(enc.size(), maxlc + 1);
        ASSERT_EQ(eah::decode_codeword_fixed(enc, maxlc), cw);
        ASSERT_TRUE(images.insert(enc.to_string()).second);
      }
    }
  }
}

TEST(Envelope, RoundTripAndErrors) {
  std::vector<std::uint8_t> bytes;
  eah::write_envelope(bytes, {eah::Version::v2, 3, 0x0102030405ULL});
  EXPECT_EQ(bytes, (std::vector<std::uint8_t>{0xEA, 0x48, 2, 3, 5, 4, 3, 2, 1, 0, 0, 0}));
  EXPECT_EQ(eah::read_envelope(bytes), (eah::Envelope{eah::Version::v2, 3, 0x0102030405ULL}));

  auto bad_magic = bytes;
  bad_magic[1] = 0x49;
  EXPECT_THROW(eah::read_envelope(bad_magic), eah::format_error);
  auto bad_version = bytes;
  bad_version[2] = 9;
  EXPECT_THROW(eah::read_envelope(bad_version), eah::format_error);
  bytes.resize(7);
  EXPECT_THROW(eah::read_envelope(bytes), eah::corrupt_stream);
}

// "abbaba", order 1: context a is always followed by b (no codewords, no
// payload bits); context b codes {a, b} with one bit each.
TEST(ContainerV1, WorkedLayout) {
  const auto x = bytes_of("abbaba");
  const auto out = eah::eahn_encode(x, 1);
  const auto bytes = eah::serialize_v1(out);
  const auto layout = eah::inspect_v1(bytes);
  EXPECT_EQ(layout.first_symbol, 'a');
  EXPECT_EQ(layout.maxlc, 1U);
  EXPECT_EQ(layout.contexts, 2U);
  EXPECT_EQ(layout.followers, 2U);
  EXPECT_EQ(layout.codewords, 2U);
  const std::array<std::size_t, 9> widths{8, layout.padding, 8, 8, 256, 256, 4, 4, 3};
  EXPECT_EQ(layout.widths, widths);
  EXPECT_EQ(layout.total_bits() % 8, 0U);
  EXPECT_EQ(bytes.size(), eah::kEnvelopeSize + layout.total_bits() / 8);
  // 8+8+8+256+256+4+4+3 = 547, so 5 padding bits.
  EXPECT_EQ(layout.padding, 5U);
  EXPECT_EQ(eah::parse_v1(bytes), out);
}

TEST(ContainerV1, WidthsFollowTheModel) {
  std::mt19937_64 rng(2);
  for (int round = 0; round < 100; ++round) {
    const auto x = eah::test::markov_string(rng, 2 + rng() % 5000, 1 + rng() % 60, 4);
    const auto out = eah::eahn_encode(x, 1);
    const auto bytes = eah::serialize_v1(out);
    const auto layout = eah::inspect_v1(bytes);

    std::set<unsigned> contexts;
    std::set<unsigned> followers;
    for (std::size_t i = 1; i < x.size(); ++i) {
      contexts.insert(x[i - 1]);
      followers.insert(x[i]);
    }
    EXPECT_EQ(layout.contexts, contexts.size());
    EXPECT_EQ(layout.followers, followers.size());
    EXPECT_EQ(layout.widths[6], contexts.size() * followers.size());
    EXPECT_EQ(layout.widths[7], out.codewords.size() * (eah::max_codeword_length(out.codewords) + 1));
    EXPECT_EQ(layout.widths[8], out.payload.size());
    EXPECT_LE(layout.padding, 7U);
    EXPECT_EQ(layout.total_bits() % 8, 0U);
    EXPECT_EQ(eah::parse_v1(bytes), out);
    EXPECT_EQ(eah::eahn_decode(eah::parse_v1(bytes)), x);
  }
}

TEST(ContainerV2, RoundTripAllOrders) {
  std::mt19937_64 rng(12);
  for (int round = 0; round < 150; ++round) {
    const unsigned n = 1 + static_cast<unsigned>(rng() % eah::kMaxOrder);
    const auto x = eah::test::random_string(rng, n + rng() % 3000, 1 + rng() % 40);
    const auto out = eah::eahn_encode(x, n);
    const auto bytes = eah::serialize_v2(out);
    ASSERT_EQ(eah::parse_v2(bytes), out);
    ASSERT_EQ(eah::eahn_decode(eah::parse_v2(bytes)), x);
  }
}

// Both layouts carry the same tuple for order 1.
TEST(ContainerV2, AgreesWithV1) {
  std::mt19937_64 rng(44);
  for (int round = 0; round < 50; ++round) {
    const auto x = eah::test::markov_string(rng, 1 + rng() % 4000, 30, 5);
    const auto out = eah::eahn_encode(x, 1);
    EXPECT_EQ(eah::parse_v1(eah::serialize_v1(out)), eah::parse_v2(eah::serialize_v2(out)));
  }
}

TEST(Compressor, RoundTripsAndFallback) {
  std::mt19937_64 rng(5);
  using eah::Format;
  using eah::Mode;
  for (int round = 0; round < 200; ++round) {
    const auto x = round % 2 ? eah::test::random_string(rng, rng() % 3000, 256)
                             : eah::test::markov_string(rng, rng() % 3000, 20, 3);
    eah::CompressOptions opt;
    opt.order = 1 + static_cast<unsigned>(rng() % 3);
    opt.mode = round % 3 == 0 ? Mode::online : Mode::offline;
    if (opt.mode == Mode::offline) {
      const Format formats[] = {Format::automatic, Format::v2, Format::raw};
      opt.format = formats[rng() % 3];
    }
    opt.raw_fallback = rng() % 2 == 0;
    const auto packed = eah::compress(x, opt);
    ASSERT_EQ(eah::decompress(packed), x) << "round " << round;
    if (opt.raw_fallback) {
      EXPECT_LE(packed.size(), x.size() + eah::kEnvelopeSize);
    }
  }
}

TEST(Compressor, Deterministic) {
  std::mt19937_64 rng(1);
  const auto x = eah::test::markov_string(rng, 20000, 50, 4);
  for (unsigned n = 1; n <= 3; ++n) {
    eah::CompressOptions opt;
    opt.order = n;
    EXPECT_EQ(eah::compress(x, opt), eah::compress(x, opt));
  }
}

TEST(Compressor, ShortAndEmptyInputs) {
  for (const auto *text : {"", "a", "ab", "abc"}) {
    const auto x = bytes_of(text);
    for (unsigned n = 1; n <= 3; ++n) {
      for (auto mode : {eah::Mode::offline, eah::Mode::online}) {
        eah::CompressOptions opt;
        opt.order = n;
        opt.mode = mode;
        opt.raw_fallback = false;
        EXPECT_EQ(eah::decompress(eah::compress(x, opt)), x) << text << " n=" << n;
      }
    }
  }
}

TEST(Compressor, TruncationIsCorruptStream) {
  std::mt19937_64 rng(9);
  const auto x = eah::test::markov_string(rng, 3000, 16, 3);
  for (auto fmt : {eah::Format::v1, eah::Format::v2}) {
    eah::CompressOptions opt;
    opt.format = fmt;
    opt.raw_fallback = false;
    const auto packed = eah::compress(x, opt);
    for (std::size_t cut : {std::size_t{12}, std::size_t{40}, packed.size() / 2,
                            packed.size() - 1}) {
      const std::vector<std::uint8_t> head(packed.begin(),
                                           packed.begin() + static_cast<std::ptrdiff_t>(cut));
      EXPECT_THROW(eah::decompress(head), eah::corrupt_stream) << "cut " << cut;
    }
  }
  eah::CompressOptions online;
  online.mode = eah::Mode::online;
  online.raw_fallback = false;
  auto packed = eah::compress(x, online);
  packed.pop_back();
  EXPECT_THROW(eah::decompress(packed), eah::corrupt_stream);

  auto raw = eah::serialize_raw(x, 1);
  raw.push_back(0);
  EXPECT_THROW(eah::decompress(raw), eah::corrupt_stream);
}

TEST(Compressor, DeclaredLengthLimit) {
  auto packed = eah::serialize_raw(bytes_of("abc"), 1);
  eah::DecompressOptions limit;
  limit.max_length = 2;
  EXPECT_THROW(eah::decompress(packed, limit), eah::corrupt_stream);
  EXPECT_EQ(eah::decompress(packed), bytes_of("abc"));
}

TEST(Compressor, ContractViolations) {
  eah::CompressOptions opt;
  opt.order = 2;
  opt.format = eah::Format::v1;
  EXPECT_THROW(eah::compress(bytes_of("abcabc"), opt), eah::contract_error);
  opt.order = 8;
  opt.format = eah::Format::automatic;
  EXPECT_THROW(eah::compress(bytes_of("abcabcabc"), opt), eah::contract_error);
}
