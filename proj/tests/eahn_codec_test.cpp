#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "eah/eahn_codec.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using eah::BitString;
using eah::Codeword;
using eah::test::bytes_of;

namespace {

std::uint64_t ctx(std::string_view s) { return eah::pack_context(bytes_of(s)); }

std::vector<std::string> words(const eah::EahnOutput &out) {
  std::vector<std::string> w;
  for (const auto &c : out.codewords) {
    w.push_back(c.to_string());
  }
  return w;
}

} // namespace

TEST(ContextPacking, RoundTripAndOrdering) {
  EXPECT_EQ(ctx("ab"), 0x6162U);
  EXPECT_EQ(eah::unpack_context(0x6162, 2), bytes_of("ab"));
  EXPECT_LT(ctx("ab"), ctx("ba"));
  EXPECT_EQ(eah::context_mask(7), 0x00FFFFFFFFFFFFFFULL);
  EXPECT_THROW(eah::check_order(0), eah::contract_error);
  EXPECT_THROW(eah::check_order(8), eah::contract_error);
}

TEST(EahnCodec, WorkedExampleTables) {
  const auto x = bytes_of("baabbabab");
  const auto model = eah::scan_frequencies(x, 2);
  // Frequencies c(s, u).
  EXPECT_EQ(model.count('a', ctx("aa")), 0U);
  EXPECT_EQ(model.count('b', ctx("aa")), 1U);
  EXPECT_EQ(model.count('a', ctx("ab")), 1U);
  EXPECT_EQ(model.count('b', ctx("ab")), 1U);
  EXPECT_EQ(model.count('a', ctx("ba")), 1U);
  EXPECT_EQ(model.count('b', ctx("ba")), 2U);
  EXPECT_EQ(model.count('a', ctx("bb")), 1U);
  EXPECT_EQ(model.count('b', ctx("bb")), 0U);

  const auto book = eah::build_codebook(model);
  EXPECT_EQ(book.find('a', ctx("ab"))->to_string(), "0");
  EXPECT_EQ(book.find('b', ctx("ab"))->to_string(), "1");
  EXPECT_EQ(book.find('a', ctx("ba"))->to_string(), "0");
  EXPECT_EQ(book.find('b', ctx("ba"))->to_string(), "1");
  EXPECT_TRUE(book.find('b', ctx("aa"))->empty());
  EXPECT_TRUE(book.find('a', ctx("bb"))->empty());
  EXPECT_EQ(book.find('a', ctx("aa")), nullptr);

  const auto out = eah::eahn_encode(x, 2);
  EXPECT_EQ(out.prefix, bytes_of("ba"));
  EXPECT_EQ(words(out), (std::vector<std::string>{"0", "1", "0", "1"}));
  EXPECT_EQ(out.payload.to_string(), "01101");
  EXPECT_EQ(out.length, 9U);
  EXPECT_FALSE(out.occurs('a', ctx("aa")));
  EXPECT_TRUE(out.occurs('b', ctx("aa")));
  EXPECT_TRUE(out.occurs('a', ctx("ab")));
  EXPECT_TRUE(out.occurs('b', ctx("ba")));
  EXPECT_FALSE(out.occurs('b', ctx("bb")));
  EXPECT_EQ(eah::eahn_decode(out), x);
}

TEST(EahnCodec, ConstantInputHasEmptyPayload) {
  const auto x = bytes_of("aaaa");
  const auto out = eah::eahn_encode(x, 1);
  EXPECT_EQ(out.prefix, bytes_of("a"));
  EXPECT_TRUE(out.codewords.empty());
  EXPECT_EQ(out.payload.size(), 0U);
  ASSERT_EQ(out.occurrence.size(), 1U);
  EXPECT_EQ(out.occurrence[0].followers, bytes_of("a"));
  EXPECT_EQ(eah::eahn_decode(out), x);

  // Only t distinguishes lengths.
  auto longer = out;
  longer.length = 5;
  EXPECT_EQ(eah::eahn_decode(longer), bytes_of("aaaaa"));
}

TEST(EahnCodec, InputOfExactlyOrderLength) {
  const auto x = bytes_of("xyz");
  const auto out = eah::eahn_encode(x, 3);
  EXPECT_TRUE(out.occurrence.empty());
  EXPECT_EQ(eah::eahn_decode(out), x);
  EXPECT_THROW(eah::eahn_encode(bytes_of("xy"), 3), eah::contract_error);
}

TEST(EahnCodec, ScanMatchesSlidingWindow) {
  std::mt19937_64 rng(21);
  for (int round = 0; round < 120; ++round) {
    const unsigned n = 1 + static_cast<unsigned>(rng() % 4);
    const auto x = eah::test::random_string(rng, n + rng() % 400,
                                            1 + static_cast<unsigned>(rng() % 6), 'a');
    const auto expect = eah::oracle::sliding_window_counts(x, n);
    const auto model = eah::scan_frequencies(x, n);
    std::size_t pairs = 0;
    for (const auto &stats : model.contexts()) {
      const auto key = eah::unpack_context(stats.context, n);
      for (const auto &f : stats.followers) {
        const auto it = expect.find({std::string(key.begin(), key.end()), f.symbol});
        ASSERT_NE(it, expect.end());
        EXPECT_EQ(it->second, f.count);
        ++pairs;
      }
    }
    EXPECT_EQ(pairs, expect.size());
    EXPECT_EQ(model.total(), x.size() - n);
  }
}

// |Z| = sum over (context, follower) of count * codeword length.
TEST(EahnCodec, PayloadLengthOracle) {
  std::mt19937_64 rng(8);
  for (int round = 0; round < 80; ++round) {
    const unsigned n = 1 + static_cast<unsigned>(rng() % 3);
    const auto x = eah::test::markov_string(rng, 50 + rng() % 3000, 16, 4);
    const auto counts = eah::oracle::sliding_window_counts(x, n);
    const auto out = eah::eahn_encode(x, n);
    const auto book = eah::codebook_from_output(out);
    std::uint64_t bits = 0;
    for (const auto &[key, count] : counts) {
      const auto *w = book.find(static_cast<eah::Symbol>(key.second),
                                eah::pack_context(bytes_of(key.first)));
      ASSERT_NE(w, nullptr);
      bits += count * w->size();
    }
    EXPECT_EQ(out.payload.size(), bits);
  }
}

TEST(EahnCodec, ContextCodesArePrefixFree) {
  std::mt19937_64 rng(13);
  for (int round = 0; round < 100; ++round) {
    const unsigned n = 1 + static_cast<unsigned>(rng() % 3);
    const auto x = eah::test::random_string(rng, n + rng() % 2000,
                                            2 + static_cast<unsigned>(rng() % 20));
    const auto book = eah::build_codebook(eah::scan_frequencies(x, n));
    for (const auto &code : book.contexts) {
      if (code.multi()) {
        ASSERT_TRUE(eah::is_prefix_free(code.words));
      }
    }
    EXPECT_TRUE(eah::verify_prefix_contexts(book.to_table()));
  }
}

TEST(EahnCodec, RandomRoundTrips) {
  std::mt19937_64 rng(99);
  for (int round = 0; round < 500; ++round) {
    const unsigned n = 1 + static_cast<unsigned>(rng() % 4);
    const unsigned p = round % 3 == 0 ? 256 : 1 + static_cast<unsigned>(rng() % 8);
    const auto x = round % 2 ? eah::test::random_string(rng, n + rng() % 1500, p)
                             : eah::test::markov_string(rng, n + rng() % 1500, p, 3);
    const auto out = eah::eahn_encode(x, n);
    ASSERT_EQ(eah::eahn_decode(out), x) << "round " << round;
  }
}

TEST(EahnCodec, CorruptOutputsAreRejected) {
  const auto x = bytes_of("baabbabab");
  const auto out = eah::eahn_encode(x, 2);

  auto extra = out;
  extra.payload.push_back(false);
  EXPECT_THROW(eah::eahn_decode(extra), eah::corrupt_stream);

  auto shorter = out;
  shorter.payload = BitString::from_string("0110");
  EXPECT_THROW(eah::eahn_decode(shorter), eah::corrupt_stream);

  auto missing = out;
  missing.codewords.pop_back();
  EXPECT_THROW(eah::eahn_decode(missing), eah::corrupt_stream);

  auto not_prefix = out;
  not_prefix.codewords[1] = Codeword::from_string("01");
  EXPECT_THROW(eah::eahn_decode(not_prefix), eah::corrupt_stream);

  auto unordered = out;
  std::swap(unordered.occurrence[0], unordered.occurrence[1]);
  EXPECT_THROW(eah::eahn_decode(unordered), eah::corrupt_stream);

  auto bad_prefix = out;
  bad_prefix.prefix = bytes_of("a");
  EXPECT_THROW(eah::eahn_decode(bad_prefix), eah::corrupt_stream);

  // A context the decoder reaches but b never recorded.
  auto unknown = out;
  unknown.prefix = bytes_of("zz");
  EXPECT_THROW(eah::eahn_decode(unknown), eah::corrupt_stream);
}
