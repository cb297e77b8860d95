#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "eah/baseline.hpp"
#include "eah/bench.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using eah::test::bytes_of;

TEST(Baseline, RoundTrips) {
  std::mt19937_64 rng(20);
  for (int round = 0; round < 100; ++round) {
    const auto x = eah::test::random_string(rng, rng() % 5000, 1 + rng() % 256);
    const auto packed = eah::huffman0_compress(x);
    ASSERT_EQ(eah::huffman0_decompress(packed), x);
  }
  EXPECT_TRUE(eah::huffman0_decompress(eah::huffman0_compress({})).empty());
  EXPECT_EQ(eah::huffman0_decompress(eah::huffman0_compress(bytes_of("zzzz"))),
            bytes_of("zzzz"));
}

TEST(Baseline, SizeIsHeaderPlusHuffmanBits) {
  // a:4 b:2 c:1 d:1 -> lengths 1,2,3,3 -> 14 bits -> 2 bytes.
  const auto x = bytes_of("aaaabbcd");
  EXPECT_EQ(eah::huffman0_compress(x).size(), eah::kBaselineHeaderBytes + 2);
}

TEST(Baseline, CorruptInputs) {
  auto packed = eah::huffman0_compress(bytes_of("abcabcabcaaa"));
  EXPECT_THROW(eah::huffman0_decompress(std::vector<std::uint8_t>(100, 0)), eah::corrupt_stream);
  packed.pop_back();
  EXPECT_THROW(eah::huffman0_decompress(packed), eah::corrupt_stream);
}

TEST(Bench, ImprovementFromSizes) {
  eah::BenchRow row;
  row.huffman = 200;
  row.eahn = 150;
  EXPECT_DOUBLE_EQ(row.improvement(), 25.0);
  row.eahn = 250;
  EXPECT_DOUBLE_EQ(row.improvement(), -25.0);
}

TEST(Bench, DirectoryRunAndTotals) {
  const fs::path dir = fs::temp_directory_path() / "eah_bench_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::mt19937_64 rng(1);
  const auto a = eah::test::markov_string(rng, 30000, 30, 3);
  const auto b = eah::test::random_string(rng, 20000, 256);
  for (const auto &[name, data] : {std::pair{"a.bin", a}, std::pair{"b.bin", b}}) {
    std::ofstream out(dir / name, std::ios::binary);
    out.write(reinterpret_cast<const char *>(data.data()), static_cast<std::streamsize>(data.size()));
  }
  eah::BenchOptions options;
  options.orders = {1, 2};
  options.modes = {eah::Mode::offline, eah::Mode::online};
  options.jobs = 2;
  options.check_bounds = true;
  const auto report = eah::run_bench(dir, options);
  ASSERT_EQ(report.rows.size(), 8U);
  ASSERT_EQ(report.totals.size(), 4U);
  EXPECT_EQ(report.bound_violations, 0U);
  EXPECT_EQ(report.rows[0].file, "a.bin");
  EXPECT_EQ(report.rows[0].original, a.size());
  for (const auto &t : report.totals) {
    EXPECT_EQ(t.original, a.size() + b.size());
  }
  std::ostringstream csv;
  eah::write_bench_csv(csv, report);
  EXPECT_NE(csv.str().find("a.bin,1,offline,30000,"), std::string::npos);
  std::ostringstream table;
  eah::write_bench_table(table, report);
  EXPECT_NE(table.str().find("TOTAL"), std::string::npos);
  fs::remove_all(dir);
}
