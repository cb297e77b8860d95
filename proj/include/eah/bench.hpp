#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "eah/baseline.hpp"
#include "eah/compressor.hpp"
#include "eah/entropy_analysis.hpp"
#include "eah/parallel_encoder.hpp"

namespace eah {

struct BenchRow {
  std::string file;
  unsigned order = 1;
  Mode mode = Mode::offline;
  std::uint64_t original = 0;
  std::uint64_t huffman = 0;
  std::uint64_t eahn = 0;

  /// 100 * (1 - eahn / huffman); recomputed from the sizes on every call.
  double improvement() const {
    if (huffman == 0) {
      return 0.0;
    }
    return 100.0 * (1.0 - static_cast<double>(eahn) / static_cast<double>(huffman));
  }
};

struct BenchOptions {
  std::vector<unsigned> orders{1};
  std::vector<Mode> modes{Mode::offline};
  unsigned jobs = 1;
  bool check_bounds = false;
};

struct BenchReport {
  std::vector<BenchRow> rows;   // sorted by (file, order, mode)
  std::vector<BenchRow> totals; // one per (order, mode), file = "TOTAL"
  std::vector<std::string> warnings;
  std::size_t bound_violations = 0;
};

inline std::string_view mode_name(Mode m) {
  return m == Mode::online ? "online" : "offline";
}

/// Compresses `data` with both coders, checks both round trips, and records
/// the sizes.  A failed round trip throws corrupt_stream.
inline BenchRow bench_buffer(std::string name, std::span<const std::uint8_t> data,
                             unsigned order, Mode mode) {
  BenchRow row;
  row.file = std::move(name);
  row.order = order;
  row.mode = mode;
  row.original = data.size();

  const auto baseline = huffman0_compress(data);
  const auto back0 = huffman0_decompress(baseline);
  detail::require_stream(std::equal(back0.begin(), back0.end(), data.begin(), data.end()),
                         "baseline round trip failed for " + row.file);
  row.huffman = baseline.size();

  CompressOptions options;
  options.order = order;
  options.mode = mode;
  const auto packed = compress(data, options);
  const auto back = decompress(packed);
  detail::require_stream(std::equal(back.begin(), back.end(), data.begin(), data.end()),
                         "round trip failed for " + row.file);
  row.eahn = packed.size();
  return row;
}

inline BenchRow bench_total(std::span<const BenchRow> rows, unsigned order, Mode mode) {
  BenchRow total;
  total.file = "TOTAL";
  total.order = order;
  total.mode = mode;
  for (const auto &r : rows) {
    if (r.order == order && r.mode == mode) {
      total.original += r.original;
      total.huffman += r.huffman;
      total.eahn += r.eahn;
    }
  }
  return total;
}

inline std::vector<std::uint8_t> read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Benchmarks every regular file directly inside `dir`.
inline BenchReport run_bench(const std::filesystem::path &dir, const BenchOptions &options) {
  std::vector<std::filesystem::path> files;
  for (const auto &entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file()) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  struct Slot {
    std::vector<BenchRow> rows;
    std::vector<std::string> warnings;
    std::size_t violations = 0;
  };
  std::vector<Slot> slots(files.size());
  const unsigned jobs = std::max(1U, std::min<unsigned>(options.jobs,
                                                        static_cast<unsigned>(files.size())));
  detail::fork_join(jobs, [&](unsigned w) {
    for (std::size_t i = w; i < files.size(); i += jobs) {
      auto &slot = slots[i];
      std::vector<std::uint8_t> data;
      try {
        data = read_file(files[i]);
      } catch (const std::exception &e) {
        slot.warnings.push_back(std::string("skipped: ") + e.what());
        continue;
      }
      const auto name = files[i].filename().string();
      for (auto order : options.orders) {
        for (auto mode : options.modes) {
          slot.rows.push_back(bench_buffer(name, data, order, mode));
        }
        if (options.check_bounds && data.size() > order) {
          const auto violations = check_context_bounds(eahn_entropy(data, order));
          slot.violations += violations.size();
          for (const auto &v : violations) {
            slot.warnings.push_back(name + ": " + v.what);
          }
        }
      }
    }
  });

  BenchReport report;
  for (auto &slot : slots) {
    report.rows.insert(report.rows.end(), slot.rows.begin(), slot.rows.end());
    report.warnings.insert(report.warnings.end(), slot.warnings.begin(), slot.warnings.end());
    report.bound_violations += slot.violations;
  }
  for (auto order : options.orders) {
    for (auto mode : options.modes) {
      report.totals.push_back(bench_total(report.rows, order, mode));
    }
  }
  return report;
}

inline void write_bench_table(std::ostream &out, const BenchReport &report) {
  out << std::left << std::setw(24) << "file" << std::right << std::setw(6) << "order"
      << std::setw(9) << "mode" << std::setw(14) << "size" << std::setw(14) << "huffman"
      << std::setw(14) << "eah" << std::setw(10) << "impr%" << '\n';
  auto line = [&](const BenchRow &r) {
    out << std::left << std::setw(24) << r.file << std::right << std::setw(6) << r.order
        << std::setw(9) << mode_name(r.mode) << std::setw(14) << r.original
        << std::setw(14) << r.huffman << std::setw(14) << r.eahn << std::setw(10)
        << std::fixed << std::setprecision(2) << r.improvement() << '\n';
  };
  for (const auto &r : report.rows) {
    line(r);
  }
  for (const auto &r : report.totals) {
    line(r);
  }
  out << "(baseline sizes include a " << kBaselineHeaderBytes
      << "-byte frequency header)\n";
}

inline void write_bench_csv(std::ostream &out, const BenchReport &report) {
  out << "file,order,mode,original,huffman,eah,improvement_percent\n";
  auto line = [&](const BenchRow &r) {
    out << r.file << ',' << r.order << ',' << mode_name(r.mode) << ',' << r.original << ','
        << r.huffman << ',' << r.eahn << ',' << std::fixed << std::setprecision(4)
        << r.improvement() << '\n';
  };
  for (const auto &r : report.rows) {
    line(r);
  }
  for (const auto &r : report.totals) {
    line(r);
  }
}

} // namespace eah
