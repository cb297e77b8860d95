// eah: command-line front end for the context-conditioned Huffman coder.
//
// Exit codes: 0 success, 1 usage, 2 I/O, 3 corrupt stream (or a failed
// verification).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "eah/eah.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kUsage = 1, kIo = 2, kCorrupt = 3 };

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw io_error("cannot open " + path);
  }
  std::vector<std::uint8_t> data{std::istreambuf_iterator<char>(in),
                                 std::istreambuf_iterator<char>()};
  if (in.bad()) {
    throw io_error("read failed: " + path);
  }
  return data;
}

// Writes to a sibling temporary and renames it into place, so a failed run
// never leaves a partial output file behind.
void write_atomically(const std::string &path, const std::vector<std::uint8_t> &bytes) {
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw io_error("cannot create " + tmp.string());
    }
    out.write(reinterpret_cast<const char *>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw io_error("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw io_error("cannot rename onto " + path);
  }
}

std::string show_context(std::uint64_t key, unsigned order) {
  std::ostringstream out;
  for (auto s : eah::unpack_context(key, order)) {
    if (s >= 0x21 && s < 0x7F && s != '\\') {
      out << static_cast<char>(s);
    } else {
      out << "\\x" << std::hex << std::setw(2) << std::setfill('0')
          << static_cast<unsigned>(s) << std::dec;
    }
  }
  return out.str();
}

eah::Mode parse_mode(const std::string &text) {
  return text == "online" ? eah::Mode::online : eah::Mode::offline;
}

int cmd_compress(const std::string &in, const std::string &out, unsigned order,
                 const std::string &mode, unsigned threads, const std::string &format) {
  const auto data = slurp(in);
  eah::CompressOptions options;
  options.order = order;
  options.mode = parse_mode(mode);
  options.threads = threads;
  options.format = format == "v1"   ? eah::Format::v1
                   : format == "v2" ? eah::Format::v2
                                    : eah::Format::automatic;
  // An explicit layout is honoured even when raw storage would be smaller.
  options.raw_fallback = options.format == eah::Format::automatic;
  const auto packed = eah::compress(data, options);
  write_atomically(out, packed);
  const auto env = eah::read_envelope(packed);
  std::cout << "original " << data.size() << " bytes, compressed " << packed.size()
            << " bytes (" << eah::version_name(env.version) << ")";
  if (!data.empty()) {
    std::cout << ", rate " << std::fixed << std::setprecision(4)
              << eah::compression_rate(packed.size() * 8, data.size()) << " bits/byte";
  }
  std::cout << '\n';
  return kOk;
}

int cmd_decompress(const std::string &in, const std::string &out) {
  const auto packed = slurp(in);
  const auto data = eah::decompress(packed);
  write_atomically(out, data);
  std::cout << "decompressed " << data.size() << " bytes\n";
  return kOk;
}

int cmd_entropy(const std::string &in, unsigned order, bool verify) {
  const auto data = slurp(in);
  const auto report = eah::eahn_entropy(data, order);
  std::cout << "order " << report.order << ", length " << report.length << ", contexts "
            << report.contexts.size() << '\n';
  std::cout << std::fixed << std::setprecision(5);
  std::cout << "entropy_sum " << report.entropy_sum << '\n';
  std::cout << "weighted_entropy " << report.weighted_entropy << '\n';
  std::cout << "payload_bits " << report.payload_bits << '\n';
  std::cout << "rate " << report.rate << '\n';
  std::cout << "rate_per_encoded " << report.rate_per_encoded << '\n';
  for (const auto &rec : report.contexts) {
    std::cout << "ctx\t" << show_context(rec.context, report.order) << '\t' << rec.positions
              << '\t' << rec.entropy << '\t' << rec.rate << '\n';
  }
  if (verify) {
    const auto violations = eah::check_context_bounds(report);
    for (const auto &v : violations) {
      std::cout << "violation\t" << show_context(v.context, report.order) << '\t' << v.what
                << '\n';
    }
    std::cout << "bounds " << (violations.empty() ? "ok" : "FAILED") << '\n';
    return violations.empty() ? kOk : kCorrupt;
  }
  return kOk;
}

int cmd_bench(const std::string &dir, const std::vector<unsigned> &orders,
              const std::vector<std::string> &modes, unsigned jobs, bool verify,
              const std::string &csv) {
  if (!fs::is_directory(dir)) {
    throw io_error("not a directory: " + dir);
  }
  eah::BenchOptions options;
  options.orders = orders;
  options.modes.clear();
  for (const auto &m : modes) {
    options.modes.push_back(parse_mode(m));
  }
  options.jobs = jobs;
  options.check_bounds = verify;
  const auto report = eah::run_bench(dir, options);
  for (const auto &w : report.warnings) {
    std::cerr << "warning: " << w << '\n';
  }
  eah::write_bench_table(std::cout, report);
  if (!csv.empty()) {
    std::ostringstream text;
    eah::write_bench_csv(text, report);
    const auto s = text.str();
    write_atomically(csv, std::vector<std::uint8_t>(s.begin(), s.end()));
  }
  if (verify) {
    std::cout << "bounds " << (report.bound_violations == 0 ? "ok" : "FAILED") << '\n';
    return report.bound_violations == 0 ? kOk : kCorrupt;
  }
  return kOk;
}

int cmd_inspect(const std::string &in) {
  const auto packed = slurp(in);
  const auto env = eah::read_envelope(packed);
  std::cout << "version " << eah::version_name(env.version) << '\n'
            << "order " << static_cast<unsigned>(env.order) << '\n'
            << "length " << env.length << '\n'
            << "container_bytes " << packed.size() << '\n';
  if (env.version != eah::Version::v1) {
    return kOk;
  }
  const auto layout = eah::inspect_v1(packed);
  static constexpr const char *kNames[9] = {"pad_count", "padding",   "first_symbol",
                                            "maxlc",     "contexts",  "followers",
                                            "occurrence", "codewords", "payload"};
  for (std::size_t i = 0; i < 9; ++i) {
    std::cout << 'Z' << (i + 1) << '\t' << kNames[i] << '\t' << layout.widths[i] << " bits\n";
  }
  std::cout << "padding_bits " << layout.padding << '\n'
            << "first_symbol " << static_cast<unsigned>(layout.first_symbol) << '\n'
            << "MAXLC " << layout.maxlc << '\n'
            << "NC " << layout.contexts << '\n'
            << "NL " << layout.followers << '\n'
            << "codeword_count " << layout.codewords << '\n'
            << "total_body_bits " << layout.total_bits() << '\n';
  return kOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"EAH context-conditioned Huffman compressor"};
  app.require_subcommand(1);

  std::string input;
  std::string output;
  unsigned order = 1;
  std::string mode = "offline";
  unsigned threads = 1;
  std::string format = "auto";
  bool verify = false;
  std::string csv;
  std::vector<unsigned> orders;
  std::vector<std::string> modes;

  const auto order_range = CLI::Range(1U, eah::kMaxOrder);

  auto *compress = app.add_subcommand("compress", "compress a file");
  compress->add_option("input", input)->required();
  compress->add_option("output", output)->required();
  compress->add_option("--order,-n", order, "context order")->check(order_range);
  compress->add_option("--mode", mode)->check(CLI::IsMember({"offline", "online"}));
  compress->add_option("--threads", threads, "encoder workers (EAH_THREADS overrides)")
      ->check(CLI::PositiveNumber);
  compress->add_option("--format", format, "v1, v2, or auto (auto may store raw)")
      ->check(CLI::IsMember({"v1", "v2", "auto"}));

  auto *decompress = app.add_subcommand("decompress", "restore a compressed file");
  decompress->add_option("input", input)->required();
  decompress->add_option("output", output)->required();

  auto *entropy = app.add_subcommand("entropy", "per-context entropy report");
  entropy->add_option("input", input)->required();
  entropy->add_option("--order,-n", order)->check(order_range);
  entropy->add_flag("--verify", verify, "check the per-context Huffman bounds");

  auto *bench = app.add_subcommand("bench", "compare against order-0 Huffman on a directory");
  bench->add_option("corpus", input)->required();
  bench->add_option("--order,-n", orders, "orders to run (repeatable or comma list)")
      ->delimiter(',')
      ->check(order_range);
  bench->add_option("--mode", modes)->delimiter(',')->check(
      CLI::IsMember({"offline", "online"}));
  bench->add_option("--threads", threads, "files processed concurrently")
      ->check(CLI::PositiveNumber);
  bench->add_flag("--verify", verify, "also check per-context bounds");
  bench->add_option("--csv", csv, "write rows as CSV");

  auto *inspect = app.add_subcommand("inspect", "dump container fields");
  inspect->add_option("input", input)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*compress) {
      if (format == "v1" && order != 1) {
        std::cerr << "error: --format v1 requires --order 1\n";
        return kUsage;
      }
      if (mode == "online" && format != "auto") {
        std::cerr << "error: --format applies to offline mode only\n";
        return kUsage;
      }
      return cmd_compress(input, output, order, mode, threads, format);
    }
    if (*decompress) {
      return cmd_decompress(input, output);
    }
    if (*entropy) {
      return cmd_entropy(input, order, verify);
    }
    if (*bench) {
      if (orders.empty()) {
        orders.push_back(1);
      }
      if (modes.empty()) {
        modes.push_back("offline");
      }
      return cmd_bench(input, orders, modes, threads, verify, csv);
    }
    if (*inspect) {
      return cmd_inspect(input);
    }
  } catch (const io_error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const eah::corrupt_stream &e) {
    std::cerr << "error: corrupt stream: " << e.what() << '\n';
    return kCorrupt;
  } catch (const eah::format_error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCorrupt;
  } catch (const eah::contract_error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  }
  return kUsage;
}
