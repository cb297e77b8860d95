#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "eah/eahn_codec.hpp"
#include "eah/error.hpp"

namespace eah {

inline constexpr double kBoundSlack = 1e-9;

/// k / t.
inline double compression_rate(std::uint64_t compressed_bits, std::uint64_t t) {
  detail::require(t >= 1, "compression rate needs t >= 1");
  return static_cast<double>(compressed_bits) / static_cast<double>(t);
}

struct ContextEntropyRecord {
  std::uint64_t context = 0;
  std::vector<Symbol> followers;         // C(i)
  std::vector<std::uint64_t> frequencies; // F(i, j)
  std::vector<unsigned> lengths;          // L(i, j); 0 for a lone follower
  std::uint64_t positions = 0;            // N(i)
  double entropy = 0.0;                   // E_i
  double rate = 0.0;                      // R_i = sum F L / N

  std::uint64_t payload_bits() const {
    std::uint64_t bits = 0;
    for (std::size_t j = 0; j < frequencies.size(); ++j) {
      bits += frequencies[j] * lengths[j];
    }
    return bits;
  }
};

struct EntropyReport {
  unsigned order = 1;
  std::uint64_t length = 0; // t
  std::vector<ContextEntropyRecord> contexts;
  double entropy_sum = 0.0;      // unweighted sum of E_i over occurring contexts
  double weighted_entropy = 0.0; // sum N(i) E_i / sum N(i)
  std::uint64_t payload_bits = 0;
  double rate = 0.0;             // |Z| / t
  double rate_per_encoded = 0.0; // |Z| / (t - n)

  bool empty() const noexcept { return contexts.empty(); }
};

/// Per-context entropy of one follower distribution, in bits.
inline double context_entropy(std::span<const std::uint64_t> freqs) {
  std::uint64_t n = 0;
  for (auto f : freqs) {
    n += f;
  }
  double sum = 0.0;
  const double nd = static_cast<double>(n);
  for (auto f : freqs) {
    const double fd = static_cast<double>(f);
    sum += fd * (std::log(nd / fd) / std::numbers::ln2);
  }
  return sum / nd;
}

/// Builds the report from an existing model and codebook (same contexts,
/// same order).  Realised lengths come from the codebook.
inline EntropyReport entropy_report(const ContextModel &model, const Codebook &book) {
  detail::require(model.contexts().size() == book.contexts.size(),
                  "codebook does not match the model");
  EntropyReport report;
  report.order = model.order();
  report.length = model.length();
  std::uint64_t weight = 0;
  double weighted = 0.0;
  for (std::size_t i = 0; i < book.contexts.size(); ++i) {
    const auto &stats = model.contexts()[i];
    const auto &code = book.contexts[i];
    detail::require(stats.context == code.context, "codebook does not match the model");
    ContextEntropyRecord rec;
    rec.context = stats.context;
    for (std::size_t j = 0; j < stats.followers.size(); ++j) {
      rec.followers.push_back(stats.followers[j].symbol);
      rec.frequencies.push_back(stats.followers[j].count);
      rec.lengths.push_back(code.words[j].size());
    }
    rec.positions = stats.positions();
    rec.entropy = context_entropy(rec.frequencies);
    rec.rate = static_cast<double>(rec.payload_bits()) / static_cast<double>(rec.positions);
    report.entropy_sum += rec.entropy;
    weighted += static_cast<double>(rec.positions) * rec.entropy;
    weight += rec.positions;
    report.payload_bits += rec.payload_bits();
    report.contexts.push_back(std::move(rec));
  }
  if (weight > 0) {
    report.weighted_entropy = weighted / static_cast<double>(weight);
  }
  if (report.length > 0) {
    report.rate = compression_rate(report.payload_bits, report.length);
  }
  if (report.length > report.order) {
    report.rate_per_encoded =
        compression_rate(report.payload_bits, report.length - report.order);
  }
  return report;
}

/// Entropy report for x under order n; empty when |x| <= n.
inline EntropyReport eahn_entropy(std::span<const Symbol> x, unsigned order) {
  check_order(order);
  if (x.size() <= order) {
    EntropyReport empty;
    empty.order = order;
    empty.length = x.size();
    return empty;
  }
  const auto model = scan_frequencies(x, order);
  return entropy_report(model, build_codebook(model));
}

struct BoundViolation {
  std::uint64_t context = 0;
  double entropy = 0.0;
  double rate = 0.0;
  std::string what;
};

/// Per-context Huffman bound E_i <= R_i <= E_i + 1 for multi-follower
/// contexts, plus the weighted global form
/// sum N(i) E_i <= |Z| <= sum N(i) (E_i + 1).
inline std::vector<BoundViolation> check_context_bounds(const EntropyReport &report) {
  std::vector<BoundViolation> violations;
  double lower = 0.0;
  double upper = 0.0;
  std::uint64_t payload = 0;
  for (const auto &rec : report.contexts) {
    const double n = static_cast<double>(rec.positions);
    lower += n * rec.entropy;
    upper += n * (rec.entropy + 1.0);
    payload += rec.payload_bits();
    if (rec.followers.size() < 2) {
      continue;
    }
    // Rate recomputed from the attached lengths, not the cached field.
    const double rate = static_cast<double>(rec.payload_bits()) / n;
    if (rate < rec.entropy - kBoundSlack) {
      violations.push_back({rec.context, rec.entropy, rate, "rate below entropy"});
    } else if (rate > rec.entropy + 1.0 + kBoundSlack) {
      violations.push_back({rec.context, rec.entropy, rate, "rate above entropy + 1"});
    }
  }
  const double z = static_cast<double>(payload);
  const double slack = kBoundSlack * std::max(1.0, upper);
  if (z < lower - slack || z > upper + slack) {
    violations.push_back({0, lower, z, "payload outside weighted global bound"});
  }
  return violations;
}

} // namespace eah
