#pragma once

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "eah/eahn_codec.hpp"
#include "eah/error.hpp"

namespace eah {

/// Worker count: EAH_THREADS in the environment wins over `requested`.
inline unsigned resolve_worker_count(unsigned requested) {
  if (const char *env = std::getenv("EAH_THREADS"); env != nullptr && *env != '\0') {
    try {
      const unsigned long value = std::stoul(env);
      if (value >= 1) {
        return static_cast<unsigned>(std::min<unsigned long>(value, 1024));
      }
    } catch (const std::exception &) {
      // fall through to the requested count
    }
  }
  return std::max(requested, 1U);
}

namespace detail {

// Runs body(worker) on `workers` threads and joins; the first exception
// thrown by any worker is rethrown after the join.
template <typename Body> void fork_join(unsigned workers, Body body) {
  if (workers <= 1) {
    body(0U);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        try {
          body(w);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) {
            failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
}

// Debug-only audit that each slot is touched by a single worker.
class OwnershipAudit {
public:
  explicit OwnershipAudit([[maybe_unused]] std::size_t slots) {
#ifndef NDEBUG
    owners_ = std::vector<std::atomic<unsigned>>(slots);
    for (auto &o : owners_) {
      o.store(kFree, std::memory_order_relaxed);
    }
#endif
  }

  void claim([[maybe_unused]] std::size_t slot, [[maybe_unused]] unsigned worker) {
#ifndef NDEBUG
    unsigned expected = kFree;
    const bool fresh = owners_[slot].compare_exchange_strong(expected, worker);
    assert((fresh || expected == worker) && "context slot shared between workers");
#endif
  }

  void reset() {
#ifndef NDEBUG
    for (auto &o : owners_) {
      o.store(kFree, std::memory_order_relaxed);
    }
#endif
  }

private:
  [[maybe_unused]] static constexpr unsigned kFree = ~0U;
#ifndef NDEBUG
  std::vector<std::atomic<unsigned>> owners_;
#endif
};

} // namespace detail

/// Same output as eahn_encode, with per-context Huffman construction and
/// Y_j assembly spread across workers.  Contexts are dealt round-robin by
/// index, so every context's frequencies and result slot belong to exactly
/// one worker.  Scan, Y concatenation and payload emission stay sequential.
inline EahnOutput eahn_encode_parallel(std::span<const Symbol> x, unsigned order,
                                       unsigned workers) {
  detail::require(workers >= 1, "need at least one worker");
  const auto model = scan_frequencies(x, order);
  const auto stats = model.contexts();
  const std::size_t count = stats.size();
  const unsigned active =
      static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));

  Codebook book;
  book.order = order;
  book.contexts.resize(count);
  detail::OwnershipAudit audit(count);
  detail::fork_join(active, [&](unsigned w) {
    for (std::size_t j = w; j < count; j += active) {
      audit.claim(j, w);
      book.contexts[j] = build_context_code(stats[j]);
    }
  });

  audit.reset();
  std::vector<std::vector<Codeword>> parts(count);
  detail::fork_join(active, [&](unsigned w) {
    for (std::size_t j = w; j < count; j += active) {
      audit.claim(j, w);
      const auto &code = book.contexts[j];
      if (code.multi()) {
        parts[j] = code.words;
      }
    }
  });

  std::vector<Codeword> y;
  for (auto &part : parts) {
    y.insert(y.end(), part.begin(), part.end());
  }
  return assemble_output(x, book, std::move(y));
}

} // namespace eah
