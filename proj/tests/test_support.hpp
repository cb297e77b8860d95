#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "eah/adaptive_code.hpp"

namespace eah::test {

inline std::vector<Symbol> bytes_of(std::string_view text) {
  return {text.begin(), text.end()};
}

inline std::string text_of(const std::vector<Symbol> &x) {
  return {x.begin(), x.end()};
}

/// Uniform string over {base, base+1, ..., base+alphabet-1}.
inline std::vector<Symbol> random_string(std::mt19937_64 &rng, std::size_t length,
                                         unsigned alphabet, Symbol base = 0) {
  std::uniform_int_distribution<unsigned> pick(0, alphabet - 1);
  std::vector<Symbol> x(length);
  for (auto &s : x) {
    s = static_cast<Symbol>(base + pick(rng));
  }
  return x;
}

/// Order-1 Markov text with a sparse random transition structure, so
/// contexts have a handful of skewed followers.
inline std::vector<Symbol> markov_string(std::mt19937_64 &rng, std::size_t length,
                                         unsigned alphabet, unsigned fanout) {
  std::vector<std::vector<Symbol>> next(alphabet);
  std::uniform_int_distribution<unsigned> pick(0, alphabet - 1);
  for (auto &row : next) {
    for (unsigned k = 0; k < fanout; ++k) {
      row.push_back(static_cast<Symbol>(pick(rng)));
    }
  }
  std::geometric_distribution<unsigned> skew(0.45);
  std::vector<Symbol> x;
  x.reserve(length);
  Symbol cur = static_cast<Symbol>(pick(rng));
  for (std::size_t i = 0; i < length; ++i) {
    x.push_back(cur);
    cur = next[cur][std::min(skew(rng), fanout - 1)];
  }
  return x;
}

inline std::string data_path(const std::string &name) {
  return std::string(EAH_TEST_DATA_DIR) + "/" + name;
}

} // namespace eah::test
