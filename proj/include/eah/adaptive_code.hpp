#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "eah/bits.hpp"
#include "eah/error.hpp"

namespace eah {

using Symbol = std::uint8_t;

/// Finite alphabet kept in ascending symbol order.
class Alphabet {
public:
  Alphabet() = default;
  explicit Alphabet(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {
    std::sort(symbols_.begin(), symbols_.end());
    detail::require(std::adjacent_find(symbols_.begin(), symbols_.end()) ==
                        symbols_.end(),
                    "alphabet symbols must be distinct");
    detail::require(!symbols_.empty(), "alphabet must be nonempty");
  }

  /// {0, 1, ..., size-1}.
  static Alphabet first(unsigned size) {
    detail::require(size >= 1 && size <= 256, "alphabet size out of range");
    std::vector<Symbol> symbols(size);
    for (unsigned i = 0; i < size; ++i) {
      symbols[i] = static_cast<Symbol>(i);
    }
    return Alphabet(std::move(symbols));
  }

  std::span<const Symbol> symbols() const noexcept { return symbols_; }
  std::size_t size() const noexcept { return symbols_.size(); }
  bool contains(Symbol s) const {
    return std::binary_search(symbols_.begin(), symbols_.end(), s);
  }

private:
  std::vector<Symbol> symbols_;
};

/// Context string of length 0..n; the empty key is the empty context.
using ContextKey = std::vector<Symbol>;

struct ContextLess {
  using is_transparent = void;
  template <typename A, typename B> bool operator()(const A &a, const B &b) const {
    return std::lexicographical_compare(std::begin(a), std::end(a),
                                        std::begin(b), std::end(b));
  }
};

/// Explicit mapping (symbol, context) -> codeword for an adaptive code of
/// order n.  Absent entries stand for the empty word.
class AdaptiveCodeTable {
public:
  using Column = std::map<Symbol, Codeword>;

  AdaptiveCodeTable(Alphabet alphabet, unsigned order)
      : alphabet_(std::move(alphabet)), order_(order) {
    detail::require(order >= 1, "order must be positive");
  }

  void set(Symbol symbol, const ContextKey &context, Codeword word) {
    detail::require(context.size() <= order_, "context longer than the order");
    detail::require(alphabet_.contains(symbol), "symbol not in alphabet");
    detail::require(!word.empty(), "table codewords must be nonempty");
    columns_[context][symbol] = word;
  }

  const Codeword *find(Symbol symbol, std::span<const Symbol> context) const {
    const auto col = columns_.find(context);
    if (col == columns_.end()) {
      return nullptr;
    }
    const auto it = col->second.find(symbol);
    return it == col->second.end() ? nullptr : &it->second;
  }

  const Codeword &at(Symbol symbol, std::span<const Symbol> context) const {
    if (const auto *word = find(symbol, context)) {
      return *word;
    }
    std::ostringstream msg;
    msg << "no codeword for symbol " << static_cast<unsigned>(symbol)
        << " in context [";
    for (std::size_t i = 0; i < context.size(); ++i) {
      msg << (i ? " " : "") << static_cast<unsigned>(context[i]);
    }
    msg << "]";
    throw lookup_error(msg.str());
  }

  const Alphabet &alphabet() const noexcept { return alphabet_; }
  unsigned order() const noexcept { return order_; }
  const std::map<ContextKey, Column, ContextLess> &columns() const noexcept {
    return columns_;
  }

private:
  Alphabet alphabet_;
  unsigned order_;
  std::map<ContextKey, Column, ContextLess> columns_;
};

/// Concatenates c(x_i, context_i) where context_i is the (up to n) symbols
/// before position i.  Short contexts at the start are used literally.
inline BitString encode_extension(const AdaptiveCodeTable &table,
                                  std::span<const Symbol> input) {
  BitString out;
  const std::size_t n = table.order();
  for (std::size_t i = 0; i < input.size(); ++i) {
    const std::size_t from = i > n ? i - n : 0;
    out.append(table.at(input[i], input.subspan(from, i - from)));
  }
  return out;
}

/// Distinct words, none a proper prefix of another.
inline bool is_prefix_free(std::span<const Codeword> words) {
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (std::size_t j = 0; j < words.size(); ++j) {
      if (i != j && words[i].is_prefix_of(words[j])) {
        return false;
      }
    }
  }
  return true;
}

/// Sufficient condition for an adaptive code: every stored context column
/// is a prefix code.
inline bool verify_prefix_contexts(const AdaptiveCodeTable &table) {
  std::vector<Codeword> words;
  for (const auto &[context, column] : table.columns()) {
    words.clear();
    for (const auto &[symbol, word] : column) {
      words.push_back(word);
    }
    if (!is_prefix_free(words)) {
      return false;
    }
  }
  return true;
}

/// Bounded injectivity oracle: encodes every input of length <= max_len and
/// looks for a collision.  Missing entries surface as lookup_error.
inline bool check_injectivity_bruteforce(const AdaptiveCodeTable &table,
                                         unsigned max_len,
                                         std::size_t max_inputs = 1U << 22) {
  detail::require(max_len >= 1, "max_len must be positive");
  const auto symbols = table.alphabet().symbols();
  const std::size_t p = symbols.size();

  std::size_t total = 1;
  std::size_t layer = 1;
  for (unsigned len = 1; len <= max_len; ++len) {
    layer *= p;
    total += layer;
    detail::require(total <= max_inputs, "enumeration too large");
  }

  std::unordered_set<std::string> seen;
  seen.reserve(total);
  seen.insert(std::string{});
  std::vector<std::size_t> digits;
  std::vector<Symbol> input;
  for (unsigned len = 1; len <= max_len; ++len) {
    digits.assign(len, 0);
    input.assign(len, symbols[0]);
    while (true) {
      if (!seen.insert(encode_extension(table, input).to_string()).second) {
        return false;
      }
      std::size_t pos = len;
      while (pos > 0 && ++digits[pos - 1] == p) {
        digits[pos - 1] = 0;
        input[pos - 1] = symbols[0];
        --pos;
      }
      if (pos == 0) {
        break;
      }
      input[pos - 1] = symbols[digits[pos - 1]];
    }
  }
  return true;
}

// Plain-text table: the first non-comment line lists the context columns
// ("-" is the empty context); each following line is a one-character symbol
// and one codeword per column ("-" leaves the entry absent).  '#' starts a
// comment.  The order is the longest context length in the header.
inline AdaptiveCodeTable parse_table_fixture(std::istream &in) {
  std::vector<ContextKey> header;
  std::vector<std::pair<Symbol, std::vector<std::string>>> rows;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream tokens(line);
    std::vector<std::string> fields;
    for (std::string tok; tokens >> tok;) {
      fields.push_back(tok);
    }
    if (fields.empty()) {
      continue;
    }
    if (!have_header) {
      for (const auto &tok : fields) {
        header.push_back(tok == "-" ? ContextKey{}
                                    : ContextKey(tok.begin(), tok.end()));
      }
      have_header = true;
      continue;
    }
    if (fields.front().size() != 1 || fields.size() != header.size() + 1) {
      throw contract_error("table row must be a symbol plus one word per column");
    }
    rows.emplace_back(static_cast<Symbol>(fields.front()[0]),
                      std::vector<std::string>(fields.begin() + 1, fields.end()));
  }
  detail::require(have_header && !rows.empty(), "table fixture is empty");

  std::size_t order = 1;
  for (const auto &ctx : header) {
    order = std::max(order, ctx.size());
  }
  std::vector<Symbol> symbols;
  for (const auto &row : rows) {
    symbols.push_back(row.first);
  }
  AdaptiveCodeTable table(Alphabet(symbols), static_cast<unsigned>(order));
  for (const auto &[symbol, words] : rows) {
    for (std::size_t col = 0; col < header.size(); ++col) {
      if (words[col] != "-") {
        table.set(symbol, header[col], Codeword::from_string(words[col]));
      }
    }
  }
  return table;
}

inline AdaptiveCodeTable load_table_fixture(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open table fixture " + path);
  }
  return parse_table_fixture(in);
}

} // namespace eah
