#include "decomine/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "decomine/error.hpp"

namespace decomine {

TransactionDataset::TransactionDataset(std::vector<std::string> names,
                                       std::vector<Itemset> rows)
    : names_(std::move(names)), rows_(std::move(rows)) {
  if (names_.empty()) throw ParameterError("dataset needs at least one attribute");
  if (rows_.empty()) throw ParameterError("dataset needs at least one transaction");
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) throw ParameterError("empty attribute name");
    if (!index_.emplace(names_[i], static_cast<AttributeId>(i)).second) {
      throw ParameterError("duplicate attribute name '" + names_[i] + "'");
    }
  }
  const Itemset all = all_attributes();
  words_per_column_ = (rows_.size() + 63) / 64;
  columns_.assign(words_per_column_ * names_.size(), 0);
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (!rows_[r].is_subset_of(all)) {
      throw ScopeError("row " + std::to_string(r) + " mentions an attribute >= K");
    }
    rows_[r].for_each([&](AttributeId a) {
      columns_[a * words_per_column_ + r / 64] |= std::uint64_t{1} << (r % 64);
    });
  }
}

std::optional<AttributeId> TransactionDataset::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void TransactionDataset::check_scope(const Itemset& x) const {
  if (!x.is_subset_of(all_attributes())) {
    throw ScopeError("itemset mentions an attribute outside [0, " +
                     std::to_string(names_.size()) + ")");
  }
}

std::span<const std::uint64_t> TransactionDataset::column(AttributeId a) const {
  return {columns_.data() + static_cast<std::size_t>(a) * words_per_column_,
          words_per_column_};
}

std::uint64_t TransactionDataset::support_count(const Itemset& x) const {
  check_scope(x);
  if (x.empty()) return rows_.size();
  std::vector<std::uint64_t> acc(words_per_column_, ~std::uint64_t{0});
  x.for_each([&](AttributeId a) {
    auto col = column(a);
    for (std::size_t w = 0; w < words_per_column_; ++w) acc[w] &= col[w];
  });
  // Bits past N are zero in every column, so the tail needs no masking.
  std::uint64_t n = 0;
  for (std::uint64_t w : acc) n += static_cast<std::uint64_t>(std::popcount(w));
  return n;
}

std::string TransactionDataset::format(const Itemset& x) const {
  std::string out;
  x.for_each([&](AttributeId a) {
    if (!out.empty()) out += ' ';
    out += names_.at(a);
  });
  return out;
}

std::optional<Itemset> TransactionDataset::parse(std::string_view tokens) const {
  std::istringstream in{std::string(tokens)};
  Itemset x;
  std::string tok;
  while (in >> tok) {
    auto id = find(tok);
    if (!id) return std::nullopt;
    x.insert(*id);
  }
  return x;
}

TransactionDataset TransactionDataset::replicated(std::size_t times) const {
  std::vector<Itemset> rows;
  rows.reserve(rows_.size() * times);
  for (std::size_t t = 0; t < times; ++t) rows.insert(rows.end(), rows_.begin(), rows_.end());
  return TransactionDataset(names_, std::move(rows));
}

std::vector<std::string> default_attribute_names(std::size_t k) {
  std::vector<std::string> names;
  names.reserve(k);
  if (k <= 26) {
    for (std::size_t i = 0; i < k; ++i) names.emplace_back(1, static_cast<char>('a' + i));
    return names;
  }
  const std::size_t width = std::to_string(k - 1).size();
  for (std::size_t i = 0; i < k; ++i) {
    std::string digits = std::to_string(i);
    names.push_back("x" + std::string(width - digits.size(), '0') + digits);
  }
  return names;
}

MarginalTable::MarginalTable(Itemset scope, std::uint64_t total, std::vector<Cell> cells)
    : scope_(std::move(scope)), total_(total), cells_(std::move(cells)) {
  std::sort(cells_.begin(), cells_.end(),
            [](const Cell& a, const Cell& b) { return a.ones < b.ones; });
}

std::uint64_t MarginalTable::count(const Itemset& ones) const {
  auto it = std::lower_bound(cells_.begin(), cells_.end(), ones,
                             [](const Cell& c, const Itemset& v) { return c.ones < v; });
  if (it == cells_.end() || !(it->ones == ones)) return 0;
  return it->count;
}

double MarginalTable::probability(const Itemset& ones) const {
  return static_cast<double>(count(ones)) / static_cast<double>(total_);
}

namespace {

// Run-length counts of the rows restricted to x, in ascending key order.
template <class Fn>
void for_each_pattern_count(const TransactionDataset& d, const Itemset& x, Fn&& fn) {
  const auto& rows = d.rows();
  if (x.is_single_word() && d.num_attributes() <= 64) {
    thread_local std::vector<std::uint64_t> keys;
    keys.resize(rows.size());
    const std::uint64_t mask = x.word(0);
    for (std::size_t r = 0; r < rows.size(); ++r) keys[r] = rows[r].word(0) & mask;
    std::sort(keys.begin(), keys.end());
    std::size_t i = 0;
    while (i < keys.size()) {
      std::size_t j = i + 1;
      while (j < keys.size() && keys[j] == keys[i]) ++j;
      fn(Itemset::FromWord(keys[i]), static_cast<std::uint64_t>(j - i));
      i = j;
    }
    return;
  }
  std::vector<Itemset> keys;
  keys.reserve(rows.size());
  for (const Itemset& row : rows) keys.push_back(row & x);
  std::sort(keys.begin(), keys.end());
  std::size_t i = 0;
  while (i < keys.size()) {
    std::size_t j = i + 1;
    while (j < keys.size() && keys[j] == keys[i]) ++j;
    fn(keys[i], static_cast<std::uint64_t>(j - i));
    i = j;
  }
}

double entropy_term(std::uint64_t count, double n) {
  const double p = static_cast<double>(count) / n;
  return p > 0.0 ? -p * std::log(p) : 0.0;
}

}  // namespace

MarginalTable project(const TransactionDataset& d, const Itemset& x) {
  d.check_scope(x);
  std::vector<MarginalTable::Cell> cells;
  for_each_pattern_count(d, x, [&](Itemset ones, std::uint64_t c) {
    cells.push_back({std::move(ones), c});
  });
  return MarginalTable(x, d.num_rows(), std::move(cells));
}

double frequency(const TransactionDataset& d, const Itemset& x) {
  return static_cast<double>(d.support_count(x)) / static_cast<double>(d.num_rows());
}

double entropy(const MarginalTable& m) {
  const double n = static_cast<double>(m.total());
  double h = 0.0;
  for (const auto& cell : m.cells()) h += entropy_term(cell.count, n);
  return h;
}

double entropy(const TransactionDataset& d, const Itemset& x) {
  d.check_scope(x);
  if (x.empty()) return 0.0;
  const double n = static_cast<double>(d.num_rows());
  double h = 0.0;
  for_each_pattern_count(d, x, [&](const Itemset&, std::uint64_t c) {
    h += entropy_term(c, n);
  });
  return h;
}

double EntropyCache::operator()(const Itemset& x) {
  auto it = cache_.find(x);
  if (it != cache_.end()) return it->second;
  const double h = entropy(*data_, x);
  cache_.emplace(x, h);
  return h;
}

TransactionDataset generate_path_dataset(std::size_t n_items, std::size_t n_rows,
                                         double flip_prob, std::uint64_t seed) {
  if (n_items == 0) throw ParameterError("n_items must be >= 1");
  if (n_rows == 0) throw ParameterError("n_rows must be >= 1");
  if (!(flip_prob >= 0.0 && flip_prob <= 1.0)) {
    throw ParameterError("flip probability must lie in [0, 1]");
  }
  std::mt19937_64 rng(seed);
  // Explicit 53-bit uniforms so the stream does not depend on the
  // standard library's distribution implementations.
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<Itemset> rows;
  rows.reserve(n_rows);
  for (std::size_t r = 0; r < n_rows; ++r) {
    Itemset row;
    bool value = uniform() < 0.5;
    if (value) row.insert(0);
    for (std::size_t i = 1; i < n_items; ++i) {
      if (uniform() < flip_prob) value = !value;
      if (value) row.insert(static_cast<AttributeId>(i));
    }
    rows.push_back(std::move(row));
  }
  return TransactionDataset(default_attribute_names(n_items), std::move(rows));
}

namespace {

TransactionDataset read_tokens(std::istream& in) {
  std::vector<std::vector<std::string>> lines;
  std::set<std::string> vocabulary;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    std::string tok;
    while (ls >> tok) {
      vocabulary.insert(tok);
      tokens.push_back(std::move(tok));
    }
    lines.push_back(std::move(tokens));
  }
  if (lines.empty()) throw ParseError("no transactions");
  if (vocabulary.empty()) throw ParseError("no items in any transaction");
  std::vector<std::string> names(vocabulary.begin(), vocabulary.end());
  std::map<std::string, AttributeId, std::less<>> index;
  for (std::size_t i = 0; i < names.size(); ++i) index[names[i]] = static_cast<AttributeId>(i);
  std::vector<Itemset> rows;
  rows.reserve(lines.size());
  for (const auto& tokens : lines) {
    Itemset row;
    for (const auto& t : tokens) row.insert(index.at(t));
    rows.push_back(std::move(row));
  }
  return TransactionDataset(std::move(names), std::move(rows));
}

TransactionDataset read_dense(std::istream& in) {
  std::vector<Itemset> rows;
  std::size_t width = 0;
  std::size_t line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (rows.empty()) width = line.size();
    if (line.size() != width) {
      throw ParseError("expected " + std::to_string(width) + " columns, got " +
                           std::to_string(line.size()),
                       line_no);
    }
    Itemset row;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '1') {
        row.insert(static_cast<AttributeId>(i));
      } else if (line[i] != '0') {
        throw ParseError(std::string("unexpected character '") + line[i] + "'", line_no);
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("no transactions");
  return TransactionDataset(default_attribute_names(width), std::move(rows));
}

}  // namespace

TransactionDataset read_transactions(std::istream& in, DataFormat format) {
  return format == DataFormat::kDense ? read_dense(in) : read_tokens(in);
}

TransactionDataset load_transactions(const std::string& path, DataFormat format) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_transactions(in, format);
}

void write_transactions(std::ostream& out, const TransactionDataset& d,
                        DataFormat format) {
  for (const Itemset& row : d.rows()) {
    if (format == DataFormat::kDense) {
      for (std::size_t i = 0; i < d.num_attributes(); ++i) {
        out << (row.contains(static_cast<AttributeId>(i)) ? '1' : '0');
      }
    } else {
      out << d.format(row);
    }
    out << '\n';
  }
}

std::string dataset_digest(const TransactionDataset& d) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& name : d.names()) {
    feed(name.data(), name.size());
    feed("\0", 1);
  }
  for (const Itemset& row : d.rows()) {
    for (std::size_t w = 0; w < row.num_words(); ++w) {
      const std::uint64_t word = row.word(w);
      feed(&word, sizeof word);
    }
    feed("\n", 1);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace decomine
