#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "decomine/itemset.hpp"

namespace decomine {

// N binary transactions over K named attributes. Immutable after
// construction; every query method is const and thread-safe.
class TransactionDataset {
 public:
  // Each row is the set of attributes equal to 1 in that transaction.
  TransactionDataset(std::vector<std::string> names, std::vector<Itemset> rows);

  std::size_t num_rows() const { return rows_.size(); }
  std::size_t num_attributes() const { return names_.size(); }
  const std::vector<Itemset>& rows() const { return rows_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(AttributeId a) const { return names_.at(a); }
  std::optional<AttributeId> find(std::string_view token) const;

  Itemset all_attributes() const { return Itemset::FirstN(names_.size()); }
  // Throws ScopeError when x mentions an attribute >= K.
  void check_scope(const Itemset& x) const;

  // Number of rows containing every member of x (x = {} gives N).
  std::uint64_t support_count(const Itemset& x) const;
  // Row-membership bitmap of attribute a: bit r is set when row r has a.
  std::span<const std::uint64_t> column(AttributeId a) const;
  std::size_t words_per_column() const { return words_per_column_; }

  // "a b c" using attribute names.
  std::string format(const Itemset& x) const;
  // Whitespace-separated tokens to an itemset; nullopt if a token is unknown.
  std::optional<Itemset> parse(std::string_view tokens) const;

  // Rows repeated `times` times (used to check N-scaling identities).
  TransactionDataset replicated(std::size_t times) const;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, AttributeId> index_;
  std::vector<Itemset> rows_;
  std::size_t words_per_column_ = 0;
  std::vector<std::uint64_t> columns_;
};

// Default attribute names for dense data: a..z for K <= 26, otherwise
// x000, x001, ... padded so string order equals index order.
std::vector<std::string> default_attribute_names(std::size_t k);

// Empirical distribution of the columns in `scope`. Only observed patterns
// are stored. A pattern is the subset of scope equal to 1.
class MarginalTable {
 public:
  struct Cell {
    Itemset ones;
    std::uint64_t count;
  };

  MarginalTable(Itemset scope, std::uint64_t total, std::vector<Cell> cells);

  const Itemset& scope() const { return scope_; }
  std::uint64_t total() const { return total_; }
  // Sorted by pattern.
  const std::vector<Cell>& cells() const { return cells_; }

  std::uint64_t count(const Itemset& ones) const;
  double probability(const Itemset& ones) const;

 private:
  Itemset scope_;
  std::uint64_t total_;
  std::vector<Cell> cells_;
};

MarginalTable project(const TransactionDataset& d, const Itemset& x);
double frequency(const TransactionDataset& d, const Itemset& x);
// Shannon entropy in nats with 0 log 0 = 0.
double entropy(const MarginalTable& m);
// Same value as entropy(project(d, x)) without materializing the table.
double entropy(const TransactionDataset& d, const Itemset& x);

// Memoizes itemset entropies for one dataset. Not thread-safe.
class EntropyCache {
 public:
  explicit EntropyCache(const TransactionDataset& d) : data_(&d) {}
  double operator()(const Itemset& x);
  const TransactionDataset& dataset() const { return *data_; }
  std::size_t size() const { return cache_.size(); }

 private:
  const TransactionDataset* data_;
  std::unordered_map<Itemset, double, ItemsetHash> cache_;
};

// Item 0 is a fair coin; item i copies item i-1 and flips it with
// probability flip_prob. Output is a pure function of the arguments.
TransactionDataset generate_path_dataset(std::size_t n_items, std::size_t n_rows,
                                         double flip_prob, std::uint64_t seed);

enum class DataFormat { kTokens, kDense };

// Tokens: one transaction per line, whitespace-separated item names; the
// attribute table is the sorted set of distinct tokens.
// Dense: equal-length lines of '0'/'1'.
TransactionDataset read_transactions(std::istream& in, DataFormat format);
TransactionDataset load_transactions(const std::string& path, DataFormat format);
void write_transactions(std::ostream& out, const TransactionDataset& d,
                        DataFormat format);

// 64-bit FNV-1a over names and rows, rendered as hex.
std::string dataset_digest(const TransactionDataset& d);

}  // namespace decomine
