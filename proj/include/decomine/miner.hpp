#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "decomine/dataset.hpp"
#include "decomine/itemset.hpp"

namespace decomine {

// Itemsets with their support counts out of a fixed number of rows.
// Frequencies are count / num_rows, computed the same way as
// frequency(d, x), so the two agree bit for bit.
class CandidateFamily {
 public:
  struct Entry {
    std::uint64_t count = 0;
    // A singleton kept below min_support because every tree starts from
    // single items.
    bool forced = false;
  };

  CandidateFamily(std::uint64_t num_rows, double min_support);

  std::uint64_t num_rows() const { return num_rows_; }
  double min_support() const { return min_support_; }
  std::size_t size() const { return entries_.size(); }

  void insert(const Itemset& x, std::uint64_t count, bool forced = false);
  bool contains(const Itemset& x) const { return entries_.count(x) != 0; }
  // nullopt when x is not a member.
  std::optional<std::uint64_t> count(const Itemset& x) const;
  // Throws std::out_of_range when x is not a member.
  double frequency(const Itemset& x) const;
  bool is_forced(const Itemset& x) const;

  const std::unordered_map<Itemset, Entry, ItemsetHash>& entries() const {
    return entries_;
  }
  // Members ordered by (size, lexicographic members).
  std::vector<Itemset> sorted_members() const;
  // Union of all members.
  Itemset coverage() const;
  // Checks every member's immediate subsets. Returns a violating member and
  // its missing subset, if any.
  std::optional<std::pair<Itemset, Itemset>> closure_violation() const;
  bool is_downward_closed() const { return !closure_violation().has_value(); }

  friend bool operator==(const CandidateFamily& a, const CandidateFamily& b);

 private:
  std::uint64_t num_rows_;
  double min_support_;
  std::unordered_map<Itemset, Entry, ItemsetHash> entries_;
};

bool family_contains(const CandidateFamily& f, const Itemset& x);

// Level-wise Apriori: prefix join, full subset pruning, and one bitmap
// intersection per candidate. Returns every itemset with frequency >=
// min_support plus the empty set and all singletons unconditionally.
CandidateFamily mine_candidates(const TransactionDataset& d, double min_support);

// Downward closure of `generators` with counts taken from `source`.
// Throws FamilyError if some subset is missing from source.
CandidateFamily closure_family(const std::vector<Itemset>& generators,
                               const CandidateFamily& source);

// Family file: "# rows: N" and "# min_support: s" header lines, then one
// "tok1 tok2 ... : frequency" line per itemset ordered by (size,
// lexicographic members). Frequencies are exact decimals of count/N when
// such an expansion terminates, otherwise 17 significant digits.
void write_family(std::ostream& out, const CandidateFamily& f,
                  const std::vector<std::string>& names);
void save_family(const std::string& path, const CandidateFamily& f,
                 const std::vector<std::string>& names);
// Throws ParseError (with line number) on malformed input and FamilyError
// when the result is not downward closed or misses a singleton.
CandidateFamily read_family(std::istream& in, const std::vector<std::string>& names);
CandidateFamily load_family(const std::string& path, const std::vector<std::string>& names);

// Exact decimal expansion of num/den when it terminates, else %.17g.
std::string format_ratio(std::uint64_t num, std::uint64_t den);

}  // namespace decomine
