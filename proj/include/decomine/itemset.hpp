#pragma once

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace decomine {

using AttributeId = std::uint32_t;

// A set of attribute indices. Attributes 0..63 live in an inline word, so
// datasets with K <= 64 never allocate; higher attributes spill into a
// heap-allocated tail of 64-bit words (kept trimmed, so equality is
// structural). Ordering is lexicographic over the ascending member list.
class Itemset {
 public:
  Itemset() = default;
  Itemset(std::initializer_list<AttributeId> members);

  static Itemset FromMembers(std::span<const AttributeId> members);
  static Itemset Single(AttributeId a);
  // {0, 1, ..., count - 1}
  static Itemset FirstN(std::size_t count);
  static Itemset FromWord(std::uint64_t word) {
    Itemset s;
    s.low_ = word;
    return s;
  }

  bool contains(AttributeId a) const {
    const std::size_t w = a / 64;
    return (word(w) >> (a % 64)) & 1U;
  }
  void insert(AttributeId a);
  void erase(AttributeId a);

  std::size_t size() const;
  bool empty() const { return low_ == 0 && high_.empty(); }

  bool is_subset_of(const Itemset& other) const;
  bool intersects(const Itemset& other) const;

  Itemset operator|(const Itemset& other) const;
  Itemset operator&(const Itemset& other) const;
  // Set difference.
  Itemset operator-(const Itemset& other) const;
  Itemset& operator|=(const Itemset& other) { return *this = *this | other; }
  Itemset& operator&=(const Itemset& other) { return *this = *this & other; }
  Itemset& operator-=(const Itemset& other) { return *this = *this - other; }

  std::vector<AttributeId> members() const;

  // Calls fn(AttributeId) for each member in ascending order.
  template <class Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t w = 0; w < num_words(); ++w) {
      std::uint64_t bits = word(w);
      while (bits != 0) {
        const int b = std::countr_zero(bits);
        fn(static_cast<AttributeId>(w * 64 + b));
        bits &= bits - 1;
      }
    }
  }

  // Smallest member; undefined for the empty set.
  AttributeId front() const;

  std::size_t num_words() const { return 1 + high_.size(); }
  std::uint64_t word(std::size_t w) const {
    if (w == 0) return low_;
    return w - 1 < high_.size() ? high_[w - 1] : 0;
  }
  // True when every member is below 64.
  bool is_single_word() const { return high_.empty(); }

  std::size_t hash() const;

  friend bool operator==(const Itemset& a, const Itemset& b) {
    return a.low_ == b.low_ && a.high_ == b.high_;
  }
  friend std::strong_ordering operator<=>(const Itemset& a, const Itemset& b);

 private:
  void set_word(std::size_t w, std::uint64_t value);
  void trim();

  std::uint64_t low_ = 0;
  std::vector<std::uint64_t> high_;
};

struct ItemsetHash {
  std::size_t operator()(const Itemset& s) const { return s.hash(); }
};

// Packs the values of `row` restricted to `scope` into the low bits of a
// word: bit j is the value of the j-th smallest member of scope.
// Requires scope.size() <= 64.
std::uint64_t pack_pattern(const Itemset& row, const Itemset& scope);
// Inverse of pack_pattern.
Itemset unpack_pattern(std::uint64_t packed, const Itemset& scope);

}  // namespace decomine

template <>
struct std::hash<decomine::Itemset> {
  std::size_t operator()(const decomine::Itemset& s) const { return s.hash(); }
};
