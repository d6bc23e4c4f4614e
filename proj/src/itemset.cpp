#include "decomine/itemset.hpp"

#include <algorithm>
#include <stdexcept>

namespace decomine {

Itemset::Itemset(std::initializer_list<AttributeId> members) {
  for (AttributeId a : members) insert(a);
}

Itemset Itemset::FromMembers(std::span<const AttributeId> members) {
  Itemset s;
  for (AttributeId a : members) s.insert(a);
  return s;
}

Itemset Itemset::Single(AttributeId a) {
  Itemset s;
  s.insert(a);
  return s;
}

Itemset Itemset::FirstN(std::size_t count) {
  Itemset s;
  const std::size_t full = count / 64;
  for (std::size_t w = 0; w < full; ++w) s.set_word(w, ~std::uint64_t{0});
  if (count % 64 != 0) s.set_word(full, (std::uint64_t{1} << (count % 64)) - 1);
  s.trim();
  return s;
}

void Itemset::set_word(std::size_t w, std::uint64_t value) {
  if (w == 0) {
    low_ = value;
    return;
  }
  if (high_.size() < w) high_.resize(w, 0);
  high_[w - 1] = value;
}

void Itemset::trim() {
  while (!high_.empty() && high_.back() == 0) high_.pop_back();
}

void Itemset::insert(AttributeId a) {
  const std::size_t w = a / 64;
  set_word(w, word(w) | (std::uint64_t{1} << (a % 64)));
}

void Itemset::erase(AttributeId a) {
  const std::size_t w = a / 64;
  if (w >= num_words()) return;
  set_word(w, word(w) & ~(std::uint64_t{1} << (a % 64)));
  trim();
}

std::size_t Itemset::size() const {
  std::size_t n = static_cast<std::size_t>(std::popcount(low_));
  for (std::uint64_t w : high_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

bool Itemset::is_subset_of(const Itemset& other) const {
  if ((low_ & ~other.low_) != 0) return false;
  for (std::size_t i = 0; i < high_.size(); ++i) {
    const std::uint64_t o = i < other.high_.size() ? other.high_[i] : 0;
    if ((high_[i] & ~o) != 0) return false;
  }
  return true;
}

bool Itemset::intersects(const Itemset& other) const {
  if ((low_ & other.low_) != 0) return true;
  const std::size_t n = std::min(high_.size(), other.high_.size());
  for (std::size_t i = 0; i < n; ++i) {
    if ((high_[i] & other.high_[i]) != 0) return true;
  }
  return false;
}

Itemset Itemset::operator|(const Itemset& other) const {
  Itemset r;
  r.low_ = low_ | other.low_;
  const std::size_t n = std::max(high_.size(), other.high_.size());
  r.high_.resize(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    r.high_[i] = (i < high_.size() ? high_[i] : 0) |
                 (i < other.high_.size() ? other.high_[i] : 0);
  }
  return r;
}

Itemset Itemset::operator&(const Itemset& other) const {
  Itemset r;
  r.low_ = low_ & other.low_;
  const std::size_t n = std::min(high_.size(), other.high_.size());
  r.high_.resize(n, 0);
  for (std::size_t i = 0; i < n; ++i) r.high_[i] = high_[i] & other.high_[i];
  r.trim();
  return r;
}

Itemset Itemset::operator-(const Itemset& other) const {
  Itemset r;
  r.low_ = low_ & ~other.low_;
  r.high_ = high_;
  for (std::size_t i = 0; i < r.high_.size() && i < other.high_.size(); ++i) {
    r.high_[i] &= ~other.high_[i];
  }
  r.trim();
  return r;
}

std::vector<AttributeId> Itemset::members() const {
  std::vector<AttributeId> out;
  out.reserve(size());
  for_each([&](AttributeId a) { out.push_back(a); });
  return out;
}

AttributeId Itemset::front() const {
  for (std::size_t w = 0; w < num_words(); ++w) {
    const std::uint64_t bits = word(w);
    if (bits != 0) return static_cast<AttributeId>(w * 64 + std::countr_zero(bits));
  }
  throw std::logic_error("Itemset::front on empty set");
}

std::size_t Itemset::hash() const {
  // splitmix64 finalizer folded over the words
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  auto mix = [&](std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= h >> 30;
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 27;
    h *= 0x94d049bb133111ebULL;
    h ^= h >> 31;
  };
  mix(low_);
  for (std::uint64_t w : high_) mix(w);
  return static_cast<std::size_t>(h);
}

std::strong_ordering operator<=>(const Itemset& a, const Itemset& b) {
  const std::size_t n = std::max(a.num_words(), b.num_words());
  for (std::size_t w = 0; w < n; ++w) {
    const std::uint64_t aw = a.word(w);
    const std::uint64_t bw = b.word(w);
    if (aw == bw) continue;
    // The lowest differing element g belongs to exactly one side, say S.
    // Both sequences agree below g. S continues with g; the other side O
    // continues with something larger than g, or has ended.
    const int bit = std::countr_zero(aw ^ bw);
    const bool in_a = (aw >> bit) & 1U;
    const Itemset& other = in_a ? b : a;
    const std::uint64_t above =
        bit == 63 ? 0 : (other.word(w) >> (bit + 1));
    bool other_continues = above != 0;
    for (std::size_t v = w + 1; !other_continues && v < other.num_words(); ++v) {
      other_continues = other.word(v) != 0;
    }
    // S < O iff O continues past g.
    const bool a_less = in_a ? other_continues : !other_continues;
    return a_less ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  return std::strong_ordering::equal;
}

std::uint64_t pack_pattern(const Itemset& row, const Itemset& scope) {
  std::uint64_t packed = 0;
  int j = 0;
  scope.for_each([&](AttributeId a) {
    if (row.contains(a)) packed |= std::uint64_t{1} << j;
    ++j;
  });
  return packed;
}

Itemset unpack_pattern(std::uint64_t packed, const Itemset& scope) {
  Itemset out;
  int j = 0;
  scope.for_each([&](AttributeId a) {
    if ((packed >> j) & 1U) out.insert(a);
    ++j;
  });
  return out;
}

}  // namespace decomine
