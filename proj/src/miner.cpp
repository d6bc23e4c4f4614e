#include "decomine/miner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "decomine/error.hpp"

namespace decomine {

CandidateFamily::CandidateFamily(std::uint64_t num_rows, double min_support)
    : num_rows_(num_rows), min_support_(min_support) {
  if (num_rows == 0) throw ParameterError("family needs num_rows >= 1");
}

void CandidateFamily::insert(const Itemset& x, std::uint64_t count, bool forced) {
  if (count > num_rows_) throw ParameterError("support count exceeds num_rows");
  entries_[x] = Entry{count, forced};
}

std::optional<std::uint64_t> CandidateFamily::count(const Itemset& x) const {
  auto it = entries_.find(x);
  if (it == entries_.end()) return std::nullopt;
  return it->second.count;
}

double CandidateFamily::frequency(const Itemset& x) const {
  auto it = entries_.find(x);
  if (it == entries_.end()) throw std::out_of_range("itemset not in family");
  return static_cast<double>(it->second.count) / static_cast<double>(num_rows_);
}

bool CandidateFamily::is_forced(const Itemset& x) const {
  auto it = entries_.find(x);
  return it != entries_.end() && it->second.forced;
}

std::vector<Itemset> CandidateFamily::sorted_members() const {
  std::vector<Itemset> out;
  out.reserve(entries_.size());
  for (const auto& [x, e] : entries_) out.push_back(x);
  std::sort(out.begin(), out.end(), [](const Itemset& a, const Itemset& b) {
    const auto sa = a.size();
    const auto sb = b.size();
    return sa != sb ? sa < sb : a < b;
  });
  return out;
}

Itemset CandidateFamily::coverage() const {
  Itemset u;
  for (const auto& [x, e] : entries_) u |= x;
  return u;
}

std::optional<std::pair<Itemset, Itemset>> CandidateFamily::closure_violation() const {
  // Checking immediate subsets suffices: closure follows by induction.
  for (const Itemset& x : sorted_members()) {
    std::optional<std::pair<Itemset, Itemset>> bad;
    x.for_each([&](AttributeId a) {
      if (bad) return;
      Itemset sub = x;
      sub.erase(a);
      if (!contains(sub)) bad = std::make_pair(x, sub);
    });
    if (bad) return bad;
  }
  return std::nullopt;
}

bool operator==(const CandidateFamily& a, const CandidateFamily& b) {
  if (a.num_rows_ != b.num_rows_ || a.min_support_ != b.min_support_ ||
      a.entries_.size() != b.entries_.size()) {
    return false;
  }
  for (const auto& [x, e] : a.entries_) {
    auto it = b.entries_.find(x);
    if (it == b.entries_.end() || it->second.count != e.count ||
        it->second.forced != e.forced) {
      return false;
    }
  }
  return true;
}

bool family_contains(const CandidateFamily& f, const Itemset& x) { return f.contains(x); }

namespace {

struct LevelNode {
  Itemset set;
  std::vector<AttributeId> members;
  std::vector<std::uint64_t> rows;  // bitmap of supporting rows
};

std::uint64_t popcount_all(const std::vector<std::uint64_t>& bits) {
  std::uint64_t n = 0;
  for (std::uint64_t w : bits) n += static_cast<std::uint64_t>(std::popcount(w));
  return n;
}

}  // namespace

CandidateFamily mine_candidates(const TransactionDataset& d, double min_support) {
  // Thresholds above 1 are accepted and leave only the forced members.
  if (!(min_support >= 0.0)) throw ParameterError("min_support must be >= 0");
  const std::uint64_t n = d.num_rows();
  CandidateFamily family(n, min_support);
  auto frequent = [&](std::uint64_t count) {
    return static_cast<double>(count) / static_cast<double>(n) >= min_support;
  };
  family.insert(Itemset{}, n);

  std::vector<LevelNode> level;
  for (AttributeId a = 0; a < d.num_attributes(); ++a) {
    auto col = d.column(a);
    LevelNode node{Itemset::Single(a), {a}, {col.begin(), col.end()}};
    const std::uint64_t count = popcount_all(node.rows);
    const bool keep = frequent(count);
    family.insert(node.set, count, !keep);
    if (keep) level.push_back(std::move(node));
  }

  while (level.size() >= 2) {
    std::unordered_set<Itemset, ItemsetHash> current;
    for (const auto& node : level) current.insert(node.set);
    const std::size_t k = level.front().members.size();
    std::vector<LevelNode> next;
    std::size_t group_begin = 0;
    while (group_begin < level.size()) {
      // Nodes sharing the first k-1 members are contiguous in lexicographic order.
      std::size_t group_end = group_begin + 1;
      while (group_end < level.size() &&
             std::equal(level[group_begin].members.begin(),
                        level[group_begin].members.end() - 1,
                        level[group_end].members.begin())) {
        ++group_end;
      }
      for (std::size_t i = group_begin; i < group_end; ++i) {
        for (std::size_t j = i + 1; j < group_end; ++j) {
          const LevelNode& left = level[i];
          const LevelNode& right = level[j];
          Itemset candidate = left.set;
          candidate.insert(right.members.back());
          // Subsets dropping one of the last two members are left and right.
          bool pruned = false;
          for (std::size_t m = 0; m + 1 < k && !pruned; ++m) {
            Itemset sub = candidate;
            sub.erase(left.members[m]);
            pruned = current.count(sub) == 0;
          }
          if (pruned) continue;
          std::vector<std::uint64_t> rows(left.rows.size());
          for (std::size_t w = 0; w < rows.size(); ++w) rows[w] = left.rows[w] & right.rows[w];
          const std::uint64_t count = popcount_all(rows);
          if (!frequent(count)) continue;
          family.insert(candidate, count);
          std::vector<AttributeId> members = left.members;
          members.push_back(right.members.back());
          next.push_back({std::move(candidate), std::move(members), std::move(rows)});
        }
      }
      group_begin = group_end;
    }
    level = std::move(next);
  }
  return family;
}

CandidateFamily closure_family(const std::vector<Itemset>& generators,
                               const CandidateFamily& source) {
  CandidateFamily out(source.num_rows(), source.min_support());
  std::vector<Itemset> stack(generators.begin(), generators.end());
  stack.emplace_back();
  while (!stack.empty()) {
    Itemset x = std::move(stack.back());
    stack.pop_back();
    if (out.contains(x)) continue;
    auto count = source.count(x);
    if (!count) throw FamilyError("closure member missing from source family");
    out.insert(x, *count, source.is_forced(x));
    x.for_each([&](AttributeId a) {
      Itemset sub = x;
      sub.erase(a);
      if (!out.contains(sub)) stack.push_back(std::move(sub));
    });
  }
  return out;
}

std::string format_ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) throw ParameterError("zero denominator");
  const std::uint64_t g = std::gcd(num, den);
  std::uint64_t reduced = den / g;
  while (reduced % 2 == 0) reduced /= 2;
  while (reduced % 5 == 0) reduced /= 5;
  if (reduced != 1) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g",
                  static_cast<double>(num) / static_cast<double>(den));
    return buf;
  }
  std::string out = std::to_string(num / den);
  unsigned __int128 rem = num % den;
  if (rem != 0) out += '.';
  while (rem != 0) {
    rem *= 10;
    out += static_cast<char>('0' + static_cast<int>(rem / den));
    rem %= den;
  }
  return out;
}

void write_family(std::ostream& out, const CandidateFamily& f,
                  const std::vector<std::string>& names) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", f.min_support());
  out << "# rows: " << f.num_rows() << '\n';
  out << "# min_support: " << buf << '\n';
  for (const Itemset& x : f.sorted_members()) {
    std::string line;
    x.for_each([&](AttributeId a) {
      line += names.at(a);
      line += ' ';
    });
    out << line << ": " << format_ratio(*f.count(x), f.num_rows()) << '\n';
  }
}

void save_family(const std::string& path, const CandidateFamily& f,
                 const std::vector<std::string>& names) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  write_family(out, f, names);
  if (!out) throw IoError("write failed for '" + path + "'");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

CandidateFamily read_family(std::istream& in, const std::vector<std::string>& names) {
  std::unordered_map<std::string, AttributeId> index;
  for (std::size_t i = 0; i < names.size(); ++i) index[names[i]] = static_cast<AttributeId>(i);

  std::optional<std::uint64_t> rows;
  double min_support = 0.0;
  struct Pending {
    Itemset x;
    double freq;
    std::size_t line;
  };
  std::vector<Pending> pending;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      std::istringstream hs(t.substr(1));
      std::string key;
      hs >> key;
      if (key == "rows:") {
        unsigned long long v = 0;
        if (!(hs >> v) || v == 0) throw ParseError("bad rows header", line_no);
        rows = v;
      } else if (key == "min_support:") {
        if (!(hs >> min_support)) throw ParseError("bad min_support header", line_no);
      }
      continue;
    }
    const auto colon = t.rfind(':');
    if (colon == std::string::npos) throw ParseError("expected 'items : frequency'", line_no);
    Itemset x;
    std::istringstream ts(t.substr(0, colon));
    std::string tok;
    while (ts >> tok) {
      auto it = index.find(tok);
      if (it == index.end()) throw ParseError("unknown item '" + tok + "'", line_no);
      if (x.contains(it->second)) throw ParseError("repeated item '" + tok + "'", line_no);
      x.insert(it->second);
    }
    const std::string num = trim(t.substr(colon + 1));
    char* end = nullptr;
    const double freq = std::strtod(num.c_str(), &end);
    if (num.empty() || *end != '\0' || !(freq >= 0.0 && freq <= 1.0)) {
      throw ParseError("bad frequency '" + num + "'", line_no);
    }
    pending.push_back({std::move(x), freq, line_no});
  }
  if (pending.empty()) {
    throw FamilyError("family has no itemsets; every singleton is required");
  }
  if (!rows) throw ParseError("missing '# rows: N' header");

  CandidateFamily family(*rows, min_support);
  for (const auto& p : pending) {
    const double scaled = p.freq * static_cast<double>(*rows);
    const auto count = static_cast<std::uint64_t>(std::llround(scaled));
    if (std::fabs(static_cast<double>(count) / static_cast<double>(*rows) - p.freq) > 1e-9) {
      throw ParseError("frequency is not a multiple of 1/rows", p.line);
    }
    if (family.contains(p.x)) throw ParseError("duplicate itemset", p.line);
    const bool forced = p.x.size() == 1 &&
                        static_cast<double>(count) / static_cast<double>(*rows) < min_support;
    family.insert(p.x, count, forced);
  }
  if (!family.contains(Itemset{})) family.insert(Itemset{}, *rows);
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!family.contains(Itemset::Single(static_cast<AttributeId>(i)))) {
      throw FamilyError("singleton '" + names[i] + "' missing from family");
    }
  }
  if (auto bad = family.closure_violation()) {
    std::string member;
    std::string missing;
    bad->first.for_each([&](AttributeId a) { member += (member.empty() ? "" : " ") + names[a]; });
    bad->second.for_each([&](AttributeId a) { missing += (missing.empty() ? "" : " ") + names[a]; });
    throw FamilyError("family not downward closed: '" + member + "' present but '" +
                      missing + "' missing");
  }
  return family;
}

CandidateFamily load_family(const std::string& path, const std::vector<std::string>& names) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_family(in, names);
}

}  // namespace decomine
