#include "decomine/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <unordered_map>

#include "decomine/error.hpp"

namespace decomine::oracle {

namespace {

std::uint64_t low_mask(const Itemset& x, std::size_t k) {
  if (!x.is_single_word() || (k < 64 && (x.word(0) >> k) != 0)) {
    throw ScopeError("itemset outside the first " + std::to_string(k) + " attributes");
  }
  return x.word(0);
}

double ratio(const CandidateFamily& family, const Itemset& x) {
  return static_cast<double>(*family.count(x)) / static_cast<double>(family.num_rows());
}

}  // namespace

OracleBounds full_lp_bounds(const CandidateFamily& family, const Itemset& q, std::size_t k) {
  if (k > kMaxJointAttributes) throw CapacityError("full joint LP limited to 20 attributes");
  const std::size_t cells = std::size_t{1} << k;
  const std::uint64_t qm = low_mask(q, k);

  lp::Problem p;
  p.num_vars = cells;
  p.add_constraint(std::vector<double>(cells, 1.0), 1.0);
  for (const auto& [x, entry] : family.entries()) {
    if (x.empty()) continue;
    const std::uint64_t xm = low_mask(x, k);
    std::vector<double> row(cells, 0.0);
    for (std::size_t v = 0; v < cells; ++v) {
      if ((v & xm) == xm) row[v] = 1.0;
    }
    p.add_constraint(std::move(row), ratio(family, x));
  }
  // Deterministic row order regardless of hash-map iteration.
  std::vector<std::size_t> order(p.rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin() + 1, order.end(), [&](std::size_t a, std::size_t b) {
    if (p.rows[a] != p.rows[b]) return p.rows[a] < p.rows[b];
    return p.rhs[a] < p.rhs[b];
  });
  lp::Problem sorted;
  sorted.num_vars = cells;
  for (std::size_t i : order) sorted.add_constraint(p.rows[i], p.rhs[i]);
  sorted.objective.assign(cells, 0.0);
  for (std::size_t v = 0; v < cells; ++v) {
    if ((v & qm) == qm) sorted.objective[v] = 1.0;
  }

  OracleBounds out;
  sorted.sense = lp::Sense::kMinimize;
  const lp::Solution lo = lp::solve(sorted);
  sorted.sense = lp::Sense::kMaximize;
  const lp::Solution hi = lp::solve(sorted);
  out.min_status = lo.status;
  out.max_status = hi.status;
  out.interval = {lo.value, hi.value};
  return out;
}

QueryInterval vertex_enumeration_bounds(const CandidateFamily& family, const Itemset& q,
                                        std::size_t k) {
  if (k > kMaxVertexAttributes) throw CapacityError("vertex enumeration limited to 4 attributes");
  const std::size_t n = std::size_t{1} << k;
  const std::uint64_t qm = low_mask(q, k);

  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  rows.emplace_back(n, 1.0);
  rhs.push_back(1.0);
  for (const auto& [x, entry] : family.entries()) {
    if (x.empty()) continue;
    const std::uint64_t xm = low_mask(x, k);
    std::vector<double> row(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) row[v] = (v & xm) == xm ? 1.0 : 0.0;
    rows.push_back(std::move(row));
    rhs.push_back(ratio(family, x));
  }

  // Row-reduce [A | b] to an independent set of rows.
  std::vector<std::vector<double>> aug;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    aug.push_back(rows[i]);
    aug.back().push_back(rhs[i]);
  }
  std::size_t rank = 0;
  for (std::size_t col = 0; col < n && rank < aug.size(); ++col) {
    std::size_t piv = rank;
    for (std::size_t r = rank; r < aug.size(); ++r) {
      if (std::fabs(aug[r][col]) > std::fabs(aug[piv][col])) piv = r;
    }
    if (std::fabs(aug[piv][col]) < 1e-12) continue;
    std::swap(aug[piv], aug[rank]);
    for (std::size_t r = 0; r < aug.size(); ++r) {
      if (r == rank) continue;
      const double f = aug[r][col] / aug[rank][col];
      for (std::size_t c = 0; c <= n; ++c) aug[r][c] -= f * aug[rank][c];
    }
    ++rank;
  }
  aug.resize(rank);

  double best_lo = 2.0;
  double best_hi = -1.0;
  std::vector<std::size_t> pick(rank);
  // Every rank-sized column subset, in lexicographic order.
  std::vector<bool> chooser(n, false);
  std::fill(chooser.begin(), chooser.begin() + static_cast<std::ptrdiff_t>(rank), true);
  do {
    std::size_t j = 0;
    for (std::size_t c = 0; c < n; ++c) {
      if (chooser[c]) pick[j++] = c;
    }
    std::vector<std::vector<double>> m(rank, std::vector<double>(rank + 1));
    for (std::size_t r = 0; r < rank; ++r) {
      for (std::size_t c = 0; c < rank; ++c) m[r][c] = aug[r][pick[c]];
      m[r][rank] = aug[r][n];
    }
    bool singular = false;
    for (std::size_t col = 0; col < rank && !singular; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col; r < rank; ++r) {
        if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
      }
      if (std::fabs(m[piv][col]) < 1e-10) {
        singular = true;
        break;
      }
      std::swap(m[piv], m[col]);
      for (std::size_t r = 0; r < rank; ++r) {
        if (r == col) continue;
        const double f = m[r][col] / m[col][col];
        for (std::size_t c = col; c <= rank; ++c) m[r][c] -= f * m[col][c];
      }
    }
    if (singular) continue;
    double value = 0.0;
    bool feasible = true;
    for (std::size_t r = 0; r < rank; ++r) {
      const double x = m[r][rank] / m[r][r];
      if (x < -1e-12) feasible = false;
      if ((pick[r] & qm) == qm) value += x;
    }
    if (!feasible) continue;
    best_lo = std::min(best_lo, value);
    best_hi = std::max(best_hi, value);
  } while (std::prev_permutation(chooser.begin(), chooser.end()));
  if (best_hi < 0.0) throw ConsistencyError("no feasible vertex");
  return {best_lo, best_hi};
}

std::vector<double> enumerate_tree_distribution(const JunctionForest& t,
                                                const TransactionDataset& d) {
  const std::size_t k = d.num_attributes();
  if (k > kMaxTableAttributes) throw CapacityError("tree enumeration limited to 12 attributes");
  const double n = static_cast<double>(d.num_rows());

  std::vector<std::uint64_t> masks;
  for (const Itemset& r : d.rows()) masks.push_back(low_mask(r, k));
  auto counts_for = [&](std::uint64_t scope) {
    std::unordered_map<std::uint64_t, double> c;
    for (std::uint64_t r : masks) c[r & scope] += 1.0;
    return c;
  };
  std::vector<std::uint64_t> clique_scope;
  std::vector<std::unordered_map<std::uint64_t, double>> clique_counts;
  for (const Itemset& c : t.cliques()) {
    clique_scope.push_back(low_mask(c, k));
    clique_counts.push_back(counts_for(clique_scope.back()));
  }
  std::vector<std::uint64_t> sep_scope;
  std::vector<std::unordered_map<std::uint64_t, double>> sep_counts;
  for (const auto& e : t.edges()) {
    sep_scope.push_back(clique_scope[e.a] & clique_scope[e.b]);
    sep_counts.push_back(counts_for(sep_scope.back()));
  }

  std::vector<double> table(std::size_t{1} << k, 0.0);
  for (std::uint64_t v = 0; v < table.size(); ++v) {
    double p = 1.0;
    for (std::size_t i = 0; i < clique_scope.size() && p != 0.0; ++i) {
      auto it = clique_counts[i].find(v & clique_scope[i]);
      p *= it == clique_counts[i].end() ? 0.0 : it->second / n;
    }
    for (std::size_t i = 0; i < sep_scope.size() && p != 0.0; ++i) {
      auto it = sep_counts[i].find(v & sep_scope[i]);
      p = it == sep_counts[i].end() ? 0.0 : p / (it->second / n);
    }
    table[v] = p;
  }
  return table;
}

double table_entropy(const std::vector<double>& table) {
  double h = 0.0;
  for (double p : table) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double table_marginal(const std::vector<double>& table, const Itemset& scope,
                      const Itemset& ones) {
  const std::uint64_t s = scope.word(0);
  const std::uint64_t o = ones.word(0) & s;
  double total = 0.0;
  for (std::uint64_t v = 0; v < table.size(); ++v) {
    if ((v & s) == o) total += table[v];
  }
  return total;
}

namespace {

double log_gamma_half_integer(double x) {
  // lgamma for x in {1/2, 1, 3/2, 2, ...} via the exact recurrences.
  double r = 0.0;
  double base = 1.0;
  if (std::fmod(x, 1.0) != 0.0) {
    r = 0.5 * std::log(std::numbers::pi);
    base = 0.5;
  }
  for (double y = base; y < x - 0.25; y += 1.0) r += std::log(y);
  return r;
}

double costmdl(double k, double n) {
  return (k - 1.0) / 2.0 * std::log(n) - 0.5 * std::log(std::numbers::pi) - log_gamma_half_integer(k / 2.0);
}

double level_one_gate(Method method, double n) {
  switch (method) {
    case Method::kNone: return 1e-12;
    case Method::kAic: return 1.0;
    case Method::kBic: return 0.5 * std::log(n);
    case Method::kMdl: return costmdl(4.0, n) - 2.0 * costmdl(2.0, n) + costmdl(1.0, n);
  }
  return 1e-12;
}

}  // namespace

ChowLiuForest chow_liu_reference(const TransactionDataset& d, const CandidateFamily& f,
                                 Method method) {
  const std::size_t k = d.num_attributes();
  const double n = static_cast<double>(d.num_rows());
  const double gate = level_one_gate(method, n);

  struct Candidate {
    double w;
    AttributeId a;
    AttributeId b;
  };
  std::vector<Candidate> cands;
  for (AttributeId a = 0; a < k; ++a) {
    for (AttributeId b = a + 1; b < k; ++b) {
      if (!f.contains(Itemset{a, b})) continue;
      double c[2][2] = {{0, 0}, {0, 0}};
      for (const Itemset& r : d.rows()) c[r.contains(a)][r.contains(b)] += 1.0;
      double mi = 0.0;
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          if (c[i][j] == 0.0) continue;
          const double pa = (c[i][0] + c[i][1]) / n;
          const double pb = (c[0][j] + c[1][j]) / n;
          const double pij = c[i][j] / n;
          mi += pij * std::log(pij / (pa * pb));
        }
      }
      mi = std::max(mi, 0.0);
      if (n * mi >= gate) cands.push_back({mi, a, b});
    }
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Candidate& x, const Candidate& y) { return x.w > y.w; });

  std::vector<std::size_t> parent(k);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x];
    return x;
  };
  ChowLiuForest out;
  for (const auto& c : cands) {
    const std::size_t ra = find(c.a);
    const std::size_t rb = find(c.b);
    if (ra == rb) continue;
    parent[ra] = rb;
    out.edges.emplace_back(c.a, c.b);
    out.total_weight += c.w;
  }
  return out;
}

}  // namespace decomine::oracle
