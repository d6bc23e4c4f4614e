#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace decomine::lp {

enum class Sense { kMinimize, kMaximize };

// optimize objective . x  subject to  A x = b,  x >= 0.
struct Problem {
  std::size_t num_vars = 0;
  std::vector<double> objective;
  Sense sense = Sense::kMinimize;
  // Dense rows of length num_vars.
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;

  void add_constraint(std::vector<double> row, double value) {
    rows.push_back(std::move(row));
    rhs.push_back(value);
  }
};

enum class Status { kOptimal, kInfeasible, kNumericallyUnstable };

const char* status_name(Status s);

struct Solution {
  Status status = Status::kNumericallyUnstable;
  double value = 0.0;
  std::vector<double> assignment;
  std::size_t pivots = 0;
  // Largest |A x - b| / (1 + |b|) over the rows, for optimal solutions.
  double max_residual = 0.0;
};

struct Options {
  double pivot_tolerance = 1e-10;
  double feasibility_tolerance = 1e-8;
  // Dantzig pivots allowed before switching to Bland's rule.
  std::size_t dantzig_pivots = 0;  // 0 = 20 * (rows + columns)
  std::size_t max_pivots = 0;      // 0 = unlimited under Bland
  // When set, the problem is written here in tableau text form.
  std::ostream* dump = nullptr;
};

// Two-phase dense tableau simplex. Dependent equality rows are detected and
// dropped after phase one. The returned point is re-solved from the final
// basis against the original data and residual-checked; failing the check,
// or detecting unboundedness, yields kNumericallyUnstable.
Solution solve(const Problem& p, const Options& options = {});

// Text dump: "min|max", objective, then one "row | rhs" line per equality.
std::string to_text(const Problem& p);

}  // namespace decomine::lp
