#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace decomine::cli {

enum ExitCode : int {
  kOk = 0,
  kInvariantFailure = 1,
  kIoError = 2,
  kInvalidFamily = 3,
  kBadQuery = 4,
  kUsage = 64,
};

// Runs the command line `args` (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Invariant suites behind `decomine check`. scope is one of all,
// normalization, drops, query, model. A nonempty model_path adds the model
// suite. Failures are reported on err with the failing instance.
int run_checks(const std::string& scope, const std::string& model_path, std::ostream& out,
               std::ostream& err);

}  // namespace decomine::cli
