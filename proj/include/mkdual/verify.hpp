#pragma once

// Re-checks a report against the problem it was produced from. Every claim
// that carries a witness (plan, potentials, cycle, rectangle, subsidy,
// feasibility violation, gallery fact) is recomputed from the input alone.

#include <string>
#include <vector>

#include "mkdual/io.hpp"

namespace mkdual {

struct VerifyOutcome {
  std::vector<std::string> checked;   // one line per verified claim
  std::vector<std::string> failures;  // one line per claim that did not reproduce

  [[nodiscard]] bool ok() const { return failures.empty(); }
};

// `problem` may be null for reports that do not depend on an input file
// (gallery examples, random instances).
VerifyOutcome verify_report(const Problem* problem, const Json& report, double tol = kFeasTol);

}  // namespace mkdual
