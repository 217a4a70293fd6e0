#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace choicerank {

// ---------------------------------------------------------------------------
// Self-check suite: the closed-form identities and cross-algorithm
// equivalences the library is built around, each evaluated on freshly
// generated random instances. A failing check means an implementation (or
// build) defect, not bad luck: every check is deterministic given the seed
// and tests an exact mathematical statement.

struct CheckResult {
  std::string name;
  bool passed = false;
  double residual = 0.0;  // measured worst-case discrepancy
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 20250817;
  // Development hook: added to the log-weight-ratio constant of the
  // compact KL formula so the kl-compact-identity check must fail.
  double kl_perturbation = 0.0;
};

std::vector<CheckResult> run_verification_suite(const VerifyOptions& options = {});

}  // namespace choicerank
