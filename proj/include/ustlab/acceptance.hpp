#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace ustlab {

struct AcceptanceOptions {
  std::uint64_t seed = 20240601;
  unsigned threads = 0;  // 0 = available parallelism
};

struct CriterionResult {
  std::string id;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct Criterion {
  const char* id;
  const char* title;
  double time_limit_seconds;
  void (*run)(const AcceptanceOptions&, CriterionResult&);
};

/// A1..A11 in order.
const std::vector<Criterion>& acceptance_criteria();

/// Runs the listed criteria (all when `ids` is empty) and prints one
/// `ID PASS|FAIL ...` line per criterion to `out`. Exceeding a criterion's
/// time limit counts as a failure.
std::vector<CriterionResult> run_acceptance(const std::vector<std::string>& ids, const AcceptanceOptions& opts,
                                            std::ostream& out);

/// Ids of the quick subset (A1..A5).
std::vector<std::string> quick_criteria();

}  // namespace ustlab
