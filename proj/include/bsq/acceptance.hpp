#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace bsq {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct Criterion {
  int id = 0;
  std::string title;
  std::function<CriterionResult()> run;
};

/// The eight acceptance checks, each with its tolerances fixed in code.
const std::vector<Criterion>& acceptance_criteria();

/// Runs the selected criteria (all of them when `ids` is empty). Exceptions inside a
/// check count as a failure with the message as detail.
std::vector<CriterionResult> run_acceptance(std::span<const int> ids = {},
                                            const std::function<void(const CriterionResult&)>& progress = {});

/// "PASS  [3] title: detail (1.2 s)"
std::string format_result_line(const CriterionResult& r);

}  // namespace bsq
