#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "varcert/certify.hpp"

namespace varcert {

// [run] section: execution options that live with the problem.
struct RunOptions {
  std::string report_path;  // empty = no JSON report
  bool continue_on_failure = false;
};

struct LoadedProblem {
  ProblemSpec spec;
  RunOptions run;
};

// Command-line values that take precedence over the file; empty vectors
// and strings mean "keep the file value".
struct CliOverrides {
  std::vector<int> resolution;  // single entry broadcasts to all axes
  std::optional<std::uint64_t> seed;
  std::optional<int> num_samples;
  std::optional<double> tol_el;
  std::optional<double> tol_inv;
  std::optional<double> tol_exact;
  std::optional<double> tol_invariance;
  std::vector<double> deltas;
  std::string report_path;
  bool continue_on_failure = false;  // OR-ed with the file value
};

// Parse and fully validate a problem description.  Section layout:
// [problem] n, N, f; [domain] b0, omega; [candidate] y0 (repeated per
// component); [family] kind, r, phi / shooting data; optional [grid],
// [tolerances], [sampling], [deltas], [run].  '#' starts a comment.
// Errors carry the line number and the offending section.key.
LoadedProblem load_problem_text(const std::string& text, const std::string& origin);
LoadedProblem load_problem(const std::string& path);

void apply_overrides(LoadedProblem& problem, const CliOverrides& overrides);

}  // namespace varcert
