#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "varcert/domain.hpp"
#include "varcert/excess.hpp"
#include "varcert/field.hpp"
#include "varcert/hilbert.hpp"
#include "varcert/lagrangian.hpp"
#include "varcert/stationarity.hpp"

namespace varcert {

struct Tolerances {
  double tol_el = 1e-6;          // stationarity floor (actual gate is max(10 h^2, tol_el))
  double tol_inv = 1e-10;        // Newton convergence for field inversion
  double tol_exact = 1e-5;       // exactness residual bound on the tube
  double tol_invariance = 1e-3;  // relative integral deviation bound
  double tol_excess = 1e-9;      // absolute excess floor (roundoff allowance)
};

struct SamplingConfig {
  int num_samples = 50;
  int mode_cap = 4;
  std::uint64_t seed = 42;
};

// Everything needed to run the pipeline on one problem.
struct ProblemSpec {
  LagrangianSpec lagrangian;
  BoxDomain domain;
  std::vector<Expr> y0;  // candidate components, x-variables only
  ExtremalFamily family;
  std::vector<int> resolution;  // per-axis node counts, >= 5
  Tolerances tolerances;
  SamplingConfig sampling;
  std::vector<double> deltas{1.0, 0.5, 0.25, 0.1, 0.05};

  ProblemSpec(LagrangianSpec lag, BoxDomain dom, std::vector<Expr> candidate, ExtremalFamily fam);
  void validate() const;  // throws ValidationError on any inconsistency
};

enum class Verdict { CertifiedLocalMin, NotCertified, InvalidInput };
enum class FailureReason {
  None,
  ElResidual,
  Uncovered,
  TubeTooSmall,
  ExactnessFail,
  NotConvex,
  InvarianceFail,
  ExcessNegative,
};

const char* to_string(Verdict v);
const char* to_string(FailureReason r);

struct StationarityStats {
  double max_abs = 0.0;
  double interior_max_abs = 0.0;
  double threshold = 0.0;
};

struct MemberStats {
  double max_interior_residual = 0.0;
  std::vector<double> worst_lambda;
  double threshold = 0.0;
};

struct ExactnessStats {
  double max_abs_residual = 0.0;
  std::size_t num_points = 0;   // stencil centers actually evaluated
  std::size_t num_skipped = 0;  // centers whose stencil left the tube
};

struct ConvexityStats {
  double min_eigenvalue = 0.0;
  bool is_psd = false;
  std::optional<ConvexitySample> witness;
  std::size_t num_samples = 0;
};

struct ComparisonStats {
  double f_y0 = 0.0;
  double min_gap = 0.0;  // min over samples of F(y_s) - F(y0)
  int num_samples = 0;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

// Stage selection bits, in pipeline order.  Requesting a stage pulls in
// the stages it depends on (everything past the tube needs delta_star,
// the gap identity needs the per-sample excess integrals).
enum Stage : unsigned {
  kStageStationarity = 1u << 0,
  kStageTube = 1u << 1,
  kStageMembers = 1u << 2,
  kStageExactness = 1u << 3,
  kStageConvexity = 1u << 4,
  kStageInvariance = 1u << 5,
  kStageExcess = 1u << 6,
  kStageGap = 1u << 7,
  kStageComparison = 1u << 8,
  kStageAll = (1u << 9) - 1,
};

struct CertifyOptions {
  bool continue_on_failure = false;
  unsigned stages = kStageAll;
};

// Verdict plus whatever stage payloads were actually computed; stages
// that were not requested, were cut short by an earlier failure, or lost
// their precondition (no covered tube) stay empty.
struct CertificationReport {
  Verdict verdict = Verdict::NotCertified;
  FailureReason failure_reason = FailureReason::None;
  std::vector<std::string> failed_stages;
  std::string message;  // INVALID_INPUT explanation, otherwise empty
  bool partial_run = false;
  double delta_star = 0.0;
  std::optional<StationarityStats> stationarity;
  std::optional<MemberStats> members;
  std::optional<ExactnessStats> exactness;
  std::optional<ConvexityStats> convexity;
  std::optional<InvarianceStats> invariance;
  std::optional<ExcessSummary> excess;  // worst sampled competitor
  std::optional<double> gap_identity_error;
  std::optional<ComparisonStats> comparison;
  // config echo
  int n = 0;
  int N = 0;
  std::vector<int> resolution;
  Tolerances tolerances;
  SamplingConfig sampling;
  std::vector<double> deltas;
  bool continue_on_failure = false;
  // wall clock per executed stage; printed with the human report but
  // never serialized (reports must be byte-identical across runs)
  std::vector<StageTiming> timings;
};

// Run the pipeline: (1) candidate stationarity on B0, (2) tube coverage,
// (3) member stationarity spot checks, (4) exactness sweep, (5) convexity
// sampling, (6) integral invariance, (7) excess over sampled competitors,
// (8) gap identity, (9) direct functional comparison.  Stages 1-7 gate
// the verdict; 8 and 9 are informational.  The first failing stage sets
// failure_reason; without continue_on_failure later stages are skipped.
CertificationReport certify(const ProblemSpec& problem, const CertifyOptions& options = {});

}  // namespace varcert
