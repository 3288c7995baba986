#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lcflow/config.hpp"
#include "lcflow/diagnostics.hpp"

namespace lcflow {

/// Differences of a viscous state against the inviscid reference on the shared grid.
///   u_l2sq   sum over faces |u - u0|^2 dV
///   d_h1sq   |d - d0|_{L2}^2 + |grad(d - d0)|_{L2}^2, centered gradients with Neumann ghosts
///   u_linf   max over cells of |u - u0| (cell-centered, Euclidean)
///   d_w1inf  max |d - d0| + max |grad(d - d0)| (Euclidean / Frobenius)
struct ErrorNorms {
  double u_l2sq = 0.0, d_h1sq = 0.0, u_linf = 0.0, d_w1inf = 0.0;
  friend bool operator==(const ErrorNorms&, const ErrorNorms&) = default;
};
ErrorNorms error_norms(const State& s, const State& ref, const ChannelGrid& g);

struct RateFit {
  double slope = 0.0, intercept = 0.0, r_squared = 0.0;
};

/// OLS fit of log(err) against log(eps). Throws std::invalid_argument for fewer
/// than two points or non-positive values.
RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

/// L2 norms of the error-system remainders
///   R1 = eps Lap u - v.grad u_eps - grad d_eps . Lap phi - grad phi . Lap d
///   R2 = -v.grad d_eps + (grad phi : grad(d_eps + d)) d_eps + |grad d|^2 phi
/// with v = u_eps - u, phi = d_eps - d; u, d from the inviscid state.
struct RemainderNorms {
  double r1 = 0.0, r2 = 0.0;
};
RemainderNorms remainder_norms(const State& state_eps, const State& state_0, double eps, const SlipMatrixB& B,
                               const ChannelGrid& g);

/// Snapshots at the recorded steps of one run, with their diagnostics.
struct Trajectory {
  std::vector<State> snapshots;
  std::vector<DiagnosticsRecord> trace;
};

/// Produces the trajectory of one configuration. The reference trajectory is
/// passed to member runners so that synthetic runners can derive from it.
using MemberRunner = std::function<Trajectory(const SimConfig& cfg, const Trajectory* reference)>;

/// Default runner: the integrator, recording at the configured steps.
Trajectory simulate_trajectory(const SimConfig& cfg, const Trajectory* reference = nullptr);

struct MemberResult {
  double eps = 0.0;
  std::vector<double> times;
  std::vector<ErrorNorms> errors;  // one per recorded time
  ErrorNorms final;                // at t_final
  ErrorNorms sup;                  // max over recorded times, per norm
  double nm_max = 0.0;             // max over time of nm_value (NaN without records)
  double linf_grad_u_max = 0.0;
  double wall_time_s = 0.0;
};

struct SweepResult {
  std::vector<double> eps_ladder;
  std::vector<MemberResult> members;
  RateFit fit_l2, fit_linf;  // fitted_slope_l2 = fit_l2.slope
  std::string status_l2 = "ok", status_linf = "ok";
  std::uint64_t config_hash = 0;
  double reference_wall_time_s = 0.0;
  std::vector<std::string> flags;  // monotonicity / resolution findings
  bool partial = false;
  /// Max over recorded times of the reference's own norms (same definitions as the
  /// errors); scales the roundoff floor of the monotonicity check. Zero means strict.
  ErrorNorms reference_scale;
};

class SweepError : public std::runtime_error {
 public:
  SweepError(const std::string& what, SweepResult partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const SweepResult& partial() const noexcept { return partial_; }

 private:
  SweepResult partial_;
};

struct SweepOptions {
  int jobs = 1;
  bool force = false;
  MemberRunner member_runner;     // defaults to simulate_trajectory
  MemberRunner reference_runner;  // defaults to simulate_trajectory
};

/// Smallest eps the resolution guard admits: (4 hz)^2.
double resolved_eps_threshold(const ChannelGrid& g);

/// Checks: ladder strictly decreasing in (0, 1]; resolution guard unless forced.
void validate_ladder(const std::vector<double>& ladder, const ChannelGrid& g, bool force);

/// Runs the eps = 0 reference, then every ladder member (concurrently with jobs > 1),
/// and fits the rates. Results and flags do not depend on the job count.
SweepResult run_sweep(const SimConfig& cfg, const std::vector<double>& ladder, const SweepOptions& opts = {});

/// Norms of a state measured like the errors, i.e. error_norms against zero fields.
ErrorNorms state_norms(const State& s, const ChannelGrid& g);

/// Differences below this fraction of the reference scale are roundoff (squared norms
/// use its square).
inline constexpr double kMonotonicityFloor = 64.0 * 2.220446049250313e-16;

/// Recomputes fits and flags from the member table (used by run_sweep and rate-fit).
void analyse(SweepResult& r);

}  // namespace lcflow
