#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "lcflow/fields.hpp"
#include "lcflow/operators.hpp"

namespace lcflow {

/// Thrown when the discrete Gauss constraint of a Neumann problem fails.
class CompatibilityError : public std::runtime_error {
 public:
  CompatibilityError(const std::string& what, double defect)
      : std::runtime_error(what), defect_(defect) {}
  double defect() const noexcept { return defect_; }

 private:
  double defect_;
};

/// Thrown when a solve does not reach its residual target.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

enum class PoissonMethod { Spectral, ConjugateGradient };

/// Lap p = rhs in the channel with outward normal derivative data on the walls.
struct PoissonProblem {
  ScalarField rhs;
  WallData neumann_bottom;  // dp/dn, n = -e_z
  WallData neumann_top;     // dp/dn, n = +e_z
  double tolerance = 1e-10;
  /// Magnitude of the operands the rhs was computed from, when cancellation
  /// makes |rhs|_1 a poor yardstick (e.g. the divergence of a solenoidal field).
  double operand_scale = 0.0;
};

/// Relative defect below which the rhs is shifted onto the compatible subspace.
inline constexpr double kCompatTol = 1e-8;

/// Solver for shifted Neumann problems (sigma I - L_N) x = r on one grid,
/// where L_N is the periodic-xy / homogeneous-Neumann-z 7-point Laplacian.
///
/// The spectral route transforms each z-plane with a real 2D FFT and solves
/// one tridiagonal system per transverse wavenumber. The CG route is
/// matrix-free and exists for cross-checking and non-separable extensions.
/// Instances may be shared between threads; solve() is reentrant.
class PoissonSolver {
 public:
  explicit PoissonSolver(const ChannelGrid& g, PoissonMethod method = PoissonMethod::Spectral,
                         int max_iterations = 5000);
  ~PoissonSolver();
  PoissonSolver(const PoissonSolver&) = delete;
  PoissonSolver& operator=(const PoissonSolver&) = delete;

  const ChannelGrid& grid() const noexcept { return grid_; }
  PoissonMethod method() const noexcept { return method_; }

  /// For sigma == 0 the rhs must have zero sum; the result has zero mean.
  ScalarField solve(const ScalarField& rhs, double sigma, double tolerance) const;

 private:
  ScalarField solve_spectral(const ScalarField& rhs, double sigma) const;
  ScalarField solve_cg(const ScalarField& rhs, double sigma, double tolerance) const;

  ChannelGrid grid_;
  PoissonMethod method_;
  int max_iterations_;
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

/// Homogeneous-Neumann Laplacian applied to a copy of f.
ScalarField neumann_laplacian(const ScalarField& f, const ChannelGrid& g);

/// Zero-mean solution of the Neumann problem. Throws CompatibilityError when
/// |int rhs - oint g| > kCompatTol (|rhs|_1 + |g|_1 + operand_scale); smaller defects are
/// removed by shifting the rhs mean. Throws SolverError if the residual
/// exceeds tolerance * |rhs|.
ScalarField solve_poisson_neumann(const PoissonProblem& prob, const PoissonSolver& solver);

struct Projection {
  FaceField u;
  ScalarField p_update;
};

/// u = u_star - dt grad(p_update), Lap p_update = div(u_star)/dt, homogeneous Neumann.
Projection project(const FaceField& u_star, double dt, const PoissonSolver& solver,
                   double tolerance = 1e-10);

struct PressureSplit {
  ScalarField p1;  // Euler part
  ScalarField p2;  // viscous (harmonic) part
};

/// Right-hand side and wall data of the split pressure problems.
struct PressureSplitData {
  ScalarField rhs1;     // -div(u.grad u + grad d . Lap d)
  WallData g1_bottom;   // -(u.grad u).n
  WallData g1_top;
  WallData g2_bottom;   // eps (Lap u).n
  WallData g2_top;
};
PressureSplitData pressure_split_data(const State& s, double eps, const SlipMatrixB& B, const ChannelGrid& g);

/// p1: Lap p1 = -div(u.grad u + grad d . Lap d), dp1/dn = -(u.grad u).n
/// p2: Lap p2 = 0,                                dp2/dn = eps (Lap u).n
/// (Lap u).n on a wall is evaluated as -(curl w).n from the wall-edge vorticity.
PressureSplit pressure_split(const State& s, double eps, const SlipMatrixB& B, const PoissonSolver& solver,
                             double tolerance = 1e-10);

}  // namespace lcflow
