#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "lcflow/grid.hpp"

namespace lcflow {

/// Velocity (face-staggered), pressure (zero mean) and unit director at one time.
struct State {
  FaceField u;
  ScalarField p;
  VectorField d;
  double t = 0.0;
  std::int64_t step = 0;

  friend bool operator==(const State&, const State&) = default;
};

/// Built-in analytic initial data.
///   rest               u = 0, d = e_z
///   shear+twist        u = (a sin(pi z/lz) cos(2 pi y/ly), 0, 0),
///                      d = (sin beta, 0, cos beta), beta = b cos(pi z/lz)
///   random-solenoidal  band-limited random u (amplitude a, |k| <= kmax) projected,
///                      d = normalize(e_z + b * random cosine-in-z modes)
///   mms                the manufactured solution at t = 0 (see manufactured.hpp)
struct InitialConditionSpec {
  std::string name = "rest";
  double a = 0.1;
  double b = 0.5;
  std::uint64_t seed = 1;
  int kmax = 2;

  friend bool operator==(const InitialConditionSpec&, const InitialConditionSpec&) = default;
};

bool is_known_initial_condition(const std::string& name);

/// Throws std::invalid_argument for unknown names or a degenerate director.
State init_state(const ChannelGrid& g, const InitialConditionSpec& ic);

inline constexpr double kRenormFloor = 1e-8;

/// d / |d| per cell. Throws std::domain_error naming the cell when |d| <= floor.
VectorField renormalize_director(const VectorField& d, double floor = kRenormFloor);

/// max over cells of ||d| - 1|.
double unit_deviation(const VectorField& d);

/// MAC divergence: flux differences over each cell.
ScalarField discrete_divergence(const FaceField& u, const ChannelGrid& g);
/// MAC gradient onto faces (negative adjoint of the divergence); z wall faces are 0.
FaceField discrete_gradient(const ScalarField& p, const ChannelGrid& g);

double max_abs(const Array3& a);
double max_abs(const FaceField& u);
double max_abs(const VectorField& f);

/// Uniform variates in [0, 1). mt19937_64 output is fixed by the standard and
/// the bits-to-double mapping is explicit, so streams match across platforms.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed) : gen_(seed) {}
  double next() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace lcflow
