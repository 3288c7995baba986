#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include "lcflow/config.hpp"
#include "lcflow/fields.hpp"
#include "lcflow/grid.hpp"

namespace testing {

inline constexpr double kPi = std::numbers::pi;

inline lcflow::ChannelGrid grid(int nx, int ny, int nz, double lx = 2 * kPi, double ly = 2 * kPi, double lz = 1.0) {
  return lcflow::make_grid({nx, ny, nz, lx, ly, lz});
}

inline lcflow::State random_state(const lcflow::ChannelGrid& g, std::uint64_t seed, double a = 0.5, double b = 0.3,
                                  int kmax = 2) {
  lcflow::InitialConditionSpec ic;
  ic.name = "random-solenoidal";
  ic.seed = seed;
  ic.a = a;
  ic.b = b;
  ic.kmax = kmax;
  return lcflow::init_state(g, ic);
}

/// Uniform noise in [-1, 1) on the interior of a.
inline void fill_noise(lcflow::Array3& a, std::uint64_t seed) {
  lcflow::UniformStream rng(seed);
  for (int k = 0; k < a.nz(); ++k)
    for (int j = 0; j < a.ny(); ++j)
      for (int i = 0; i < a.nx(); ++i) a(i, j, k) = 2.0 * rng.next() - 1.0;
}

inline bool interior_equal(const lcflow::Array3& a, const lcflow::Array3& b) {
  if (!a.same_shape(b)) return false;
  for (int k = 0; k < a.nz(); ++k)
    for (int j = 0; j < a.ny(); ++j)
      for (int i = 0; i < a.nx(); ++i)
        if (std::bit_cast<std::uint64_t>(a(i, j, k)) != std::bit_cast<std::uint64_t>(b(i, j, k))) return false;
  return true;
}

inline double max_diff(const lcflow::Array3& a, const lcflow::Array3& b) {
  double m = 0.0;
  for (int k = 0; k < a.nz(); ++k)
    for (int j = 0; j < a.ny(); ++j)
      for (int i = 0; i < a.nx(); ++i) m = std::max(m, std::abs(a(i, j, k) - b(i, j, k)));
  return m;
}

template <class F>
double max_diff3(const F& a, const F& b) {
  return std::max({max_diff(a[0], b[0]), max_diff(a[1], b[1]), max_diff(a[2], b[2])});
}

/// Small valid configuration used across suites.
inline lcflow::SimConfig small_config(const std::string& ic_name = "shear+twist") {
  lcflow::SimConfig c;
  c.grid = {8, 8, 8, 2 * kPi, 2 * kPi, 1.0};
  c.eps = 0.05;
  c.slip = {0.5, 0.0, 0.5};
  c.dt = 1e-3;
  c.t_final = 5e-3;
  c.ic.name = ic_name;
  c.ic.a = 0.2;
  c.ic.b = 0.5;
  c.diag_every = 2;
  return c;
}

}  // namespace testing
