#pragma once

// Manufactured solution for order-of-accuracy studies.
//
//   u(x,t) = T(t) U(x),  p(x,t) = T(t) P(x),  d(x,t) = D(x),  T(t) = 1 + t/2
//   U = ( sin(kx x) cos(ky y) cos(pi z/lz),
//         c2 cos(kx x) cos((z - lz/2)/lz),
//        -(kx lz/pi) cos(kx x) cos(ky y) sin(pi z/lz) )
//   D = (sin b cos c, sin b sin c, cos b),  b = (0.4 + 0.2 sin(kx x)) cos(pi z/lz),
//                                           c = 0.5 cos(ky y)
//
// U is solenoidal, has U.n = 0 on both walls and satisfies the Navier-slip
// condition for B = diag(0, tan(1/2)/lz); D satisfies dD/dn = 0. Forcing is
// assembled once with second-order forward-mode dual numbers, so it is exact
// up to roundoff, and recombined with T(t) each step.

#include "lcflow/fields.hpp"
#include "lcflow/operators.hpp"

namespace lcflow::mms {

SlipMatrixB required_slip(const ChannelGrid& g);

double time_factor(double t);

/// Exact fields sampled at their staggered locations; p has zero discrete mean.
State exact_state(const ChannelGrid& g, double t);

class Forcing {
 public:
  Forcing(const ChannelGrid& g, double eps);

  /// Momentum forcing on faces (z wall faces 0).
  FaceField velocity(double t) const;
  /// Director forcing at cell centers.
  VectorField director(double t) const;

 private:
  // f_u = T' U + T^2 (U.grad)U + T (grad P - eps Lap U) + grad D . Lap D
  FaceField u_lin_, u_quad_, u_t_, u_const_;
  // f_d = T (U.grad)D - Lap D - |grad D|^2 D
  VectorField d_t_, d_const_;
};

}  // namespace lcflow::mms
