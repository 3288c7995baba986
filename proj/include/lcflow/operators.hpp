#pragma once

#include <array>

#include "lcflow/grid.hpp"

namespace lcflow {

/// Tangential 2x2 block of the slip matrix B = 2(A - S(n)) at a flat wall.
struct SlipMatrixB {
  double b11 = 0.0, b12 = 0.0, b22 = 0.0;

  std::array<double, 2> apply(double u1, double u2) const noexcept {
    return {b11 * u1 + b12 * u2, b12 * u1 + b22 * u2};
  }
  bool is_zero() const noexcept { return b11 == 0.0 && b12 == 0.0 && b22 == 0.0; }
  friend bool operator==(const SlipMatrixB&, const SlipMatrixB&) = default;
};

enum class BCKind { NeumannZ, NavierSlip };

// --- ghost layers -----------------------------------------------------------

/// Periodic in x,y; even reflection across both walls.
void fill_ghosts_neumann_inplace(Array3& f);
void fill_ghosts_neumann_inplace(VectorField& d);
VectorField fill_ghosts_neumann(const VectorField& d, const ChannelGrid& g);

/// Normal wall faces are zeroed and odd-reflected. Tangential ghosts satisfy
/// the discrete Robin relation (u_0 - u_g)/hz = B (u_0 + u_g)/2 at the bottom
/// and (u_g - u_top)/hz = -B (u_g + u_top)/2 at the top, i.e. n x curl u = [Bu]_tau.
/// An off-diagonal b12 couples the staggered components through a short
/// fixed-point iteration on the interpolated wall values.
void fill_ghosts_navier_slip_inplace(FaceField& u, const SlipMatrixB& B, const ChannelGrid& g);
FaceField fill_ghosts_navier_slip(const FaceField& u, const SlipMatrixB& B, const ChannelGrid& g);

// --- interpolation ----------------------------------------------------------

VectorField faces_to_centers(const FaceField& u, const ChannelGrid& g);
/// Averages center values onto faces; wall faces of the normal component are 0.
FaceField centers_to_faces(const VectorField& f, const ChannelGrid& g);
/// Cell-centered velocity including its z ghost layers, from a ghost-filled face field.
VectorField centered_velocity_with_ghosts(const FaceField& u_filled, const ChannelGrid& g);

// --- differential operators -------------------------------------------------

/// Vorticity sampled on cell edges.
///   x: ((i+1/2)hx, j hy, k hz)   k = 0..nz
///   y: (i hx, (j+1/2)hy, k hz)   k = 0..nz
///   z: (i hx, j hy, (k+1/2)hz)   k = 0..nz-1
/// Wall edges (k = 0, nz of x and y) read the tangential ghosts.
struct EdgeVorticity {
  Array3 x, y, z;
};
EdgeVorticity edge_vorticity(const FaceField& u_filled, const ChannelGrid& g);

/// Curl averaged from edges to cell centers. Ghost layers must be filled.
VectorField curl(const FaceField& u_filled, const ChannelGrid& g);

/// 7-point Laplacian. Cell-centered fields only support BCKind::NeumannZ.
ScalarField laplacian(const ScalarField& f, const ChannelGrid& g, BCKind bc = BCKind::NeumannZ);
VectorField laplacian(const VectorField& f, const ChannelGrid& g, BCKind bc = BCKind::NeumannZ);
/// Face-staggered Laplacian with Navier-slip ghosts; wall faces of u3 return 0.
FaceField laplacian(const FaceField& u, const ChannelGrid& g, const SlipMatrixB& B);

/// Same stencils, reading ghosts the caller has already filled.
void laplacian_prefilled(const Array3& f, Array3& out, const ChannelGrid& g);
FaceField laplacian_prefilled(const FaceField& u_filled, const ChannelGrid& g);

/// Skew-symmetric transport 1/2[u.grad f + div(u f)] on the MAC dual cells.
/// sum f . advect(u, f) vanishes to roundoff for any u with zero wall flux.
FaceField advect(const FaceField& u, const FaceField& f, const ChannelGrid& g);
VectorField advect(const FaceField& u, const VectorField& f, const ChannelGrid& g);

/// Centered first derivatives of a ghost-filled center field: out[3*i + j] = d_i f_j.
std::array<ScalarField, 9> cell_gradient(const VectorField& f_filled, const ChannelGrid& g);

/// (grad d . Lap d)_i = sum_j d_i d_j Lap d_j at cell centers (Neumann ghosts).
VectorField elastic_stress(const VectorField& d, const ChannelGrid& g);

/// Discrete |grad d|^2 density G = -d . Lap_h d (Neumann ghosts). For unit d
/// it equals sum over the six neighbours of (1 - d.d_nb)/h^2 >= 0.
ScalarField gradient_density(const VectorField& d, const ChannelGrid& g);

/// G d, the |grad d|^2 d source of the director equation.
/// Throws std::invalid_argument when max||d| - 1| exceeds unit_tol.
VectorField director_source(const VectorField& d, const ChannelGrid& g, double unit_tol = 1e-10);

}  // namespace lcflow
