#pragma once

#include <array>
#include <numbers>

#include "lcflow/array3.hpp"

namespace lcflow {

/// Resolution and extents of the channel, as read from configuration.
struct GridSpec {
  int nx = 0, ny = 0, nz = 0;
  double lx = 2.0 * std::numbers::pi;
  double ly = 2.0 * std::numbers::pi;
  double lz = 1.0;
};

/// Channel periodic in x and y with flat walls at z = 0 and z = lz.
///
/// Staggering (MAC):
///   cell centers      ((i+1/2)hx, (j+1/2)hy, (k+1/2)hz), i<nx, j<ny, k<nz
///   u1 faces          (i hx,      (j+1/2)hy, (k+1/2)hz)
///   u2 faces          ((i+1/2)hx, j hy,      (k+1/2)hz)
///   u3 faces          ((i+1/2)hx, (j+1/2)hy, k hz),       k<=nz (k=0,nz on walls)
struct ChannelGrid {
  int nx = 0, ny = 0, nz = 0;
  double lx = 0, ly = 0, lz = 0;
  double hx = 0, hy = 0, hz = 0;

  double xc(int i) const noexcept { return (i + 0.5) * hx; }
  double yc(int j) const noexcept { return (j + 0.5) * hy; }
  double zc(int k) const noexcept { return (k + 0.5) * hz; }
  double xf(int i) const noexcept { return i * hx; }
  double yf(int j) const noexcept { return j * hy; }
  double zf(int k) const noexcept { return k * hz; }

  double cell_volume() const noexcept { return hx * hy * hz; }
  double wall_face_area() const noexcept { return hx * hy; }
  double volume() const noexcept { return lx * ly * lz; }
  double min_spacing() const noexcept;

  friend bool operator==(const ChannelGrid&, const ChannelGrid&) = default;
};

/// Throws std::invalid_argument on non-positive counts/extents or nz < 4.
ChannelGrid make_grid(const GridSpec& spec);

using ScalarField = Array3;

/// Three cell-centered components.
struct VectorField {
  std::array<Array3, 3> c;
  Array3& operator[](int n) noexcept { return c[static_cast<std::size_t>(n)]; }
  const Array3& operator[](int n) const noexcept { return c[static_cast<std::size_t>(n)]; }
  friend bool operator==(const VectorField&, const VectorField&) = default;
};

/// Three face-staggered components; c[2] has nz+1 layers (wall faces at 0, nz).
struct FaceField {
  std::array<Array3, 3> c;
  Array3& operator[](int n) noexcept { return c[static_cast<std::size_t>(n)]; }
  const Array3& operator[](int n) const noexcept { return c[static_cast<std::size_t>(n)]; }
  friend bool operator==(const FaceField&, const FaceField&) = default;
};

ScalarField make_scalar(const ChannelGrid& g);
VectorField make_vector(const ChannelGrid& g);
FaceField make_faces(const ChannelGrid& g);

/// phi(zeta) = zeta / (1 + zeta) with zeta the distance to the nearer wall.
double conormal_weight(double z, const ChannelGrid& g);

/// Conormal derivative Z_dir f of a cell-centered scalar, dir in {1, 2, 3}.
/// Z1, Z2 are periodic central differences; Z3 = phi(z) d/dz with central
/// differences inside and one-sided second-order stencils on the first and
/// last layers. Ghost values of f are not read.
ScalarField apply_Z(const ScalarField& f, int dir, const ChannelGrid& g);

}  // namespace lcflow
