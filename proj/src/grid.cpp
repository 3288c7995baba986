#include "lcflow/grid.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "lcflow/parallel.hpp"

namespace lcflow {

double ChannelGrid::min_spacing() const noexcept { return std::min({hx, hy, hz}); }

ChannelGrid make_grid(const GridSpec& s) {
  if (s.nx <= 0 || s.ny <= 0 || s.nz <= 0)
    throw std::invalid_argument("grid cell counts must be positive");
  if (!(s.lx > 0) || !(s.ly > 0) || !(s.lz > 0))
    throw std::invalid_argument("grid extents must be positive");
  if (s.nz < 4) throw std::invalid_argument("nz too small (need nz >= 4, got " + std::to_string(s.nz) + ")");
  ChannelGrid g;
  g.nx = s.nx;
  g.ny = s.ny;
  g.nz = s.nz;
  g.lx = s.lx;
  g.ly = s.ly;
  g.lz = s.lz;
  g.hx = s.lx / s.nx;
  g.hy = s.ly / s.ny;
  g.hz = s.lz / s.nz;
  return g;
}

ScalarField make_scalar(const ChannelGrid& g) { return Array3(g.nx, g.ny, g.nz); }

VectorField make_vector(const ChannelGrid& g) {
  return VectorField{{Array3(g.nx, g.ny, g.nz), Array3(g.nx, g.ny, g.nz), Array3(g.nx, g.ny, g.nz)}};
}

FaceField make_faces(const ChannelGrid& g) {
  return FaceField{{Array3(g.nx, g.ny, g.nz), Array3(g.nx, g.ny, g.nz), Array3(g.nx, g.ny, g.nz + 1)}};
}

double conormal_weight(double z, const ChannelGrid& g) {
  if (!(z >= 0.0 && z <= g.lz))
    throw std::invalid_argument("conormal_weight: z = " + std::to_string(z) + " outside [0, lz]");
  const double zeta = std::min(z, g.lz - z);
  return zeta / (1.0 + zeta);
}

ScalarField apply_Z(const ScalarField& f, int dir, const ChannelGrid& g) {
  if (dir < 1 || dir > 3) throw std::invalid_argument("apply_Z: direction must be 1, 2 or 3");
  if (f.nx() != g.nx || f.ny() != g.ny || f.nz() != g.nz)
    throw std::invalid_argument("apply_Z: field shape does not match grid");
  ScalarField out = make_scalar(g);
  const int nx = g.nx, ny = g.ny, nz = g.nz;
  if (dir == 1) {
    const double c = 0.5 / g.hx;
    par::for_each_cell(nx, ny, nz, [&](int i, int j, int k) {
      const int ip = (i + 1) % nx, im = (i + nx - 1) % nx;
      out(i, j, k) = c * (f(ip, j, k) - f(im, j, k));
    });
  } else if (dir == 2) {
    const double c = 0.5 / g.hy;
    par::for_each_cell(nx, ny, nz, [&](int i, int j, int k) {
      const int jp = (j + 1) % ny, jm = (j + ny - 1) % ny;
      out(i, j, k) = c * (f(i, jp, k) - f(i, jm, k));
    });
  } else {
    std::vector<double> w(static_cast<std::size_t>(nz));
    for (int k = 0; k < nz; ++k) w[static_cast<std::size_t>(k)] = conormal_weight(g.zc(k), g) * 0.5 / g.hz;
    par::for_each_cell(nx, ny, nz, [&](int i, int j, int k) {
      double d;
      if (k == 0)
        d = -3.0 * f(i, j, 0) + 4.0 * f(i, j, 1) - f(i, j, 2);
      else if (k == nz - 1)
        d = 3.0 * f(i, j, k) - 4.0 * f(i, j, k - 1) + f(i, j, k - 2);
      else
        d = f(i, j, k + 1) - f(i, j, k - 1);
      out(i, j, k) = w[static_cast<std::size_t>(k)] * d;
    });
  }
  return out;
}

}  // namespace lcflow
