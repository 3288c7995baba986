#include "lcflow/operators.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lcflow/parallel.hpp"

namespace lcflow {

namespace {

inline int wrap(int i, int n) noexcept { return i < 0 ? i + n : (i >= n ? i - n : i); }

void check_shape(const Array3& a, int nx, int ny, int nz, const char* what) {
  if (a.nx() != nx || a.ny() != ny || a.nz() != nz)
    throw std::invalid_argument(std::string(what) + ": field shape does not match grid");
}

void check_faces(const FaceField& u, const ChannelGrid& g, const char* what) {
  check_shape(u[0], g.nx, g.ny, g.nz, what);
  check_shape(u[1], g.nx, g.ny, g.nz, what);
  check_shape(u[2], g.nx, g.ny, g.nz + 1, what);
}

void check_centers(const VectorField& f, const ChannelGrid& g, const char* what) {
  for (int c = 0; c < 3; ++c) check_shape(f[c], g.nx, g.ny, g.nz, what);
}

}  // namespace

// --- ghost layers -----------------------------------------------------------

void fill_ghosts_neumann_inplace(Array3& f) {
  const int nz = f.nz();
  for (int j = 0; j < f.ny(); ++j)
    for (int i = 0; i < f.nx(); ++i) {
      f(i, j, -1) = f(i, j, 0);
      f(i, j, nz) = f(i, j, nz - 1);
    }
  f.fill_periodic_xy();
}

void fill_ghosts_neumann_inplace(VectorField& d) {
  for (auto& c : d.c) fill_ghosts_neumann_inplace(c);
}

VectorField fill_ghosts_neumann(const VectorField& d, const ChannelGrid& g) {
  check_centers(d, g, "fill_ghosts_neumann");
  VectorField out = d;
  fill_ghosts_neumann_inplace(out);
  return out;
}

void fill_ghosts_navier_slip_inplace(FaceField& u, const SlipMatrixB& B, const ChannelGrid& g) {
  check_faces(u, g, "fill_ghosts_navier_slip");
  const int nx = g.nx, ny = g.ny, nz = g.nz;
  Array3& w = u[2];
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      w(i, j, 0) = 0.0;
      w(i, j, nz) = 0.0;
      w(i, j, -1) = -w(i, j, 1);
      w(i, j, nz + 1) = -w(i, j, nz - 1);
    }
  w.fill_periodic_xy();

  const double h = g.hz;
  // Ghost = [(1 - h b_ii/2) u_in - h b_ij ubar_other] / (1 + h b_ii/2), both walls.
  auto robin = [h](double u_in, double bii, double coupling) {
    return ((1.0 - 0.5 * h * bii) * u_in - h * coupling) / (1.0 + 0.5 * h * bii);
  };
  const int top = nz - 1;
  // Wall value of the other tangential component, interpolated to this face.
  auto wall_u2_at_u1 = [&](int i, int j, int kin, int kg) {
    const Array3& v = u[1];
    const int im = wrap(i - 1, nx), jp = wrap(j + 1, ny);
    auto wall = [&](int ii, int jj) { return 0.5 * (v(ii, jj, kin) + v(ii, jj, kg)); };
    return 0.25 * (wall(im, j) + wall(i, j) + wall(im, jp) + wall(i, jp));
  };
  auto wall_u1_at_u2 = [&](int i, int j, int kin, int kg) {
    const Array3& a = u[0];
    const int ip = wrap(i + 1, nx), jm = wrap(j - 1, ny);
    auto wall = [&](int ii, int jj) { return 0.5 * (a(ii, jj, kin) + a(ii, jj, kg)); };
    return 0.25 * (wall(i, jm) + wall(ip, jm) + wall(i, j) + wall(ip, j));
  };

  const int sweeps = B.b12 == 0.0 ? 1 : 4;
  for (int s = 0; s < sweeps; ++s) {
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const double c1b = B.b12 == 0.0 ? 0.0 : B.b12 * wall_u2_at_u1(i, j, 0, -1);
        const double c1t = B.b12 == 0.0 ? 0.0 : B.b12 * wall_u2_at_u1(i, j, top, nz);
        const double c2b = B.b12 == 0.0 ? 0.0 : B.b12 * wall_u1_at_u2(i, j, 0, -1);
        const double c2t = B.b12 == 0.0 ? 0.0 : B.b12 * wall_u1_at_u2(i, j, top, nz);
        u[0](i, j, -1) = robin(u[0](i, j, 0), B.b11, c1b);
        u[0](i, j, nz) = robin(u[0](i, j, top), B.b11, c1t);
        u[1](i, j, -1) = robin(u[1](i, j, 0), B.b22, c2b);
        u[1](i, j, nz) = robin(u[1](i, j, top), B.b22, c2t);
      }
  }
  u[0].fill_periodic_xy();
  u[1].fill_periodic_xy();
}

FaceField fill_ghosts_navier_slip(const FaceField& u, const SlipMatrixB& B, const ChannelGrid& g) {
  FaceField out = u;
  fill_ghosts_navier_slip_inplace(out, B, g);
  return out;
}

// --- interpolation ----------------------------------------------------------

VectorField faces_to_centers(const FaceField& u, const ChannelGrid& g) {
  check_faces(u, g, "faces_to_centers");
  VectorField out = make_vector(g);
  const int nx = g.nx, ny = g.ny;
  par::for_each_cell(g.nx, g.ny, g.nz, [&](int i, int j, int k) {
    out[0](i, j, k) = 0.5 * (u[0](i, j, k) + u[0](wrap(i + 1, nx), j, k));
    out[1](i, j, k) = 0.5 * (u[1](i, j, k) + u[1](i, wrap(j + 1, ny), k));
    out[2](i, j, k) = 0.5 * (u[2](i, j, k) + u[2](i, j, k + 1));
  });
  return out;
}

FaceField centers_to_faces(const VectorField& f, const ChannelGrid& g) {
  check_centers(f, g, "centers_to_faces");
  FaceField out = make_faces(g);
  const int nx = g.nx, ny = g.ny, nz = g.nz;
  par::for_each_cell(nx, ny, nz, [&](int i, int j, int k) {
    out[0](i, j, k) = 0.5 * (f[0](wrap(i - 1, nx), j, k) + f[0](i, j, k));
    out[1](i, j, k) = 0.5 * (f[1](i, wrap(j - 1, ny), k) + f[1](i, j, k));
    if (k > 0) out[2](i, j, k) = 0.5 * (f[2](i, j, k - 1) + f[2](i, j, k));
  });
  return out;
}

VectorField centered_velocity_with_ghosts(const FaceField& u, const ChannelGrid& g) {
  check_faces(u, g, "centered_velocity_with_ghosts");
  VectorField out = make_vector(g);
  const int nx = g.nx, ny = g.ny, nz = g.nz;
#pragma omp parallel for schedule(static)
  for (int k = -1; k <= nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        out[0](i, j, k) = 0.5 * (u[0](i, j, k) + u[0](wrap(i + 1, nx), j, k));
        out[1](i, j, k) = 0.5 * (u[1](i, j, k) + u[1](i, wrap(j + 1, ny), k));
        out[2](i, j, k) = 0.5 * (u[2](i, j, k) + u[2](i, j, k + 1));
      }
  for (auto& c : out.c) c.fill_periodic_xy();
  return out;
}

// --- differential operators -------------------------------------------------

EdgeVorticity edge_vorticity(const FaceField& u, const ChannelGrid& g) {
  check_faces(u, g, "edge_vorticity");
  const int nx = g.nx, ny = g.ny, nz = g.nz;
  EdgeVorticity w{Array3(nx, ny, nz + 1), Array3(nx, ny, nz + 1), Array3(nx, ny, nz)};
  const double ihx = 1.0 / g.hx, ihy = 1.0 / g.hy, ihz = 1.0 / g.hz;
  const Array3 &u1 = u[0], &u2 = u[1], &u3 = u[2];
  par::for_each_cell(nx, ny, nz + 1, [&](int i, int j, int k) {
    const int im = wrap(i - 1, nx), jm = wrap(j - 1, ny);
    w.x(i, j, k) = (u3(i, j, k) - u3(i, jm, k)) * ihy - (u2(i, j, k) - u2(i, j, k - 1)) * ihz;
    w.y(i, j, k) = (u1(i, j, k) - u1(i, j, k - 1)) * ihz - (u3(i, j, k) - u3(im, j, k)) * ihx;
    if (k < nz) w.z(i, j, k) = (u2(i, j, k) - u2(im, j, k)) * ihx - (u1(i, j, k) - u1(i, jm, k)) * ihy;
  });
  return w;
}

VectorField curl(const FaceField& u, const ChannelGrid& g) {
  const EdgeVorticity w = edge_vorticity(u, g);
  VectorField out = make_vector(g);
  const int nx = g.nx, ny = g.ny;
  par::for_each_cell(g.nx, g.ny, g.nz, [&](int i, int j, int k) {
    const int ip = wrap(i + 1, nx), jp = wrap(j + 1, ny);
    out[0](i, j, k) = 0.25 * (w.x(i, j, k) + w.x(i, jp, k) + w.x(i, j, k + 1) + w.x(i, jp, k + 1));
    out[1](i, j, k) = 0.25 * (w.y(i, j, k) + w.y(ip, j, k) + w.y(i, j, k + 1) + w.y(ip, j, k + 1));
    out[2](i, j, k) = 0.25 * (w.z(i, j, k) + w.z(ip, j, k) + w.z(i, jp, k) + w.z(ip, jp, k));
  });
  return out;
}

void laplacian_prefilled(const Array3& f, Array3& out, const ChannelGrid& g) {
  const double cx = 1.0 / (g.hx * g.hx), cy = 1.0 / (g.hy * g.hy), cz = 1.0 / (g.hz * g.hz);
  par::for_each_cell(f.nx(), f.ny(), f.nz(), [&](int i, int j, int k) {
    const double c = f(i, j, k);
    out(i, j, k) = cx * (f(i + 1, j, k) - 2.0 * c + f(i - 1, j, k)) +
                   cy * (f(i, j + 1, k) - 2.0 * c + f(i, j - 1, k)) +
                   cz * (f(i, j, k + 1) - 2.0 * c + f(i, j, k - 1));
  });
}

ScalarField laplacian(const ScalarField& f, const ChannelGrid& g, BCKind bc) {
  if (bc != BCKind::NeumannZ)
    throw std::invalid_argument("laplacian: unsupported bc for a cell-centered field");
  check_shape(f, g.nx, g.ny, g.nz, "laplacian");
  Array3 tmp = f;
  fill_ghosts_neumann_inplace(tmp);
  ScalarField out = make_scalar(g);
  laplacian_prefilled(tmp, out, g);
  return out;
}

VectorField laplacian(const VectorField& f, const ChannelGrid& g, BCKind bc) {
  VectorField out = make_vector(g);
  for (int c = 0; c < 3; ++c) out[c] = laplacian(f[c], g, bc);
  return out;
}

FaceField laplacian_prefilled(const FaceField& u, const ChannelGrid& g) {
  FaceField out = make_faces(g);
  laplacian_prefilled(u[0], out[0], g);
  laplacian_prefilled(u[1], out[1], g);
  laplacian_prefilled(u[2], out[2], g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      out[2](i, j, 0) = 0.0;
      out[2](i, j, g.nz) = 0.0;
    }
  return out;
}

FaceField laplacian(const FaceField& u, const ChannelGrid& g, const SlipMatrixB& B) {
  return laplacian_prefilled(fill_ghosts_navier_slip(u, B, g), g);
}

FaceField advect(const FaceField& u, const FaceField& f, const ChannelGrid& g) {
  check_faces(u, g, "advect");
  check_faces(f, g, "advect");
  const int nx = g.nx, ny = g.ny, nz = g.nz;
  const double ihx = 1.0 / g.hx, ihy = 1.0 / g.hy, ihz = 1.0 / g.hz;
  const Array3 &u1 = u[0], &u2 = u[1], &u3 = u[2];
  FaceField out = make_faces(g);

  // Dual-cell fluxes (lo, hi) per axis; skew form = conv - f div / 2.
  auto skew = [&](double fc, double fxm, double fxp, double fym, double fyp, double fzm, double fzp,
                  double Fxl, double Fxh, double Fyl, double Fyh, double Fzl, double Fzh) {
    const double conv = 0.5 * ihx * (Fxh * (fc + fxp) - Fxl * (fxm + fc)) +
                        0.5 * ihy * (Fyh * (fc + fyp) - Fyl * (fym + fc)) +
                        0.5 * ihz * (Fzh * (fc + fzp) - Fzl * (fzm + fc));
    const double div = ihx * (Fxh - Fxl) + ihy * (Fyh - Fyl) + ihz * (Fzh - Fzl);
    return conv - 0.5 * fc * div;
  };

  par::for_each_cell(nx, ny, nz, [&](int i, int j, int k) {
    const int im = wrap(i - 1, nx), ip = wrap(i + 1, nx);
    const int jm = wrap(j - 1, ny), jp = wrap(j + 1, ny);
    const bool bot = k == 0, topk = k == nz - 1;
    {
      const Array3& a = f[0];
      const double Fxl = 0.5 * (u1(im, j, k) + u1(i, j, k)), Fxh = 0.5 * (u1(i, j, k) + u1(ip, j, k));
      const double Fyl = 0.5 * (u2(im, j, k) + u2(i, j, k)), Fyh = 0.5 * (u2(im, jp, k) + u2(i, jp, k));
      const double Fzl = 0.5 * (u3(im, j, k) + u3(i, j, k)), Fzh = 0.5 * (u3(im, j, k + 1) + u3(i, j, k + 1));
      out[0](i, j, k) = skew(a(i, j, k), a(im, j, k), a(ip, j, k), a(i, jm, k), a(i, jp, k),
                             bot ? 0.0 : a(i, j, k - 1), topk ? 0.0 : a(i, j, k + 1), Fxl, Fxh, Fyl, Fyh,
                             Fzl, Fzh);
    }
    {
      const Array3& a = f[1];
      const double Fxl = 0.5 * (u1(i, jm, k) + u1(i, j, k)), Fxh = 0.5 * (u1(ip, jm, k) + u1(ip, j, k));
      const double Fyl = 0.5 * (u2(i, jm, k) + u2(i, j, k)), Fyh = 0.5 * (u2(i, j, k) + u2(i, jp, k));
      const double Fzl = 0.5 * (u3(i, jm, k) + u3(i, j, k)), Fzh = 0.5 * (u3(i, jm, k + 1) + u3(i, j, k + 1));
      out[1](i, j, k) = skew(a(i, j, k), a(im, j, k), a(ip, j, k), a(i, jm, k), a(i, jp, k),
                             bot ? 0.0 : a(i, j, k - 1), topk ? 0.0 : a(i, j, k + 1), Fxl, Fxh, Fyl, Fyh,
                             Fzl, Fzh);
    }
    if (k > 0) {
      const Array3& a = f[2];
      const double Fxl = 0.5 * (u1(i, j, k - 1) + u1(i, j, k)), Fxh = 0.5 * (u1(ip, j, k - 1) + u1(ip, j, k));
      const double Fyl = 0.5 * (u2(i, j, k - 1) + u2(i, j, k)), Fyh = 0.5 * (u2(i, jp, k - 1) + u2(i, jp, k));
      const double Fzl = 0.5 * (u3(i, j, k - 1) + u3(i, j, k)), Fzh = 0.5 * (u3(i, j, k) + u3(i, j, k + 1));
      out[2](i, j, k) = skew(a(i, j, k), a(im, j, k), a(ip, j, k), a(i, jm, k), a(i, jp, k), a(i, j, k - 1),
                             a(i, j, k + 1), Fxl, Fxh, Fyl, Fyh, Fzl, Fzh);
    }
  });
  return out;
}

VectorField advect(const FaceField& u, const VectorField& f, const ChannelGrid& g) {
  check_faces(u, g, "advect");
  check_centers(f, g, "advect");
  const int nx = g.nx, ny = g.ny, nz = g.nz;
  const double ihx = 1.0 / g.hx, ihy = 1.0 / g.hy, ihz = 1.0 / g.hz;
  VectorField out = make_vector(g);
  par::for_each_cell(nx, ny, nz, [&](int i, int j, int k) {
    const int im = wrap(i - 1, nx), ip = wrap(i + 1, nx);
    const int jm = wrap(j - 1, ny), jp = wrap(j + 1, ny);
    const double Fxl = u[0](i, j, k), Fxh = u[0](ip, j, k);
    const double Fyl = u[1](i, j, k), Fyh = u[1](i, jp, k);
    const double Fzl = u[2](i, j, k), Fzh = u[2](i, j, k + 1);
    const double div = ihx * (Fxh - Fxl) + ihy * (Fyh - Fyl) + ihz * (Fzh - Fzl);
    for (int c = 0; c < 3; ++c) {
      const Array3& a = f[c];
      const double fc = a(i, j, k);
      const double fzm = k == 0 ? 0.0 : a(i, j, k - 1);
      const double fzp = k == nz - 1 ? 0.0 : a(i, j, k + 1);
      const double conv = 0.5 * ihx * (Fxh * (fc + a(ip, j, k)) - Fxl * (a(im, j, k) + fc)) +
                          0.5 * ihy * (Fyh * (fc + a(i, jp, k)) - Fyl * (a(i, jm, k) + fc)) +
                          0.5 * ihz * (Fzh * (fc + fzp) - Fzl * (fzm + fc));
      out[c](i, j, k) = conv - 0.5 * fc * div;
    }
  });
  return out;
}

std::array<ScalarField, 9> cell_gradient(const VectorField& f, const ChannelGrid& g) {
  std::array<ScalarField, 9> out;
  for (auto& a : out) a = make_scalar(g);
  const double cx = 0.5 / g.hx, cy = 0.5 / g.hy, cz = 0.5 / g.hz;
  par::for_each_cell(g.nx, g.ny, g.nz, [&](int i, int j, int k) {
    for (int c = 0; c < 3; ++c) {
      const Array3& a = f[c];
      out[0 + c](i, j, k) = cx * (a(i + 1, j, k) - a(i - 1, j, k));
      out[3 + c](i, j, k) = cy * (a(i, j + 1, k) - a(i, j - 1, k));
      out[6 + c](i, j, k) = cz * (a(i, j, k + 1) - a(i, j, k - 1));
    }
  });
  return out;
}

VectorField elastic_stress(const VectorField& d, const ChannelGrid& g) {
  check_centers(d, g, "elastic_stress");
  VectorField df = fill_ghosts_neumann(d, g);
  VectorField lap = make_vector(g);
  for (int c = 0; c < 3; ++c) laplacian_prefilled(df[c], lap[c], g);
  const auto grad = cell_gradient(df, g);
  VectorField out = make_vector(g);
  par::for_each_cell(g.nx, g.ny, g.nz, [&](int i, int j, int k) {
    for (int a = 0; a < 3; ++a) {
      double s = 0.0;
      for (int c = 0; c < 3; ++c) s += grad[3 * a + c](i, j, k) * lap[c](i, j, k);
      out[a](i, j, k) = s;
    }
  });
  return out;
}

ScalarField gradient_density(const VectorField& d, const ChannelGrid& g) {
  check_centers(d, g, "gradient_density");
  VectorField df = fill_ghosts_neumann(d, g);
  ScalarField out = make_scalar(g);
  const double cx = 1.0 / (g.hx * g.hx), cy = 1.0 / (g.hy * g.hy), cz = 1.0 / (g.hz * g.hz);
  par::for_each_cell(g.nx, g.ny, g.nz, [&](int i, int j, int k) {
    double s = 0.0;
    for (int c = 0; c < 3; ++c) {
      const Array3& a = df[c];
      const double v = a(i, j, k);
      const double lap = cx * (a(i + 1, j, k) - 2.0 * v + a(i - 1, j, k)) +
                         cy * (a(i, j + 1, k) - 2.0 * v + a(i, j - 1, k)) +
                         cz * (a(i, j, k + 1) - 2.0 * v + a(i, j, k - 1));
      s -= v * lap;
    }
    out(i, j, k) = s;
  });
  return out;
}

VectorField director_source(const VectorField& d, const ChannelGrid& g, double unit_tol) {
  check_centers(d, g, "director_source");
  const double dev = par::slab_max(g.nx, g.ny, g.nz, [&](int i, int j, int k) {
    const double n = std::sqrt(d[0](i, j, k) * d[0](i, j, k) + d[1](i, j, k) * d[1](i, j, k) +
                               d[2](i, j, k) * d[2](i, j, k));
    return std::abs(n - 1.0);
  });
  if (dev > unit_tol)
    throw std::invalid_argument("director_source: director is not unit length (max ||d|-1| = " +
                                std::to_string(dev) + ")");
  const ScalarField G = gradient_density(d, g);
  VectorField out = make_vector(g);
  par::for_each_cell(g.nx, g.ny, g.nz, [&](int i, int j, int k) {
    for (int c = 0; c < 3; ++c) out[c](i, j, k) = G(i, j, k) * d[c](i, j, k);
  });
  return out;
}

}  // namespace lcflow
