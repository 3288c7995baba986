#include "lcflow/reference.hpp"

namespace lcflow::reference {

namespace {

int wrap(int i, int n) { return (i % n + n) % n; }

double stencil(const Array3& f, int i, int j, int k, const ChannelGrid& g) {
  const double c = f(i, j, k);
  return (f(i + 1, j, k) - 2.0 * c + f(i - 1, j, k)) / (g.hx * g.hx) +
         (f(i, j + 1, k) - 2.0 * c + f(i, j - 1, k)) / (g.hy * g.hy) +
         (f(i, j, k + 1) - 2.0 * c + f(i, j, k - 1)) / (g.hz * g.hz);
}

// Skew form on one control volume given its six face fluxes and the
// neighbour values of f.
double skew(double fc, const double nb[6], const double flux[6], const ChannelGrid& g) {
  const double inv_h[3] = {1.0 / g.hx, 1.0 / g.hy, 1.0 / g.hz};
  double conv = 0.0, div = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double lo = flux[2 * a], hi = flux[2 * a + 1];
    conv += inv_h[a] * (hi * 0.5 * (fc + nb[2 * a + 1]) - lo * 0.5 * (nb[2 * a] + fc));
    div += inv_h[a] * (hi - lo);
  }
  return conv - 0.5 * fc * div;
}

}  // namespace

FaceField laplacian(const FaceField& u, const ChannelGrid& g, const SlipMatrixB& B) {
  const FaceField uf = fill_ghosts_navier_slip(u, B, g);
  FaceField out = make_faces(g);
  for (int c = 0; c < 3; ++c) {
    const int nz = c == 2 ? g.nz + 1 : g.nz;
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
          if (c == 2 && (k == 0 || k == g.nz)) continue;
          out[c](i, j, k) = stencil(uf[c], i, j, k, g);
        }
  }
  return out;
}

VectorField laplacian(const VectorField& d, const ChannelGrid& g) {
  const VectorField df = fill_ghosts_neumann(d, g);
  VectorField out = make_vector(g);
  for (int c = 0; c < 3; ++c)
    for (int k = 0; k < g.nz; ++k)
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) out[c](i, j, k) = stencil(df[c], i, j, k, g);
  return out;
}

VectorField advect(const FaceField& u, const VectorField& f, const ChannelGrid& g) {
  VectorField out = make_vector(g);
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const int ip = wrap(i + 1, g.nx), im = wrap(i - 1, g.nx);
        const int jp = wrap(j + 1, g.ny), jm = wrap(j - 1, g.ny);
        const double flux[6] = {u[0](i, j, k), u[0](ip, j, k), u[1](i, j, k),
                                u[1](i, jp, k), u[2](i, j, k), u[2](i, j, k + 1)};
        for (int c = 0; c < 3; ++c) {
          const Array3& a = f[c];
          const double nb[6] = {a(im, j, k),
                                a(ip, j, k),
                                a(i, jm, k),
                                a(i, jp, k),
                                k > 0 ? a(i, j, k - 1) : 0.0,
                                k < g.nz - 1 ? a(i, j, k + 1) : 0.0};
          out[c](i, j, k) = skew(a(i, j, k), nb, flux, g);
        }
      }
  return out;
}

FaceField advect(const FaceField& u, const FaceField& f, const ChannelGrid& g) {
  FaceField out = make_faces(g);
  const Array3 &u1 = u[0], &u2 = u[1], &u3 = u[2];
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const int ip = wrap(i + 1, g.nx), im = wrap(i - 1, g.nx);
        const int jp = wrap(j + 1, g.ny), jm = wrap(j - 1, g.ny);
        auto zlo = [&](const Array3& a) { return k > 0 ? a(i, j, k - 1) : 0.0; };
        auto zhi = [&](const Array3& a) { return k < g.nz - 1 ? a(i, j, k + 1) : 0.0; };
        {
          // u1 dual cell spans [x_{i-1/2}, x_{i+1/2}]
          const double flux[6] = {0.5 * (u1(im, j, k) + u1(i, j, k)),     0.5 * (u1(i, j, k) + u1(ip, j, k)),
                                  0.5 * (u2(im, j, k) + u2(i, j, k)),     0.5 * (u2(im, jp, k) + u2(i, jp, k)),
                                  0.5 * (u3(im, j, k) + u3(i, j, k)),     0.5 * (u3(im, j, k + 1) + u3(i, j, k + 1))};
          const Array3& a = f[0];
          const double nb[6] = {a(im, j, k), a(ip, j, k), a(i, jm, k), a(i, jp, k), zlo(a), zhi(a)};
          out[0](i, j, k) = skew(a(i, j, k), nb, flux, g);
        }
        {
          const double flux[6] = {0.5 * (u1(i, jm, k) + u1(i, j, k)),     0.5 * (u1(ip, jm, k) + u1(ip, j, k)),
                                  0.5 * (u2(i, jm, k) + u2(i, j, k)),     0.5 * (u2(i, j, k) + u2(i, jp, k)),
                                  0.5 * (u3(i, jm, k) + u3(i, j, k)),     0.5 * (u3(i, jm, k + 1) + u3(i, j, k + 1))};
          const Array3& a = f[1];
          const double nb[6] = {a(im, j, k), a(ip, j, k), a(i, jm, k), a(i, jp, k), zlo(a), zhi(a)};
          out[1](i, j, k) = skew(a(i, j, k), nb, flux, g);
        }
        if (k > 0) {
          const double flux[6] = {0.5 * (u1(i, j, k - 1) + u1(i, j, k)), 0.5 * (u1(ip, j, k - 1) + u1(ip, j, k)),
                                  0.5 * (u2(i, j, k - 1) + u2(i, j, k)), 0.5 * (u2(i, jp, k - 1) + u2(i, jp, k)),
                                  0.5 * (u3(i, j, k - 1) + u3(i, j, k)), 0.5 * (u3(i, j, k) + u3(i, j, k + 1))};
          const Array3& a = f[2];
          const double nb[6] = {a(im, j, k), a(ip, j, k), a(i, jm, k), a(i, jp, k), a(i, j, k - 1), a(i, j, k + 1)};
          out[2](i, j, k) = skew(a(i, j, k), nb, flux, g);
        }
      }
  return out;
}

ScalarField divergence(const FaceField& u, const ChannelGrid& g) {
  ScalarField out = make_scalar(g);
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        out(i, j, k) = (u[0](wrap(i + 1, g.nx), j, k) - u[0](i, j, k)) / g.hx +
                       (u[1](i, wrap(j + 1, g.ny), k) - u[1](i, j, k)) / g.hy +
                       (u[2](i, j, k + 1) - u[2](i, j, k)) / g.hz;
  return out;
}

VectorField elastic_stress(const VectorField& d, const ChannelGrid& g) {
  const VectorField df = fill_ghosts_neumann(d, g);
  const VectorField lap = reference::laplacian(d, g);
  VectorField out = make_vector(g);
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        for (int c = 0; c < 3; ++c) {
          const Array3& a = df[c];
          const double L = lap[c](i, j, k);
          out[0](i, j, k) += (a(i + 1, j, k) - a(i - 1, j, k)) / (2.0 * g.hx) * L;
          out[1](i, j, k) += (a(i, j + 1, k) - a(i, j - 1, k)) / (2.0 * g.hy) * L;
          out[2](i, j, k) += (a(i, j, k + 1) - a(i, j, k - 1)) / (2.0 * g.hz) * L;
        }
      }
  return out;
}

ScalarField gradient_density(const VectorField& d, const ChannelGrid& g) {
  const VectorField lap = reference::laplacian(d, g);
  ScalarField out = make_scalar(g);
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        out(i, j, k) = -(d[0](i, j, k) * lap[0](i, j, k) + d[1](i, j, k) * lap[1](i, j, k) +
                         d[2](i, j, k) * lap[2](i, j, k));
  return out;
}

double kinetic_energy(const FaceField& u, const ChannelGrid& g) {
  double s = 0.0;
  for (int c = 0; c < 3; ++c) {
    const int nz = c == 2 ? g.nz + 1 : g.nz;
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) s += u[c](i, j, k) * u[c](i, j, k);
  }
  return 0.5 * s * g.cell_volume();
}

}  // namespace lcflow::reference
