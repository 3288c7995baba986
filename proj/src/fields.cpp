#include "lcflow/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "lcflow/manufactured.hpp"
#include "lcflow/parallel.hpp"
#include "lcflow/pressure.hpp"

namespace lcflow {

namespace {

constexpr double kPi = std::numbers::pi;

inline int wrap(int i, int n) noexcept { return i < 0 ? i + n : (i >= n ? i - n : i); }

State blank_state(const ChannelGrid& g) { return State{make_faces(g), make_scalar(g), make_vector(g), 0.0, 0}; }

void set_director(State& s, const ChannelGrid& g, double x, double y, double z) {
  par::for_each_cell(g.nx, g.ny, g.nz, [&](int i, int j, int k) {
    s.d[0](i, j, k) = x;
    s.d[1](i, j, k) = y;
    s.d[2](i, j, k) = z;
  });
}

FaceField project_initial(const FaceField& u, const ChannelGrid& g) {
  const PoissonSolver solver(g);
  return project(u, 1.0, solver, 1e-12).u;
}

// One random Fourier mode; cos(kz pi z/lz) keeps dn = 0, sin vanishes on the walls.
struct Mode {
  int kx, ky, kz;
  double amp[3];
  double phase;
};

std::vector<Mode> draw_modes(UniformStream& rng, int kmax) {
  std::vector<Mode> modes;
  for (int kz = 0; kz <= kmax; ++kz)
    for (int ky = -kmax; ky <= kmax; ++ky)
      for (int kx = -kmax; kx <= kmax; ++kx) {
        if (kx * kx + ky * ky + kz * kz > kmax * kmax) continue;
        Mode m{kx, ky, kz, {}, 0.0};
        for (double& a : m.amp) a = 2.0 * rng.next() - 1.0;
        m.phase = 2.0 * kPi * rng.next();
        modes.push_back(m);
      }
  return modes;
}

double mode_value(const Mode& m, int c, double x, double y, double z, const ChannelGrid& g, bool wall_zero) {
  const double arg = 2.0 * kPi * (m.kx * x / g.lx + m.ky * y / g.ly) + m.phase;
  const double zf = wall_zero ? std::sin(m.kz * kPi * z / g.lz) : std::cos(m.kz * kPi * z / g.lz);
  return m.amp[c] * std::cos(arg) * zf;
}

State random_solenoidal(const ChannelGrid& g, const InitialConditionSpec& ic) {
  if (ic.kmax < 1) throw std::invalid_argument("random-solenoidal: kmax must be >= 1");
  UniformStream rng(ic.seed);
  const std::vector<Mode> um = draw_modes(rng, ic.kmax);
  const std::vector<Mode> dm = draw_modes(rng, ic.kmax);
  State s = blank_state(g);
  FaceField u = make_faces(g);
  par::for_each_cell(g.nx, g.ny, g.nz + 1, [&](int i, int j, int k) {
    double a = 0.0, b = 0.0, c = 0.0;
    for (const Mode& m : um) {
      if (k < g.nz) {
        a += mode_value(m, 0, g.xf(i), g.yc(j), g.zc(k), g, false);
        b += mode_value(m, 1, g.xc(i), g.yf(j), g.zc(k), g, false);
      }
      if (k > 0 && k < g.nz) c += mode_value(m, 2, g.xc(i), g.yc(j), g.zf(k), g, true);
    }
    if (k < g.nz) {
      u[0](i, j, k) = a;
      u[1](i, j, k) = b;
    }
    if (k > 0 && k < g.nz) u[2](i, j, k) = c;
  });
  u = project_initial(u, g);
  const double m = max_abs(u);
  if (m > 0.0)
    for (auto& comp : u.c)
      for (double& v : comp.storage()) v *= ic.a / m;
  s.u = u;

  par::for_each_cell(g.nx, g.ny, g.nz, [&](int i, int j, int k) {
    double v[3] = {0.0, 0.0, 1.0};
    for (const Mode& md : dm)
      for (int c = 0; c < 3; ++c) v[c] += ic.b * mode_value(md, c, g.xc(i), g.yc(j), g.zc(k), g, false);
    for (int c = 0; c < 3; ++c) s.d[c](i, j, k) = v[c];
  });
  return s;
}

}  // namespace

bool is_known_initial_condition(const std::string& name) {
  return name == "rest" || name == "shear+twist" || name == "random-solenoidal" || name == "mms";
}

State init_state(const ChannelGrid& g, const InitialConditionSpec& ic) {
  if (!is_known_initial_condition(ic.name))
    throw std::invalid_argument("unknown initial condition '" + ic.name +
                                "' (expected rest, shear+twist, random-solenoidal or mms)");
  State s = blank_state(g);
  if (ic.name == "rest") {
    set_director(s, g, 0.0, 0.0, 1.0);
    return s;
  }
  if (ic.name == "mms") return mms::exact_state(g, 0.0);

  if (ic.name == "shear+twist") {
    FaceField u = make_faces(g);
    par::for_each_cell(g.nx, g.ny, g.nz, [&](int i, int j, int k) {
      u[0](i, j, k) = ic.a * std::sin(kPi * g.zc(k) / g.lz) * std::cos(2.0 * kPi * g.yc(j) / g.ly);
    });
    s.u = ic.a == 0.0 ? u : project_initial(u, g);
    par::for_each_cell(g.nx, g.ny, g.nz, [&](int i, int j, int k) {
      const double beta = ic.b * std::cos(kPi * g.zc(k) / g.lz);
      s.d[0](i, j, k) = std::sin(beta);
      s.d[1](i, j, k) = 0.0;
      s.d[2](i, j, k) = std::cos(beta);
    });
  } else {
    s = random_solenoidal(g, ic);
  }
  try {
    s.d = renormalize_director(s.d);
  } catch (const std::domain_error& e) {
    throw std::invalid_argument(std::string("initial condition '") + ic.name + "': " + e.what());
  }
  return s;
}

VectorField renormalize_director(const VectorField& d, double floor) {
  const int nx = d[0].nx(), ny = d[0].ny(), nz = d[0].nz();
  VectorField out = d;
  // The first offending cell in storage order is reported, independent of threads.
  std::vector<int> bad(static_cast<std::size_t>(nz), -1);
#pragma omp parallel for schedule(static)
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const double a = d[0](i, j, k), b = d[1](i, j, k), c = d[2](i, j, k);
        const double n = std::sqrt(a * a + b * b + c * c);
        if (!(n > floor)) {
          if (bad[static_cast<std::size_t>(k)] < 0) bad[static_cast<std::size_t>(k)] = j * nx + i;
          continue;
        }
        out[0](i, j, k) = a / n;
        out[1](i, j, k) = b / n;
        out[2](i, j, k) = c / n;
      }
  for (int k = 0; k < nz; ++k)
    if (const int idx = bad[static_cast<std::size_t>(k)]; idx >= 0) {
      std::ostringstream msg;
      msg << "degenerate director at cell (" << idx % nx << ", " << idx / nx << ", " << k << ")";
      throw std::domain_error(msg.str());
    }
  return out;
}

double unit_deviation(const VectorField& d) {
  return par::slab_max(d[0].nx(), d[0].ny(), d[0].nz(), [&](int i, int j, int k) {
    const double a = d[0](i, j, k), b = d[1](i, j, k), c = d[2](i, j, k);
    return std::abs(std::sqrt(a * a + b * b + c * c) - 1.0);
  });
}

ScalarField discrete_divergence(const FaceField& u, const ChannelGrid& g) {
  if (u[0].nx() != g.nx || u[0].ny() != g.ny || u[0].nz() != g.nz || u[2].nz() != g.nz + 1)
    throw std::invalid_argument("discrete_divergence: field shape does not match grid");
  ScalarField out = make_scalar(g);
  const double ihx = 1.0 / g.hx, ihy = 1.0 / g.hy, ihz = 1.0 / g.hz;
  const int nx = g.nx, ny = g.ny;
  par::for_each_cell(g.nx, g.ny, g.nz, [&](int i, int j, int k) {
    out(i, j, k) = ihx * (u[0](wrap(i + 1, nx), j, k) - u[0](i, j, k)) +
                   ihy * (u[1](i, wrap(j + 1, ny), k) - u[1](i, j, k)) +
                   ihz * (u[2](i, j, k + 1) - u[2](i, j, k));
  });
  return out;
}

FaceField discrete_gradient(const ScalarField& p, const ChannelGrid& g) {
  if (p.nx() != g.nx || p.ny() != g.ny || p.nz() != g.nz)
    throw std::invalid_argument("discrete_gradient: field shape does not match grid");
  FaceField out = make_faces(g);
  const double ihx = 1.0 / g.hx, ihy = 1.0 / g.hy, ihz = 1.0 / g.hz;
  const int nx = g.nx, ny = g.ny;
  par::for_each_cell(g.nx, g.ny, g.nz, [&](int i, int j, int k) {
    out[0](i, j, k) = ihx * (p(i, j, k) - p(wrap(i - 1, nx), j, k));
    out[1](i, j, k) = ihy * (p(i, j, k) - p(i, wrap(j - 1, ny), k));
    if (k > 0) out[2](i, j, k) = ihz * (p(i, j, k) - p(i, j, k - 1));
  });
  return out;
}

double max_abs(const Array3& a) {
  return par::slab_max(a.nx(), a.ny(), a.nz(), [&](int i, int j, int k) { return std::abs(a(i, j, k)); });
}

double max_abs(const FaceField& u) { return std::max({max_abs(u[0]), max_abs(u[1]), max_abs(u[2])}); }

double max_abs(const VectorField& f) { return std::max({max_abs(f[0]), max_abs(f[1]), max_abs(f[2])}); }

}  // namespace lcflow
