#include "lcflow/pressure.hpp"

#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <sstream>
#include <vector>

#include <fftw3.h>

#include "lcflow/parallel.hpp"

namespace lcflow {

namespace {

// The FFTW planner is not thread-safe; execution of an existing plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

inline int wrap(int i, int n) noexcept { return i < 0 ? i + n : (i >= n ? i - n : i); }

double dot(const Array3& a, const Array3& b) {
  return par::slab_sum(a.nx(), a.ny(), a.nz(), [&](int i, int j, int k) { return a(i, j, k) * b(i, j, k); });
}

double norm2(const Array3& a) { return std::sqrt(dot(a, a)); }

double interior_sum(const Array3& a) {
  return par::slab_sum(a.nx(), a.ny(), a.nz(), [&](int i, int j, int k) { return a(i, j, k); });
}

void subtract_mean(Array3& a) {
  const double mean = interior_sum(a) / static_cast<double>(a.interior_size());
  par::for_each_cell(a.nx(), a.ny(), a.nz(), [&](int i, int j, int k) { a(i, j, k) -= mean; });
}

// out = (sigma I - L_N) x
void apply_shifted(const Array3& x, Array3& out, double sigma, const ChannelGrid& g) {
  Array3 tmp = x;
  fill_ghosts_neumann_inplace(tmp);
  laplacian_prefilled(tmp, out, g);
  par::for_each_cell(g.nx, g.ny, g.nz, [&](int i, int j, int k) { out(i, j, k) = sigma * x(i, j, k) - out(i, j, k); });
}

double residual_norm(const Array3& x, const Array3& rhs, double sigma, const ChannelGrid& g) {
  Array3 ax = make_scalar(g);
  apply_shifted(x, ax, sigma, g);
  return std::sqrt(par::slab_sum(g.nx, g.ny, g.nz, [&](int i, int j, int k) {
    const double r = ax(i, j, k) - rhs(i, j, k);
    return r * r;
  }));
}

}  // namespace

struct PoissonSolver::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  int nxc = 0;                 // nx/2 + 1 complex columns
  std::vector<double> lambda;  // transverse eigenvalue per (jy, ix) mode
};

PoissonSolver::PoissonSolver(const ChannelGrid& g, PoissonMethod method, int max_iterations)
    : grid_(g), method_(method), max_iterations_(max_iterations), plans_(std::make_unique<Plans>()) {
  const int nx = g.nx, ny = g.ny, nz = g.nz;
  Plans& p = *plans_;
  p.nxc = nx / 2 + 1;
  p.lambda.resize(static_cast<std::size_t>(ny) * p.nxc);
  for (int jy = 0; jy < ny; ++jy)
    for (int ix = 0; ix < p.nxc; ++ix) {
      const double lx = (2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * ix / nx)) / (g.hx * g.hx);
      const double ly = (2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * jy / ny)) / (g.hy * g.hy);
      p.lambda[static_cast<std::size_t>(jy) * p.nxc + ix] = lx + ly;
    }
  if (method_ != PoissonMethod::Spectral) return;

  const std::size_t nreal = static_cast<std::size_t>(nx) * ny * nz;
  const std::size_t ncplx = static_cast<std::size_t>(p.nxc) * ny * nz;
  double* in = fftw_alloc_real(nreal);
  fftw_complex* out = fftw_alloc_complex(ncplx);
  const int n[2] = {ny, nx};
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    p.forward = fftw_plan_many_dft_r2c(2, n, nz, in, nullptr, 1, nx * ny, out, nullptr, 1, p.nxc * ny, flags);
    p.backward = fftw_plan_many_dft_c2r(2, n, nz, out, nullptr, 1, p.nxc * ny, in, nullptr, 1, nx * ny,
                                        flags | FFTW_DESTROY_INPUT);
  }
  fftw_free(in);
  fftw_free(out);
  if (!p.forward || !p.backward) throw std::runtime_error("PoissonSolver: FFTW planning failed");
}

PoissonSolver::~PoissonSolver() {
  if (!plans_) return;
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plans_->forward) fftw_destroy_plan(plans_->forward);
  if (plans_->backward) fftw_destroy_plan(plans_->backward);
}

ScalarField PoissonSolver::solve(const ScalarField& rhs, double sigma, double tolerance) const {
  const ChannelGrid& g = grid_;
  if (rhs.nx() != g.nx || rhs.ny() != g.ny || rhs.nz() != g.nz)
    throw std::invalid_argument("PoissonSolver::solve: rhs shape does not match grid");
  if (sigma < 0.0) throw std::invalid_argument("PoissonSolver::solve: sigma must be >= 0");
  if (method_ == PoissonMethod::ConjugateGradient) return solve_cg(rhs, sigma, tolerance);

  ScalarField x = solve_spectral(rhs, sigma);
  const double target = tolerance * norm2(rhs);
  double res = residual_norm(x, rhs, sigma, g);
  // One or two refinement sweeps absorb roundoff on badly scaled grids.
  for (int it = 0; it < 2 && res > target; ++it) {
    Array3 ax = make_scalar(g);
    apply_shifted(x, ax, sigma, g);
    Array3 r = make_scalar(g);
    par::for_each_cell(g.nx, g.ny, g.nz, [&](int i, int j, int k) { r(i, j, k) = rhs(i, j, k) - ax(i, j, k); });
    if (sigma == 0.0) subtract_mean(r);
    const Array3 dx = solve_spectral(r, sigma);
    par::for_each_cell(g.nx, g.ny, g.nz, [&](int i, int j, int k) { x(i, j, k) += dx(i, j, k); });
    res = residual_norm(x, rhs, sigma, g);
  }
  if (res > target) {
    std::ostringstream msg;
    msg << "Poisson solve did not reach tolerance: residual " << res << " > " << target;
    throw SolverError(msg.str(), res);
  }
  return x;
}

ScalarField PoissonSolver::solve_spectral(const ScalarField& rhs, double sigma) const {
  const ChannelGrid& g = grid_;
  const Plans& p = *plans_;
  const int nx = g.nx, ny = g.ny, nz = g.nz, nxc = p.nxc;
  const std::size_t plane = static_cast<std::size_t>(nx) * ny;
  const std::size_t cplane = static_cast<std::size_t>(nxc) * ny;

  std::vector<double> buf(plane * nz);
  std::vector<std::complex<double>> spec(cplane * nz);
  par::for_each_cell(nx, ny, nz, [&](int i, int j, int k) {
    buf[static_cast<std::size_t>(k) * plane + static_cast<std::size_t>(j) * nx + i] = rhs(i, j, k);
  });
  fftw_execute_dft_r2c(p.forward, buf.data(), reinterpret_cast<fftw_complex*>(spec.data()));

  const double c = 1.0 / (g.hz * g.hz), hz2 = g.hz * g.hz;
  const int nmodes = static_cast<int>(cplane);
#pragma omp parallel
  {
    std::vector<double> cp(static_cast<std::size_t>(nz));
    std::vector<std::complex<double>> dp(static_cast<std::size_t>(nz));
#pragma omp for schedule(static)
    for (int m = 0; m < nmodes; ++m) {
      auto at = [&](int k) -> std::complex<double>& { return spec[static_cast<std::size_t>(k) * cplane + m]; };
      const double diag = sigma + p.lambda[static_cast<std::size_t>(m)];
      if (diag == 0.0) {
        // Singular mean mode: march the Neumann recurrence, gauge fixed afterwards.
        for (int k = 0; k < nz; ++k) dp[static_cast<std::size_t>(k)] = at(k);
        at(0) = 0.0;
        at(1) = -hz2 * dp[0];
        for (int k = 1; k + 1 < nz; ++k) at(k + 1) = 2.0 * at(k) - at(k - 1) - hz2 * dp[static_cast<std::size_t>(k)];
        std::complex<double> mean = 0.0;
        for (int k = 0; k < nz; ++k) mean += at(k);
        mean /= static_cast<double>(nz);
        for (int k = 0; k < nz; ++k) at(k) -= mean;
        continue;
      }
      // Thomas algorithm: off-diagonals -c, Neumann end rows carry diag + c.
      auto diag_at = [&](int k) { return diag + ((k == 0 || k == nz - 1) ? c : 2.0 * c); };
      double b = diag_at(0);
      cp[0] = -c / b;
      dp[0] = at(0) / b;
      for (int k = 1; k < nz; ++k) {
        b = diag_at(k) + c * cp[static_cast<std::size_t>(k - 1)];
        cp[static_cast<std::size_t>(k)] = -c / b;
        dp[static_cast<std::size_t>(k)] = (at(k) + c * dp[static_cast<std::size_t>(k - 1)]) / b;
      }
      at(nz - 1) = dp[static_cast<std::size_t>(nz - 1)];
      for (int k = nz - 2; k >= 0; --k)
        at(k) = dp[static_cast<std::size_t>(k)] - cp[static_cast<std::size_t>(k)] * at(k + 1);
    }
  }

  fftw_execute_dft_c2r(p.backward, reinterpret_cast<fftw_complex*>(spec.data()), buf.data());
  ScalarField x = make_scalar(g);
  const double scale = 1.0 / static_cast<double>(plane);
  par::for_each_cell(nx, ny, nz, [&](int i, int j, int k) {
    x(i, j, k) = scale * buf[static_cast<std::size_t>(k) * plane + static_cast<std::size_t>(j) * nx + i];
  });
  return x;
}

ScalarField PoissonSolver::solve_cg(const ScalarField& rhs, double sigma, double tolerance) const {
  const ChannelGrid& g = grid_;
  ScalarField b = rhs;
  if (sigma == 0.0) subtract_mean(b);
  ScalarField x = make_scalar(g), r = b, d = b, q = make_scalar(g);
  const double target = tolerance * norm2(rhs);
  double rr = dot(r, r);
  for (int it = 0; it < max_iterations_ && std::sqrt(rr) > target; ++it) {
    apply_shifted(d, q, sigma, g);
    const double alpha = rr / dot(d, q);
    par::for_each_cell(g.nx, g.ny, g.nz, [&](int i, int j, int k) {
      x(i, j, k) += alpha * d(i, j, k);
      r(i, j, k) -= alpha * q(i, j, k);
    });
    const double rr_new = dot(r, r);
    const double beta = rr_new / rr;
    rr = rr_new;
    par::for_each_cell(g.nx, g.ny, g.nz, [&](int i, int j, int k) { d(i, j, k) = r(i, j, k) + beta * d(i, j, k); });
  }
  if (sigma == 0.0) subtract_mean(x);
  const double res = residual_norm(x, rhs, sigma, g);
  if (res > target) {
    std::ostringstream msg;
    msg << "conjugate gradient did not converge in " << max_iterations_ << " iterations: residual " << res
        << " > " << target;
    throw SolverError(msg.str(), res);
  }
  return x;
}

ScalarField neumann_laplacian(const ScalarField& f, const ChannelGrid& g) {
  return laplacian(f, g, BCKind::NeumannZ);
}

ScalarField solve_poisson_neumann(const PoissonProblem& prob, const PoissonSolver& solver) {
  const ChannelGrid& g = solver.grid();
  if (prob.rhs.nx() != g.nx || prob.rhs.ny() != g.ny || prob.rhs.nz() != g.nz)
    throw std::invalid_argument("solve_poisson_neumann: rhs shape does not match grid");
  auto wall_ok = [&](const WallData& w) { return w.v.empty() || (w.nx == g.nx && w.ny == g.ny); };
  if (!wall_ok(prob.neumann_bottom) || !wall_ok(prob.neumann_top))
    throw std::invalid_argument("solve_poisson_neumann: wall data shape does not match grid");

  // Fold the wall fluxes into the first/last cell layer: L_N p = rhs - g/hz there.
  ScalarField r = prob.rhs;
  double flux = 0.0, flux_abs = 0.0;
  for (int s = 0; s < 2; ++s) {
    const WallData& w = s == 0 ? prob.neumann_bottom : prob.neumann_top;
    if (w.v.empty()) continue;
    const int k = s == 0 ? 0 : g.nz - 1;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        r(i, j, k) -= w(i, j) / g.hz;
        flux += w(i, j);
        flux_abs += std::abs(w(i, j));
      }
  }
  flux *= g.wall_face_area();
  flux_abs *= g.wall_face_area();
  const double vol = g.cell_volume();
  const double src = interior_sum(prob.rhs) * vol;
  const double src_abs =
      par::slab_sum(g.nx, g.ny, g.nz, [&](int i, int j, int k) { return std::abs(prob.rhs(i, j, k)); }) * vol;
  const double defect = std::abs(src - flux);
  const double scale = src_abs + flux_abs + prob.operand_scale;
  if (defect > kCompatTol * scale) {
    std::ostringstream msg;
    msg << "Neumann problem incompatible: |int rhs - oint g| = " << defect << " exceeds " << kCompatTol
        << " * (|rhs|_1 + |g|_1) = " << kCompatTol * scale;
    throw CompatibilityError(msg.str(), defect);
  }
  subtract_mean(r);
  // (0 I - L_N) p = -r
  par::for_each_cell(g.nx, g.ny, g.nz, [&](int i, int j, int k) { r(i, j, k) = -r(i, j, k); });
  return solver.solve(r, 0.0, prob.tolerance);
}

Projection project(const FaceField& u_star, double dt, const PoissonSolver& solver, double tolerance) {
  const ChannelGrid& g = solver.grid();
  if (!(dt > 0.0)) throw std::invalid_argument("project: dt must be positive");
  ScalarField div = discrete_divergence(u_star, g);
  par::for_each_cell(g.nx, g.ny, g.nz, [&](int i, int j, int k) { div(i, j, k) /= dt; });
  // sum of |face flux| / dt bounds the roundoff in the integrated divergence
  double flux_abs = 0.0;
  for (int c = 0; c < 3; ++c) {
    const double area = c == 0 ? g.hy * g.hz : c == 1 ? g.hx * g.hz : g.hx * g.hy;
    const int nzc = c == 2 ? g.nz + 1 : g.nz;
    flux_abs += area * par::slab_sum(g.nx, g.ny, nzc, [&](int i, int j, int k) { return std::abs(u_star[c](i, j, k)); });
  }
  PoissonProblem prob{std::move(div), WallData(g.nx, g.ny), WallData(g.nx, g.ny), tolerance, flux_abs / dt};
  Projection out{u_star, solve_poisson_neumann(prob, solver)};
  const FaceField gp = discrete_gradient(out.p_update, g);
  for (int c = 0; c < 3; ++c) {
    const Array3& a = gp[c];
    Array3& u = out.u[c];
    const int nzc = c == 2 ? g.nz + 1 : g.nz;
    par::for_each_cell(g.nx, g.ny, nzc, [&](int i, int j, int k) { u(i, j, k) -= dt * a(i, j, k); });
  }
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      out.u[2](i, j, 0) = 0.0;
      out.u[2](i, j, g.nz) = 0.0;
    }
  return out;
}

PressureSplitData pressure_split_data(const State& s, double eps, const SlipMatrixB& B, const ChannelGrid& g) {
  const FaceField uf = fill_ghosts_navier_slip(s.u, B, g);
  FaceField n = advect(uf, uf, g);
  const FaceField st = centers_to_faces(elastic_stress(s.d, g), g);
  for (int c = 0; c < 3; ++c) {
    auto a = n[c].storage();
    auto b = st[c].storage();
    for (std::size_t m = 0; m < a.size(); ++m) a[m] += b[m];
  }
  PressureSplitData out{discrete_divergence(n, g), WallData(g.nx, g.ny), WallData(g.nx, g.ny),
                        WallData(g.nx, g.ny), WallData(g.nx, g.ny)};
  par::for_each_cell(g.nx, g.ny, g.nz, [&](int i, int j, int k) { out.rhs1(i, j, k) = -out.rhs1(i, j, k); });
  // (u.grad u).n vanishes on a flat wall with u.n = 0, so g1 stays zero.
  if (eps != 0.0) {
    const EdgeVorticity w = edge_vorticity(uf, g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const int ip = wrap(i + 1, g.nx), jp = wrap(j + 1, g.ny);
        auto curl3 = [&](int k) {
          return (w.y(ip, j, k) - w.y(i, j, k)) / g.hx - (w.x(i, jp, k) - w.x(i, j, k)) / g.hy;
        };
        // (Lap u).n = -(curl w).n; n = -e_z at the bottom, +e_z at the top.
        out.g2_bottom(i, j) = eps * curl3(0);
        out.g2_top(i, j) = -eps * curl3(g.nz);
      }
  }
  return out;
}

PressureSplit pressure_split(const State& s, double eps, const SlipMatrixB& B, const PoissonSolver& solver,
                             double tolerance) {
  const ChannelGrid& g = solver.grid();
  PressureSplitData data = pressure_split_data(s, eps, B, g);
  PoissonProblem p1{std::move(data.rhs1), std::move(data.g1_bottom), std::move(data.g1_top), tolerance};
  PoissonProblem p2{make_scalar(g), std::move(data.g2_bottom), std::move(data.g2_top), tolerance};
  return {solve_poisson_neumann(p1, solver), solve_poisson_neumann(p2, solver)};
}

}  // namespace lcflow
