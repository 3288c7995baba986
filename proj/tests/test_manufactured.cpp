#include "doctest.h"
#include "helpers.hpp"

#include <array>
#include <functional>
#include <stdexcept>

#include "lcflow/integrator.hpp"
#include "lcflow/manufactured.hpp"

using namespace lcflow;
using testing::kPi;

namespace {

// The manufactured fields written out again by hand; derivatives below come
// from finite differences of these closures, not from the library's duals.
struct Exact {
  double kx, ky, lz;
  double c2 = 0.5;
  double u(int c, double x, double y, double z) const {
    switch (c) {
      case 0: return std::sin(kx * x) * std::cos(ky * y) * std::cos(kPi * z / lz);
      case 1: return c2 * std::cos(kx * x) * std::cos((z - 0.5 * lz) / lz);
      default: return -(kx * lz / kPi) * std::cos(kx * x) * std::cos(ky * y) * std::sin(kPi * z / lz);
    }
  }
  double p(double x, double y, double z) const {
    return 0.5 * std::cos(kx * x) * std::sin(ky * y) * std::cos(kPi * z / lz);
  }
  double d(int c, double x, double y, double z) const {
    const double b = (0.4 + 0.2 * std::sin(kx * x)) * std::cos(kPi * z / lz);
    const double g = 0.5 * std::cos(ky * y);
    return c == 0 ? std::sin(b) * std::cos(g) : c == 1 ? std::sin(b) * std::sin(g) : std::cos(b);
  }
};

using Fn = std::function<double(double, double, double)>;

constexpr double kStep = 1e-3;

std::array<double, 3> shift(int a, double h) {
  std::array<double, 3> s{0, 0, 0};
  s[static_cast<std::size_t>(a)] = h;
  return s;
}

// fourth-order central differences
double d1(const Fn& f, int a, double x, double y, double z) {
  auto at = [&](double h) {
    const auto s = shift(a, h);
    return f(x + s[0], y + s[1], z + s[2]);
  };
  return (-at(2 * kStep) + 8 * at(kStep) - 8 * at(-kStep) + at(-2 * kStep)) / (12 * kStep);
}

double lap(const Fn& f, double x, double y, double z) {
  double s = 0;
  for (int a = 0; a < 3; ++a) {
    auto at = [&](double h) {
      const auto sh = shift(a, h);
      return f(x + sh[0], y + sh[1], z + sh[2]);
    };
    s += (-at(2 * kStep) + 16 * at(kStep) - 30 * at(0) + 16 * at(-kStep) - at(-2 * kStep)) / (12 * kStep * kStep);
  }
  return s;
}

}  // namespace

TEST_CASE("required slip matches the wall derivative of the exact velocity") {
  const auto g = testing::grid(8, 8, 8, 2.0, 3.0, 1.7);
  const Exact ex{2 * kPi / g.lx, 2 * kPi / g.ly, g.lz};
  const SlipMatrixB B = mms::required_slip(g);
  CHECK(B.b11 == 0.0);
  CHECK(B.b12 == 0.0);
  const Fn u2 = [&](double x, double y, double z) { return ex.u(1, x, y, z); };
  const Fn u1 = [&](double x, double y, double z) { return ex.u(0, x, y, z); };
  for (const double x : {0.1, 0.9, 1.7}) {
    // bottom: d_z u = +B u; top: d_z u = -B u
    CHECK(d1(u2, 2, x, 0.4, 0.0) == doctest::Approx(B.b22 * ex.u(1, x, 0.4, 0.0)).epsilon(1e-8));
    CHECK(d1(u2, 2, x, 0.4, g.lz) == doctest::Approx(-B.b22 * ex.u(1, x, 0.4, g.lz)).epsilon(1e-8));
    CHECK(std::abs(d1(u1, 2, x, 0.4, 0.0)) < 1e-9);
  }
}

TEST_CASE("time factor") {
  CHECK(mms::time_factor(0.0) == 1.0);
  CHECK(mms::time_factor(0.5) == 1.25);
}

TEST_CASE("exact state samples the formulas") {
  const auto g = testing::grid(8, 6, 10, 2.0, 3.0, 1.0);
  const Exact ex{2 * kPi / g.lx, 2 * kPi / g.ly, g.lz};
  const State s = mms::exact_state(g, 0.4);
  const double T = 1.2;
  CHECK(s.t == 0.4);
  CHECK(unit_deviation(s.d) < 1e-15);
  CHECK(s.u[0](3, 2, 5) == doctest::Approx(T * ex.u(0, g.xf(3), g.yc(2), g.zc(5))));
  CHECK(s.u[1](3, 2, 5) == doctest::Approx(T * ex.u(1, g.xc(3), g.yf(2), g.zc(5))));
  CHECK(s.u[2](3, 2, 5) == doctest::Approx(T * ex.u(2, g.xc(3), g.yc(2), g.zf(5))));
  CHECK(s.d[0](1, 4, 9) == doctest::Approx(ex.d(0, g.xc(1), g.yc(4), g.zc(9))));
  double psum = 0;
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) psum += s.p(i, j, k);
  CHECK(std::abs(psum) < 1e-12);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      CHECK(s.u[2](i, j, 0) == 0.0);
      CHECK(s.u[2](i, j, g.nz) == 0.0);
    }
}

TEST_CASE("discrete divergence of the exact velocity is second order") {
  auto div = [](int n) {
    const auto g = testing::grid(n, n, n, 2 * kPi, 2 * kPi, 1.0);
    return max_abs(discrete_divergence(mms::exact_state(g, 0.0).u, g));
  };
  CHECK(std::log2(div(16) / div(32)) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("forcing equals the continuous residual of the exact solution") {
  const auto g = testing::grid(6, 5, 8, 2.0, 3.0, 1.0);
  const Exact ex{2 * kPi / g.lx, 2 * kPi / g.ly, g.lz};
  const double eps = 0.03, t = 0.6, T = mms::time_factor(t);
  const mms::Forcing forcing(g, eps);
  const FaceField fu = forcing.velocity(t);
  const VectorField fd = forcing.director(t);

  auto uc = [&](int c) { return Fn([&ex, c](double x, double y, double z) { return ex.u(c, x, y, z); }); };
  auto dc = [&](int c) { return Fn([&ex, c](double x, double y, double z) { return ex.d(c, x, y, z); }); };
  const Fn p = [&](double x, double y, double z) { return ex.p(x, y, z); };

  auto momentum = [&](int c, double x, double y, double z) {
    double adv = 0, stress = 0;
    for (int a = 0; a < 3; ++a) adv += ex.u(a, x, y, z) * d1(uc(c), a, x, y, z);
    for (int m = 0; m < 3; ++m) stress += d1(dc(m), c, x, y, z) * lap(dc(m), x, y, z);
    return 0.5 * ex.u(c, x, y, z) + T * T * adv + T * (d1(p, c, x, y, z) - eps * lap(uc(c), x, y, z)) + stress;
  };
  auto director = [&](int c, double x, double y, double z) {
    double adv = 0, g2 = 0;
    for (int a = 0; a < 3; ++a) {
      adv += ex.u(a, x, y, z) * d1(dc(c), a, x, y, z);
      for (int m = 0; m < 3; ++m) g2 += d1(dc(m), a, x, y, z) * d1(dc(m), a, x, y, z);
    }
    return T * adv - lap(dc(c), x, y, z) - g2 * ex.d(c, x, y, z);
  };

  for (const auto& [i, j, k] : {std::array{0, 0, 1}, std::array{3, 2, 0}, std::array{5, 4, 7}, std::array{2, 1, 4}}) {
    CAPTURE(i);
    CAPTURE(k);
    CHECK(fu[0](i, j, k) == doctest::Approx(momentum(0, g.xf(i), g.yc(j), g.zc(k))).epsilon(1e-6));
    CHECK(fu[1](i, j, k) == doctest::Approx(momentum(1, g.xc(i), g.yf(j), g.zc(k))).epsilon(1e-6));
    if (k > 0) CHECK(fu[2](i, j, k) == doctest::Approx(momentum(2, g.xc(i), g.yc(j), g.zf(k))).epsilon(1e-6));
    for (int c = 0; c < 3; ++c)
      CHECK(fd[c](i, j, k) == doctest::Approx(director(c, g.xc(i), g.yc(j), g.zc(k))).epsilon(1e-6));
  }
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) CHECK(fu[2](i, j, 0) == 0.0);
}

TEST_CASE("forced runs need the matching slip matrix") {
  SimConfig cfg = testing::small_config("mms");
  cfg.mms_forcing = true;
  const ChannelGrid g = make_grid(cfg.grid);
  CHECK_THROWS_AS(Integrator(cfg, g), std::invalid_argument);
  cfg.slip = mms::required_slip(g);
  CHECK_NOTHROW(Integrator(cfg, g));
}
