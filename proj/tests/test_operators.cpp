#include "doctest.h"
#include "helpers.hpp"

#include <stdexcept>

#include "lcflow/diagnostics.hpp"
#include "lcflow/operators.hpp"

using namespace lcflow;
using testing::kPi;

namespace {

double face_dot(const FaceField& a, const FaceField& b, const ChannelGrid& g) {
  double s = 0.0;
  for (int c = 0; c < 3; ++c)
    for (int k = 0; k < a[c].nz(); ++k)
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) s += a[c](i, j, k) * b[c](i, j, k);
  return s * g.cell_volume();
}

double center_dot(const VectorField& a, const VectorField& b, const ChannelGrid& g) {
  double s = 0.0;
  for (int c = 0; c < 3; ++c)
    for (int k = 0; k < g.nz; ++k)
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) s += a[c](i, j, k) * b[c](i, j, k);
  return s * g.cell_volume();
}

}  // namespace

TEST_CASE("Navier-slip ghosts satisfy the Robin relation") {
  const auto g = testing::grid(6, 5, 8);
  const State s = testing::random_state(g, 21);
  const SlipMatrixB B{0.7, 0.0, -0.4};
  const FaceField f = fill_ghosts_navier_slip(s.u, B, g);
  const double h = g.hz;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      CHECK((f[0](i, j, 0) - f[0](i, j, -1)) / h == doctest::Approx(0.7 * 0.5 * (f[0](i, j, 0) + f[0](i, j, -1))));
      CHECK((f[1](i, j, 0) - f[1](i, j, -1)) / h == doctest::Approx(-0.4 * 0.5 * (f[1](i, j, 0) + f[1](i, j, -1))));
      const int t = g.nz - 1;
      CHECK((f[0](i, j, g.nz) - f[0](i, j, t)) / h ==
            doctest::Approx(-0.7 * 0.5 * (f[0](i, j, g.nz) + f[0](i, j, t))));
      CHECK(f[2](i, j, 0) == 0.0);
      CHECK(f[2](i, j, -1) == -f[2](i, j, 1));
    }
  // periodic images
  CHECK(f[0](-1, 2, 3) == f[0](g.nx - 1, 2, 3));
  CHECK(f[1](2, g.ny, -1) == f[1](2, 0, -1));
}

TEST_CASE("zero slip matrix gives free-slip ghosts") {
  const auto g = testing::grid(4, 4, 6);
  const State s = testing::random_state(g, 2);
  const FaceField f = fill_ghosts_navier_slip(s.u, {}, g);
  CHECK(f[0](1, 2, -1) == f[0](1, 2, 0));
  CHECK(f[1](3, 1, g.nz) == f[1](3, 1, g.nz - 1));
}

TEST_CASE("off-diagonal slip couples the tangential components") {
  const auto g = testing::grid(4, 4, 6);
  const State s = testing::random_state(g, 5);
  const FaceField diag = fill_ghosts_navier_slip(s.u, {0.3, 0.0, 0.3}, g);
  const FaceField full = fill_ghosts_navier_slip(s.u, {0.3, 0.2, 0.3}, g);
  CHECK(testing::max_diff(diag[0], full[0]) == 0.0);  // interiors untouched
  double ghost_diff = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) ghost_diff = std::max(ghost_diff, std::abs(diag[0](i, j, -1) - full[0](i, j, -1)));
  CHECK(ghost_diff > 0.0);
}

TEST_CASE("advection is skew-symmetric") {
  const auto g = testing::grid(8, 6, 10, 1.0, 1.5, 1.0);
  const State s = testing::random_state(g, 9, 1.0);
  const State f = testing::random_state(g, 10, 1.0, 0.6);
  SUBCASE("face transport") {
    const FaceField a = advect(s.u, f.u, g);
    CHECK(std::abs(face_dot(f.u, a, g)) < 1e-13);
    CHECK(std::abs(face_dot(s.u, advect(s.u, s.u, g), g)) < 1e-13);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) CHECK(a[2](i, j, 0) == 0.0);
  }
  SUBCASE("center transport") {
    const VectorField a = advect(s.u, f.d, g);
    CHECK(std::abs(center_dot(f.d, a, g)) < 1e-13);
  }
}

TEST_CASE("advection by a uniform stream is a centered difference") {
  const auto g = testing::grid(16, 4, 4);
  FaceField u = make_faces(g);
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) u[0](i, j, k) = 2.0;
  VectorField f = make_vector(g);
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) f[1](i, j, k) = std::sin(g.xc(i));
  const VectorField a = advect(u, f, g);
  for (int i = 0; i < g.nx; ++i)
    CHECK(a[1](i, 1, 2) == doctest::Approx(2.0 * std::cos(g.xc(i)) * std::sin(g.hx) / g.hx).epsilon(1e-12));
}

TEST_CASE("viscous term matches dissipation plus boundary work") {
  const auto g = testing::grid(8, 6, 12, 1.0, 1.0, 1.0);
  const State s = testing::random_state(g, 4, 0.8);
  for (const SlipMatrixB B : {SlipMatrixB{0, 0, 0}, SlipMatrixB{0.5, 0, 1.5}, SlipMatrixB{-0.3, 0, 2.0}}) {
    const double eps = 0.03;
    const EnergyTerms e = energy_terms(s.u, s.d, eps, B, g);
    const double lhs = -eps * face_dot(s.u, laplacian(s.u, g, B), g);
    CHECK(lhs == doctest::Approx(e.visc_diss + e.boundary_work).epsilon(1e-10));
  }
}

TEST_CASE("face Laplacian of a smooth field converges at second order") {
  // u1 = cos(pi z) has zero normal derivative at both walls, so free slip holds
  auto err = [](int nz) {
    const auto g = testing::grid(4, 4, nz, 1.0, 1.0, 1.0);
    FaceField u = make_faces(g);
    for (int k = 0; k < g.nz; ++k)
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) u[0](i, j, k) = std::cos(kPi * g.zc(k));
    const FaceField L = laplacian(u, g, {});
    double e = 0;
    for (int k = 0; k < g.nz; ++k) e = std::max(e, std::abs(L[0](0, 0, k) + kPi * kPi * std::cos(kPi * g.zc(k))));
    return e;
  };
  const double rate = std::log2(err(16) / err(32));
  CHECK(rate == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("scalar Laplacian") {
  const auto g = testing::grid(5, 4, 6);
  ScalarField c = make_scalar(g);
  c.fill(3.0);
  CHECK(max_abs(laplacian(c, g)) < 1e-12);
  CHECK_THROWS_AS(laplacian(c, g, BCKind::NavierSlip), std::invalid_argument);
}

TEST_CASE("gradient density is nonnegative and matches the neighbour form") {
  const auto g = testing::grid(6, 5, 7, 1.0, 1.0, 1.0);
  const State s = testing::random_state(g, 31, 0.1, 0.8);
  const ScalarField G = gradient_density(s.d, g);
  const VectorField df = fill_ghosts_neumann(s.d, g);
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        CHECK(G(i, j, k) >= -1e-12);
        auto dot = [&](int a, int b, int c) {
          return df[0](i, j, k) * df[0](a, b, c) + df[1](i, j, k) * df[1](a, b, c) + df[2](i, j, k) * df[2](a, b, c);
        };
        const double form = (2.0 - dot(i + 1, j, k) - dot(i - 1, j, k)) / (g.hx * g.hx) +
                            (2.0 - dot(i, j + 1, k) - dot(i, j - 1, k)) / (g.hy * g.hy) +
                            (2.0 - dot(i, j, k + 1) - dot(i, j, k - 1)) / (g.hz * g.hz);
        CHECK(G(i, j, k) == doctest::Approx(form).epsilon(1e-9).scale(1.0));
      }
}

TEST_CASE("director source requires a unit director") {
  const auto g = testing::grid(4, 4, 4);
  VectorField d = init_state(g, {}).d;
  CHECK(max_abs(director_source(d, g)) == 0.0);
  d[2](1, 1, 1) = 1.01;
  CHECK_THROWS_AS(director_source(d, g), std::invalid_argument);
  CHECK_NOTHROW(director_source(d, g, 0.1));
}

TEST_CASE("elastic stress of a z-only director points along z") {
  const auto g = testing::grid(4, 4, 16, 1.0, 1.0, 1.0);
  InitialConditionSpec ic;
  ic.name = "shear+twist";
  ic.a = 0.0;
  ic.b = 0.8;
  const State s = init_state(g, ic);
  const VectorField t = elastic_stress(s.d, g);
  CHECK(max_abs(t[0]) == 0.0);
  CHECK(max_abs(t[1]) == 0.0);
  CHECK(max_abs(t[2]) > 0.1);
}

TEST_CASE("edge vorticity of a linear shear") {
  const auto g = testing::grid(4, 4, 8, 1.0, 1.0, 1.0);
  FaceField u = make_faces(g);
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) u[0](i, j, k) = g.zc(k);
  // ghosts by linear extension
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      u[0](i, j, -1) = -g.zc(0);
      u[0](i, j, g.nz) = g.zc(g.nz);
    }
  for (auto& c : u.c) c.fill_periodic_xy();
  const EdgeVorticity w = edge_vorticity(u, g);
  for (int k = 0; k <= g.nz; ++k) {
    CHECK(w.y(1, 2, k) == doctest::Approx(1.0));
    CHECK(w.x(1, 2, k) == 0.0);
  }
  const VectorField c = curl(u, g);
  CHECK(c[1](2, 1, 3) == doctest::Approx(1.0));
  CHECK(max_abs(c[2]) == 0.0);
}

TEST_CASE("interpolation preserves constants") {
  const auto g = testing::grid(5, 4, 6);
  VectorField f = make_vector(g);
  for (int c = 0; c < 3; ++c) f[c].fill(c + 1.0);
  const FaceField u = centers_to_faces(f, g);
  CHECK(u[0](2, 2, 2) == 1.0);
  CHECK(u[1](0, 3, 5) == 2.0);
  CHECK(u[2](1, 1, 3) == 3.0);
  CHECK(u[2](1, 1, 0) == 0.0);
  CHECK(u[2](1, 1, g.nz) == 0.0);
  const VectorField back = faces_to_centers(u, g);
  CHECK(back[0](4, 0, 0) == 1.0);
  CHECK(back[2](2, 2, 0) == 1.5);
  CHECK(back[2](2, 2, 3) == 3.0);
}

TEST_CASE("cell gradient is exact on linear fields") {
  const auto g = testing::grid(4, 4, 8, 1.0, 1.0, 1.0);
  VectorField f = make_vector(g);
  for (int k = -1; k <= g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) f[1](i, j, k) = 2.0 * g.zc(k);
  for (auto& c : f.c) c.fill_periodic_xy();
  const auto grad = cell_gradient(f, g);
  CHECK(grad[6 + 1](2, 1, 4) == doctest::Approx(2.0));
  CHECK(grad[0 + 1](2, 1, 4) == 0.0);
}

TEST_CASE("operators reject mismatched shapes") {
  const auto g = testing::grid(4, 4, 4);
  const auto h = testing::grid(4, 4, 6);
  CHECK_THROWS_AS(advect(make_faces(h), make_faces(h), g), std::invalid_argument);
  CHECK_THROWS_AS(elastic_stress(make_vector(h), g), std::invalid_argument);
  CHECK_THROWS_AS(edge_vorticity(make_faces(h), g), std::invalid_argument);
}
