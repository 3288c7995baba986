#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lcflow/sweep.hpp"

using namespace lcflow;
using testing::kPi;

namespace {

bool has_flag(const SweepResult& r, const std::string& prefix) {
  for (const auto& f : r.flags)
    if (f.rfind(prefix, 0) == 0) return true;
  return false;
}

MemberResult member(double eps, double l2, double linf) {
  MemberResult m;
  m.eps = eps;
  m.times = {0.0, 1.0};
  m.errors = {ErrorNorms{}, ErrorNorms{l2, 0.0, linf, 0.0}};
  m.final = m.errors.back();
  m.sup = m.final;
  return m;
}

SimConfig sweep_config() {
  SimConfig cfg = testing::small_config();
  cfg.grid = {4, 4, 8, 2 * kPi, 2 * kPi, 1.0};
  cfg.t_final = 4e-3;
  cfg.diag_every = 2;
  return cfg;
}

// Cheap reference: the initial state copied to the three recorded times.
Trajectory frozen_reference(const SimConfig& cfg, const Trajectory*) {
  const ChannelGrid g = make_grid(cfg.grid);
  Trajectory t;
  State s = init_state(g, cfg.ic);
  for (int n = 0; n < 3; ++n) {
    s.t = n * 2e-3;
    t.snapshots.push_back(s);
    t.trace.emplace_back();
    t.trace.back().t = s.t;
    t.trace.back().nm_value = 1.0 + n;
  }
  return t;
}

// Members perturb the reference by eps^(rate/2) in u1 and d2, so the squared
// norms scale like eps^rate.
MemberRunner power_law(double rate) {
  return [rate](const SimConfig& c, const Trajectory* ref) {
    const ChannelGrid g = make_grid(c.grid);
    Trajectory t = *ref;
    const double s = std::pow(c.eps, 0.5 * rate);
    for (std::size_t n = 0; n < t.snapshots.size(); ++n) {
      State& st = t.snapshots[n];
      const double w = double(n + 1);
      for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
          for (int i = 0; i < g.nx; ++i) {
            st.u[0](i, j, k) += w * s * std::sin(g.xf(i)) * std::cos(kPi * g.zc(k));
            st.d[1](i, j, k) += w * s * 0.3 * std::cos(g.yc(j));
          }
    }
    return t;
  };
}

}  // namespace

TEST_CASE("rate fit") {
  std::vector<std::pair<double, double>> pts;
  for (double e : {0.5, 0.1, 0.03, 0.004}) pts.emplace_back(e, 3.0 * std::pow(e, 1.5));
  const RateFit f = fit_rate(pts);
  CHECK(f.slope == doctest::Approx(1.5).epsilon(1e-13));
  CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-13));
  CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-13));

  std::vector<std::pair<double, double>> noisy = {{1.0, 1.0}, {0.5, 0.3}, {0.25, 0.05}, {0.125, 0.03}};
  std::vector<double> x, y;
  for (auto [a, b] : noisy) x.push_back(a), y.push_back(b);
  CHECK(fit_rate(noisy).slope == doctest::Approx(oracle::loglog_slope(x, y)).epsilon(1e-12));
  CHECK(fit_rate(noisy).r_squared < 1.0);

  CHECK_THROWS_AS(fit_rate({{0.1, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(fit_rate({{0.1, 1.0}, {0.05, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(fit_rate({{-0.1, 1.0}, {0.05, 1.0}}), std::invalid_argument);
}

TEST_CASE("error norms") {
  const auto g = testing::grid(6, 4, 8, 1.0, 2.0, 1.0);
  const State ref = testing::random_state(g, 12);
  const ErrorNorms zero = error_norms(ref, ref, g);
  CHECK(zero == ErrorNorms{});

  State s = ref;
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        s.u[0](i, j, k) += 0.3;
        s.d[0](i, j, k) += 0.2;
      }
  const ErrorNorms e = error_norms(s, ref, g);
  CHECK(e.u_l2sq == doctest::Approx(0.09 * g.volume()));
  CHECK(e.u_linf == doctest::Approx(0.3));
  // a constant offset has no gradient under Neumann ghosts
  CHECK(e.d_h1sq == doctest::Approx(0.04 * g.volume()));
  CHECK(e.d_w1inf == doctest::Approx(0.2));
}

TEST_CASE("state norms measure against zero") {
  const auto g = testing::grid(4, 4, 6);
  const State s = testing::random_state(g, 4);
  State z = s;
  for (auto& c : z.u.c) c.fill(0.0);
  for (auto& c : z.d.c) c.fill(0.0);
  CHECK(state_norms(s, g) == error_norms(s, z, g));
}

TEST_CASE("remainder norms agree with the pointwise assembly") {
  const auto g = testing::grid(6, 5, 8, 1.0, 1.0, 1.0);
  const State s0 = testing::random_state(g, 1, 0.4, 0.3);
  const State se = testing::random_state(g, 2, 0.4, 0.3);
  const double eps = 0.02;
  const SlipMatrixB B{0.3, 0.0, 0.8};
  const RemainderNorms r = remainder_norms(se, s0, eps, B, g);
  const auto [r1, r2] = oracle::remainder_norms(se, s0, eps, B.b11, B.b22, g);
  CHECK(r.r1 == doctest::Approx(r1).epsilon(1e-12));
  CHECK(r.r2 == doctest::Approx(r2).epsilon(1e-12));

  // identical states with eps = 0 leave nothing
  const RemainderNorms same = remainder_norms(s0, s0, 0.0, B, g);
  CHECK(same.r1 < 1e-12);
  CHECK(same.r2 < 1e-12);
}

TEST_CASE("ladder validation and the resolution guard") {
  const auto g = testing::grid(4, 4, 16, 1.0, 1.0, 1.0);
  CHECK(resolved_eps_threshold(g) == doctest::Approx(0.0625));
  CHECK_NOTHROW(validate_ladder({0.5, 0.25, 0.0625}, g, false));
  CHECK_THROWS_AS(validate_ladder({}, g, false), std::invalid_argument);
  CHECK_THROWS_AS(validate_ladder({0.5, 0.5}, g, false), std::invalid_argument);
  CHECK_THROWS_AS(validate_ladder({0.25, 0.5}, g, false), std::invalid_argument);
  CHECK_THROWS_AS(validate_ladder({1.5, 0.5}, g, false), std::invalid_argument);
  CHECK_THROWS_AS(validate_ladder({0.5, 0.0}, g, true), std::invalid_argument);
  try {
    validate_ladder({0.5, 0.01}, g, false);
    FAIL("expected throw");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("--force") != std::string::npos);
  }
  CHECK_NOTHROW(validate_ladder({0.5, 0.01}, g, true));
}

TEST_CASE("analysis of a member table") {
  SUBCASE("one point cannot be fitted") {
    SweepResult r;
    r.members = {member(0.1, 1e-3, 1e-2)};
    analyse(r);
    CHECK(r.status_l2 == "insufficient-points");
    CHECK(std::isnan(r.fit_l2.slope));
    CHECK(r.flags.empty());
  }
  SUBCASE("zero errors are invalid data") {
    SweepResult r;
    r.members = {member(0.1, 0.0, 0.0), member(0.05, 0.0, 0.0)};
    analyse(r);
    CHECK(r.status_l2 == "invalid-data");
    CHECK(r.status_linf == "invalid-data");
    CHECK(std::isnan(r.fit_linf.r_squared));
  }
  SUBCASE("clean power law") {
    SweepResult r;
    for (double e : {0.1, 0.05, 0.025}) r.members.push_back(member(e, std::pow(e, 1.5), std::pow(e, 0.5)));
    analyse(r);
    CHECK(r.status_l2 == "ok");
    CHECK(r.fit_l2.slope == doctest::Approx(1.5));
    CHECK(r.fit_linf.slope == doctest::Approx(0.5));
    CHECK(r.flags.empty());
  }
  SUBCASE("growth along the ladder is flagged") {
    SweepResult r;
    r.members = {member(0.1, 1e-3, 1.0), member(0.05, 2e-3, 1.0)};
    analyse(r);
    CHECK(has_flag(r, "monotonicity violated: err_u_l2sq"));
    CHECK(has_flag(r, "under-resolution suspected"));
  }
  SUBCASE("roundoff-level growth is tolerated relative to the reference scale") {
    SweepResult r;
    r.members = {member(0.1, std::pow(0.1, 1.5), 1.0), member(0.05, std::pow(0.05, 1.5), 1.0)};
    r.members[0].errors[0].d_h1sq = 1e-30;
    r.members[1].errors[0].d_h1sq = 2e-30;
    r.reference_scale.d_h1sq = 10.0;
    analyse(r);
    CHECK(r.flags.empty());
    r.reference_scale.d_h1sq = 0.0;
    analyse(r);
    CHECK(has_flag(r, "monotonicity violated: err_d_h1sq"));
  }
}

TEST_CASE("synthetic sweeps recover the injected rate") {
  const SimConfig cfg = sweep_config();
  SweepOptions o;
  o.force = true;
  o.reference_runner = frozen_reference;
  o.member_runner = power_law(1.5);
  const std::vector<double> ladder = {0.5, 0.25, 0.125, 0.0625, 0.03125};
  const SweepResult r = run_sweep(cfg, ladder, o);
  CHECK(r.fit_l2.slope == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(r.fit_l2.r_squared == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.fit_linf.slope == doctest::Approx(0.75).epsilon(1e-6));
  CHECK(r.status_l2 == "ok");
  CHECK_FALSE(r.partial);
  CHECK(r.eps_ladder == ladder);
  REQUIRE(r.members.size() == ladder.size());
  CHECK(r.members[0].times.size() == 3);
  CHECK(r.members[0].nm_max == 3.0);
  // sup over time is attained at the last snapshot, whose weight is largest
  CHECK(r.members[2].sup == r.members[2].final);
  CHECK(has_flag(r, "resolution guard overridden"));
  CHECK(r.config_hash != 0);

  SweepOptions o3 = o;
  o3.jobs = 3;
  const SweepResult r3 = run_sweep(cfg, ladder, o3);
  for (std::size_t n = 0; n < ladder.size(); ++n) {
    CHECK(r3.members[n].eps == r.members[n].eps);
    CHECK(r3.members[n].errors == r.members[n].errors);
  }
  CHECK(r3.flags == r.flags);
  CHECK(r3.fit_l2.slope == r.fit_l2.slope);
}

TEST_CASE("sweep guard and failures") {
  const SimConfig cfg = sweep_config();
  SweepOptions o;
  o.reference_runner = frozen_reference;
  o.member_runner = power_law(1.0);
  CHECK_THROWS_AS(run_sweep(cfg, {0.5, 0.001}, o), std::invalid_argument);

  o.force = true;
  o.jobs = 2;
  const MemberRunner good = power_law(1.0);
  o.member_runner = [good](const SimConfig& c, const Trajectory* ref) {
    if (c.eps == 0.25) throw std::runtime_error("boom");
    return good(c, ref);
  };
  try {
    run_sweep(cfg, {0.5, 0.25, 0.125}, o);
    FAIL("expected throw");
  } catch (const SweepError& e) {
    CHECK(e.partial().partial);
    CHECK(e.partial().members.size() == 2);
    CHECK(std::string(e.what()).find("boom") != std::string::npos);
    CHECK(std::string(e.what()).find("0.25") != std::string::npos);
  }

  o.member_runner = [](const SimConfig&, const Trajectory* ref) {
    Trajectory t = *ref;
    t.snapshots.pop_back();
    return t;
  };
  CHECK_THROWS_AS(run_sweep(cfg, {0.5, 0.25}, o), SweepError);
}

TEST_CASE("default runner records where the integrator records") {
  const SimConfig cfg = sweep_config();
  const Trajectory t = simulate_trajectory(cfg);
  REQUIRE(t.snapshots.size() == 3);
  REQUIRE(t.trace.size() == 3);
  for (std::size_t n = 0; n < 3; ++n) CHECK(t.snapshots[n].t == t.trace[n].t);
  CHECK(t.snapshots.back().t == doctest::Approx(cfg.t_final));
}
