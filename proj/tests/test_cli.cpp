#include "doctest.h"
#include "helpers.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lcflow/cli.hpp"
#include "lcflow/io.hpp"

using namespace lcflow;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "lcflow_test_cli";
  fs::create_directories(dir);
  return dir;
}

struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "lcflow");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli(int(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path write_config(const SimConfig& cfg, const std::string& name) {
  const fs::path p = scratch() / name;
  write_text(format_config(cfg), p);
  return p;
}

}  // namespace

TEST_CASE("usage errors exit with the validation code") {
  CHECK(invoke({}).code == kExitValidation);
  CHECK(invoke({"fly"}).code == kExitValidation);
  CHECK(invoke({"simulate"}).code == kExitValidation);
  const Outcome missing = invoke({"simulate", "--config", (scratch() / "nope.cfg").string()});
  CHECK(missing.code == kExitValidation);
  CHECK(missing.err.find("nope.cfg") != std::string::npos);
  CHECK(invoke({"--help"}).code == kExitOk);
}

TEST_CASE("config typos surface with a suggestion") {
  const fs::path p = scratch() / "typo.cfg";
  write_text("[grid]\nnx = 4\nny = 4\nnz = 8\n[physics]\nepz = 0.1\n[time]\ndt = 0.1\nt_final = 0.1\n", p);
  const Outcome o = invoke({"simulate", "--config", p.string()});
  CHECK(o.code == kExitValidation);
  CHECK(o.err.find("line 6: unknown key 'epz', did you mean 'eps'?") != std::string::npos);
}

TEST_CASE("simulate then diagnose reproduces the inline record") {
  SimConfig cfg = testing::small_config();
  cfg.t_final = 4e-3;
  const fs::path c = write_config(cfg, "sim.cfg");
  const fs::path chk = scratch() / "sim.chk", diag = scratch() / "sim.csv", again = scratch() / "again.csv";
  const Outcome o = invoke({"simulate", "--config", c.string(), "--checkpoint-out", chk.string(), "--diag-out",
                            diag.string()});
  REQUIRE(o.code == kExitOk);
  CHECK(o.out.find("steps = 4") != std::string::npos);
  const Outcome d = invoke({"diagnose", "--checkpoint", chk.string(), "--config", c.string(), "--out", again.string()});
  REQUIRE(d.code == kExitOk);
  CHECK(d.err.empty());
  const auto inline_trace = read_diag_csv(diag);
  const auto recomputed = read_diag_csv(again);
  REQUIRE(recomputed.size() == 1);
  DiagnosticsRecord a = inline_trace.back(), b = recomputed.front();
  // a lone checkpoint has no previous state, so it carries no energy residual
  CHECK(b.energy_residual == 0.0);
  a.energy_residual = 0.0;
  const double fields[][2] = {{a.t, b.t},
                              {a.kinetic, b.kinetic},
                              {a.elastic, b.elastic},
                              {a.visc_diss, b.visc_diss},
                              {a.dir_diss, b.dir_diss},
                              {a.quartic, b.quartic},
                              {a.boundary_work, b.boundary_work},
                              {a.unit_dev, b.unit_dev},
                              {a.div_res, b.div_res},
                              {a.nm_value, b.nm_value},
                              {a.eta_trace, b.eta_trace},
                              {a.linf_grad_u, b.linf_grad_u},
                              {a.p1_norm, b.p1_norm},
                              {a.p2_norm, b.p2_norm}};
  for (const auto& f : fields) CHECK(std::abs(f[0] - f[1]) <= 1e-14 * std::max(1.0, std::abs(f[0])));

  SimConfig other = cfg;
  other.eps = 0.07;
  const fs::path c2 = write_config(other, "other.cfg");
  const Outcome w = invoke({"diagnose", "--checkpoint", chk.string(), "--config", c2.string(), "--out", again.string()});
  CHECK(w.code == kExitOk);
  CHECK(w.err.find("hash mismatch") != std::string::npos);
}

TEST_CASE("a blown-up run exits with the runtime code and keeps its trace") {
  SimConfig cfg = testing::small_config("random-solenoidal");
  cfg.ic.a = 1e4;
  const fs::path c = write_config(cfg, "blow.cfg");
  const fs::path diag = scratch() / "blow.csv";
  fs::remove(diag);
  const Outcome o = invoke({"simulate", "--config", c.string(), "--diag-out", diag.string()});
  CHECK(o.code == kExitRuntime);
  CHECK(o.err.find("CFL") != std::string::npos);
  CHECK(read_diag_csv(diag).size() == 1);
}

TEST_CASE("rate-fit reads a sweep CSV") {
  const fs::path p = scratch() / "rates.csv";
  std::string text = std::string(kSweepHeader) + "\n";
  for (double e : {0.4, 0.2, 0.1, 0.05})
    text += format_double(e) + "," + format_double(2 * std::pow(e, 1.5)) + ",0," + format_double(std::sqrt(e)) +
            ",0,0\n";
  write_text(text, p);
  const Outcome o = invoke({"rate-fit", "--csv", p.string()});
  CHECK(o.code == kExitOk);
  const auto pos = o.out.find("fitted_slope_l2 = ");
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(o.out.substr(pos + 18)) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(o.out.find("status = ok") != std::string::npos);

  write_text("eps,wrong\n", p);
  CHECK(invoke({"rate-fit", "--csv", p.string()}).code == kExitValidation);
}

TEST_CASE("sweep output does not depend on --jobs") {
  SimConfig cfg = testing::small_config("random-solenoidal");
  cfg.grid = {4, 4, 8, 2 * testing::kPi, 2 * testing::kPi, 1.0};
  cfg.t_final = 3e-3;
  cfg.diag_every = 3;
  cfg.sweep.ladder = {0.5, 0.25, 0.125};
  cfg.sweep.force = true;  // (4 hz)^2 = 0.25 on this grid
  const fs::path c = write_config(cfg, "sweep.cfg");
  const fs::path a = scratch() / "j1", b = scratch() / "j3";
  const Outcome oa = invoke({"sweep", "--config", c.string(), "--out", a.string(), "--jobs", "1", "--no-timing"});
  const Outcome ob = invoke({"sweep", "--config", c.string(), "--out", b.string(), "--jobs", "3", "--no-timing"});
  REQUIRE(oa.code == kExitOk);
  REQUIRE(ob.code == kExitOk);
  CHECK(slurp(a / "sweep.csv") == slurp(b / "sweep.csv"));
  CHECK(slurp(a / "report.txt") == slurp(b / "report.txt"));
  CHECK(read_sweep_csv(a / "sweep.csv").size() == 3);
  CHECK(read_sweep_csv(a / "sweep.csv")[0].wall_time_s == 0.0);

  CHECK(invoke({"sweep", "--config", c.string(), "--out", a.string(), "--jobs", "0"}).code == kExitValidation);
  cfg.sweep.ladder = {0.5, 0.001};
  cfg.sweep.force = false;
  const fs::path guarded = write_config(cfg, "guard.cfg");
  const Outcome g = invoke({"sweep", "--config", guarded.string(), "--out", a.string()});
  CHECK(g.code == kExitValidation);
  CHECK(g.err.find("--force") != std::string::npos);
}
