#pragma once

#include <map>
#include <string>
#include <utility>

#include "lcflow/config.hpp"
#include "lcflow/fields.hpp"
#include "lcflow/operators.hpp"
#include "lcflow/pressure.hpp"

namespace lcflow {

inline constexpr int kConormalMaxOrder = 4;
inline constexpr int kLinfMaxOrder = 2;

struct DiagnosticsRecord {
  double t = 0.0;
  double kinetic = 0.0;
  double elastic = 0.0;
  double visc_diss = 0.0;
  double dir_diss = 0.0;
  double quartic = 0.0;
  double boundary_work = 0.0;
  double energy_residual = 0.0;
  double unit_dev = 0.0;
  double div_res = 0.0;
  double nm_value = 0.0;
  double eta_trace = 0.0;
  double linf_grad_u = 0.0;
  double p1_norm = 0.0;
  double p2_norm = 0.0;
  /// (field, order) -> conormal norm; fields "u" and "grad_d".
  std::map<std::pair<std::string, int>, double> conormal;

  friend bool operator==(const DiagnosticsRecord&, const DiagnosticsRecord&) = default;
};

// --- energy budget ----------------------------------------------------------

/// Budget terms of one state. Discrete definitions:
///   kinetic      1/2 sum over faces u^2 dV
///   elastic      1/2 sum over cell faces |delta d / h|^2 dV   (= -1/2 <d, L_N d>)
///   visc_diss    eps sum over edges w |omega|^2 dV, w = 1/2 on wall x/y edges
///   dir_diss     sum |L_N d|^2 dV
///   quartic      sum G^2 dV with G = -d . L_N d
///   boundary_work eps sum over wall faces ubar . B ubar dA
/// For solenoidal u with Navier-slip ghosts, -eps <u, L_h u> = visc_diss + boundary_work exactly.
struct EnergyTerms {
  double kinetic = 0.0, elastic = 0.0, visc_diss = 0.0, dir_diss = 0.0, quartic = 0.0, boundary_work = 0.0;
};
EnergyTerms energy_terms(const FaceField& u, const VectorField& d, double eps, const SlipMatrixB& B,
                         const ChannelGrid& g);

/// r = dE/dt + visc_diss + dir_diss - quartic + boundary_work, dissipation terms at the
/// time midpoint, E = kinetic + elastic.
double energy_balance_residual(const State& prev, const State& next, const SimConfig& cfg, const ChannelGrid& g);

// --- conormal norms -----------------------------------------------------------

/// sqrt(sum over |I| <= m of |Z^I f|_{L2}^2). Throws for m outside [0, 4].
double conormal_norm(const ScalarField& f, int m, const ChannelGrid& g);
double conormal_norm(const VectorField& f, int m, const ChannelGrid& g);
/// Face fields are averaged to cell centers first.
double conormal_norm(const FaceField& u, int m, const ChannelGrid& g);

/// sqrt(sum over |I| <= k of |Z^I f|_{Linf}^2). Throws for k outside [0, 2].
/// For vector fields |.|_{Linf} is the max over cells of the Euclidean length.
double linf_conormal(const ScalarField& f, int k, const ChannelGrid& g);
double linf_conormal(const VectorField& f, int k, const ChannelGrid& g);

/// Centered velocity gradient, out[3*i + j] = d_i u_j, from Navier-slip ghosts.
std::array<ScalarField, 9> velocity_gradient(const FaceField& u, const SlipMatrixB& B, const ChannelGrid& g);

/// |grad u|_{1,inf}: sqrt of sum over the nine gradient components of linf_conormal(., 1)^2.
double grad_u_linf_surrogate(const State& s, const SlipMatrixB& B, const ChannelGrid& g);

/// N_m surrogate: |u|_{H^m}^2 + |d|^2 + |grad d|_{H^m}^2 + |grad u|_{H^{m-1}}^2 + |Lap d|_{H^{m-1}}^2
/// + |grad u|_{H^{1,inf}}^2 with space-only conormal norms. With cfg.time_derivs, u_t and d_t
/// from the equations add their order-(m-1) contributions. Throws for m outside [1, 4].
double nm_surrogate(const State& s, const SimConfig& cfg, const ChannelGrid& g, int m,
                    const PoissonSolver* solver = nullptr);

// --- boundary quantity eta ----------------------------------------------------

/// Quintic smoothstep cutoff: 1 for distance-to-wall <= lz/8, 0 for >= lz/4.
double cutoff_chi(double z, const ChannelGrid& g);

/// eta = chi (omega x n + Pi(B u)) with n the outward normal of the nearer wall.
VectorField eta_field(const State& s, const SlipMatrixB& B, const ChannelGrid& g);

/// L2 norm over both walls of omega x n + Pi(B u), linearly extrapolated from the
/// first two cell layers to the wall.
double eta_trace(const State& s, const SlipMatrixB& B, const ChannelGrid& g);

// --- records ------------------------------------------------------------------

/// Full record of state s. If prev is given, energy_residual covers the step prev -> s of size dt.
DiagnosticsRecord make_record(const State& s, const State* prev, double dt, const SimConfig& cfg,
                              const ChannelGrid& g, const PoissonSolver& solver);

double l2_norm(const ScalarField& f, const ChannelGrid& g);

}  // namespace lcflow
