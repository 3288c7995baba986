#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "lcflow/config.hpp"
#include "lcflow/diagnostics.hpp"
#include "lcflow/sweep.hpp"

namespace lcflow {

// --- configuration ------------------------------------------------------------
//
//   [grid]    nx ny nz (required), lx ly lz
//   [physics] eps (required), b11 b12 b22, mms_forcing
//   [time]    dt t_final (required), cfl_safety energy_tol solver_tol poisson max_iterations
//   [ic]      name a b seed kmax
//   [diag]    diag_every diag_m time_derivs div_tol unit_tol
//   [sweep]   ladder (comma separated) force jobs
//
// `#` starts a comment; booleans are 0/1/true/false; poisson is spectral or cg.

/// Configuration error; line() is 0 when the problem is not tied to one line.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& what, int line) : std::invalid_argument(what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

SimConfig parse_config(const std::string& text);
SimConfig load_config(const std::filesystem::path& path);

/// Canonical document; parse_config(format_config(c)) == c.
std::string format_config(const SimConfig& cfg);

/// FNV-1a 64 of the canonical document.
std::uint64_t config_hash(const SimConfig& cfg);

/// Levenshtein distance, used for key suggestions.
std::size_t edit_distance(const std::string& a, const std::string& b);

// --- CSV ----------------------------------------------------------------------

inline constexpr const char* kDiagHeader =
    "t,kinetic,elastic,visc_diss,dir_diss,quartic,boundary_work,energy_residual,unit_dev,div_res,nm_value,"
    "eta_trace,linf_grad_u,p1_norm,p2_norm";
inline constexpr const char* kSweepHeader = "eps,err_u_l2sq,err_d_h1sq,err_u_linf,err_d_w1inf,wall_time_s";

/// 17 significant digits.
std::string format_double(double v);

void write_diag_csv(const std::vector<DiagnosticsRecord>& records, const std::filesystem::path& path);
/// Columns of the diag CSV only (conormal entries are not serialized).
std::vector<DiagnosticsRecord> read_diag_csv(const std::filesystem::path& path);

struct SweepRow {
  double eps = 0.0;
  ErrorNorms err;
  double wall_time_s = 0.0;
};

/// One row per member at t_final, in ladder order.
void write_sweep_csv(const SweepResult& result, const std::filesystem::path& path);
std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path);

/// Member table, sup-in-time errors, fits, flags and metadata as plain text.
std::string sweep_report(const SweepResult& result);
void write_text(const std::string& text, const std::filesystem::path& path);

/// Rebuilds a result from CSV rows (final errors only) and re-runs analyse().
SweepResult result_from_rows(const std::vector<SweepRow>& rows);

// --- checkpoints --------------------------------------------------------------
//
// "LCFLOW1\0", u64 config hash, u64 nx ny nz, f64 t, i64 step, then little-endian
// f64 blocks u1 u2 u3 (u3 with nz+1 layers) p d1 d2 d3, interior only, x fastest.

inline constexpr char kCheckpointMagic[8] = {'L', 'C', 'F', 'L', 'O', 'W', '1', '\0'};

struct Checkpoint {
  std::uint64_t config_hash = 0;
  State state;
};

void write_checkpoint(const State& s, std::uint64_t hash, const ChannelGrid& g, const std::filesystem::path& path);
/// Throws std::invalid_argument on a bad magic, a dimension mismatch or truncation.
Checkpoint read_checkpoint(const std::filesystem::path& path, const ChannelGrid& g);

}  // namespace lcflow
