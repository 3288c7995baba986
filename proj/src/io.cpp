#include "lcflow/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace lcflow {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string at_line(int line, const std::string& msg) {
  return line > 0 ? "line " + std::to_string(line) + ": " + msg : msg;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

template <class Int>
bool parse_int(const std::string& s, Int& out) {
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

bool parse_bool(const std::string& s, bool& out) {
  if (s == "1" || s == "true") return out = true, true;
  if (s == "0" || s == "false") return out = false, true;
  return false;
}

using Setter = std::function<void(SimConfig&, const std::string&, int)>;

struct KeySpec {
  std::string section, key;
  Setter set;
};

[[noreturn]] void type_error(int line, const std::string& key, const char* what, const std::string& v) {
  throw ConfigError(at_line(line, "key '" + key + "' expects " + what + ", got '" + v + "'"), line);
}

Setter real(double SimConfig::*field) {
  return [field](SimConfig& c, const std::string& v, int line) {
    if (!parse_double(v, c.*field)) type_error(line, "value", "a number", v);
  };
}

template <class F>
Setter real_at(F&& get) {
  return [get](SimConfig& c, const std::string& v, int line) {
    if (!parse_double(v, get(c))) type_error(line, "value", "a number", v);
  };
}

template <class F>
Setter integer_at(F&& get) {
  return [get](SimConfig& c, const std::string& v, int line) {
    if (!parse_int(v, get(c))) type_error(line, "value", "an integer", v);
  };
}

template <class F>
Setter boolean_at(F&& get) {
  return [get](SimConfig& c, const std::string& v, int line) {
    if (!parse_bool(v, get(c))) type_error(line, "value", "0, 1, true or false", v);
  };
}

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = [] {
    std::vector<KeySpec> t;
    auto add = [&](const char* sec, const char* key, Setter s) { t.push_back({sec, key, std::move(s)}); };
    add("grid", "nx", integer_at([](SimConfig& c) -> int& { return c.grid.nx; }));
    add("grid", "ny", integer_at([](SimConfig& c) -> int& { return c.grid.ny; }));
    add("grid", "nz", integer_at([](SimConfig& c) -> int& { return c.grid.nz; }));
    add("grid", "lx", real_at([](SimConfig& c) -> double& { return c.grid.lx; }));
    add("grid", "ly", real_at([](SimConfig& c) -> double& { return c.grid.ly; }));
    add("grid", "lz", real_at([](SimConfig& c) -> double& { return c.grid.lz; }));
    add("physics", "eps", real(&SimConfig::eps));
    add("physics", "b11", real_at([](SimConfig& c) -> double& { return c.slip.b11; }));
    add("physics", "b12", real_at([](SimConfig& c) -> double& { return c.slip.b12; }));
    add("physics", "b22", real_at([](SimConfig& c) -> double& { return c.slip.b22; }));
    add("physics", "mms_forcing", boolean_at([](SimConfig& c) -> bool& { return c.mms_forcing; }));
    add("time", "dt", real(&SimConfig::dt));
    add("time", "t_final", real(&SimConfig::t_final));
    add("time", "cfl_safety", real(&SimConfig::cfl_safety));
    add("time", "energy_tol", real(&SimConfig::energy_tol));
    add("time", "solver_tol", real(&SimConfig::solver_tol));
    add("time", "poisson", [](SimConfig& c, const std::string& v, int line) {
      if (v == "spectral")
        c.poisson = PoissonMethod::Spectral;
      else if (v == "cg")
        c.poisson = PoissonMethod::ConjugateGradient;
      else
        type_error(line, "poisson", "spectral or cg", v);
    });
    add("time", "max_iterations", integer_at([](SimConfig& c) -> int& { return c.max_iterations; }));
    add("ic", "name", [](SimConfig& c, const std::string& v, int) { c.ic.name = v; });
    add("ic", "a", real_at([](SimConfig& c) -> double& { return c.ic.a; }));
    add("ic", "b", real_at([](SimConfig& c) -> double& { return c.ic.b; }));
    add("ic", "seed", integer_at([](SimConfig& c) -> std::uint64_t& { return c.ic.seed; }));
    add("ic", "kmax", integer_at([](SimConfig& c) -> int& { return c.ic.kmax; }));
    add("diag", "diag_every", integer_at([](SimConfig& c) -> int& { return c.diag_every; }));
    add("diag", "diag_m", integer_at([](SimConfig& c) -> int& { return c.diag_m; }));
    add("diag", "time_derivs", boolean_at([](SimConfig& c) -> bool& { return c.time_derivs; }));
    add("diag", "div_tol", real(&SimConfig::div_tol));
    add("diag", "unit_tol", real(&SimConfig::unit_tol));
    add("sweep", "ladder", [](SimConfig& c, const std::string& v, int line) {
      std::vector<double> out;
      std::stringstream ss(v);
      std::string item;
      while (std::getline(ss, item, ',')) {
        double x;
        if (!parse_double(trim(item), x)) type_error(line, "ladder", "a comma-separated list of numbers", v);
        out.push_back(x);
      }
      c.sweep.ladder = std::move(out);
    });
    add("sweep", "force", boolean_at([](SimConfig& c) -> bool& { return c.sweep.force; }));
    add("sweep", "jobs", integer_at([](SimConfig& c) -> int& { return c.sweep.jobs; }));
    return t;
  }();
  return table;
}

const char* kSections[] = {"grid", "physics", "time", "ic", "diag", "sweep"};
const char* kRequired[] = {"nx", "ny", "nz", "eps", "dt", "t_final"};

}  // namespace

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

SimConfig parse_config(const std::string& text) {
  SimConfig cfg;
  std::map<std::string, int> seen;  // key -> line
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(raw.substr(0, raw.find('#')));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(at_line(line, "malformed section header '" + s + "'"), line);
      section = trim(s.substr(1, s.size() - 2));
      if (std::find(std::begin(kSections), std::end(kSections), section) == std::end(kSections))
        throw ConfigError(at_line(line, "unknown section [" + section + "]"), line);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(at_line(line, "expected 'key = value', got '" + s + "'"), line);
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (section.empty()) throw ConfigError(at_line(line, "key '" + key + "' appears before any [section]"), line);
    if (value.empty()) throw ConfigError(at_line(line, "key '" + key + "' has no value"), line);

    const auto& table = key_table();
    const auto it = std::find_if(table.begin(), table.end(), [&](const KeySpec& k) { return k.key == key; });
    if (it == table.end()) {
      const KeySpec* best = nullptr;
      std::size_t best_d = 0;
      for (const KeySpec& k : table) {
        const std::size_t d = edit_distance(key, k.key);
        if (!best || d < best_d || (d == best_d && k.section == section && best->section != section))
          best = &k, best_d = d;
      }
      std::string msg = "unknown key '" + key + "'";
      if (best && best_d <= std::max<std::size_t>(2, key.size() / 3)) msg += ", did you mean '" + best->key + "'?";
      throw ConfigError(at_line(line, msg), line);
    }
    if (it->section != section)
      throw ConfigError(at_line(line, "key '" + key + "' belongs in section [" + it->section + "], not [" +
                                          section + "]"),
                        line);
    if (const auto prev = seen.find(key); prev != seen.end())
      throw ConfigError(at_line(line, "duplicate key '" + key + "' (first set on line " +
                                          std::to_string(prev->second) + ")"),
                        line);
    seen[key] = line;
    try {
      it->set(cfg, value, line);
    } catch (const ConfigError& e) {
      // setters report a generic name; put the real key in
      std::string msg = e.what();
      const std::string generic = "key 'value'";
      if (const auto p = msg.find(generic); p != std::string::npos) msg.replace(p, generic.size(), "key '" + key + "'");
      throw ConfigError(msg, line);
    }
  }
  for (const char* req : kRequired)
    if (!seen.count(req)) {
      const auto& table = key_table();
      const auto it = std::find_if(table.begin(), table.end(), [&](const KeySpec& k) { return k.key == req; });
      throw ConfigError(at_line(line, std::string("missing required key '") + req + "' in section [" +
                                          it->section + "] (end of document)"),
                        line);
    }
  try {
    validate(cfg);
  } catch (const std::invalid_argument& e) {
    // validate() messages start with the key they concern
    const std::string msg = e.what();
    const std::string first = msg.substr(0, msg.find(' '));
    const auto k = seen.find(first);
    const int l = k != seen.end() ? k->second : line;
    throw ConfigError(at_line(l, msg), l);
  }
  return cfg;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open config file '" + path.string() + "'", 0);
  std::stringstream ss;
  ss << f.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what(), e.line());
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_config(const SimConfig& c) {
  std::ostringstream o;
  auto kv = [&](const char* k, const std::string& v) { o << k << " = " << v << '\n'; };
  auto d = [](double v) { return format_double(v); };
  o << "[grid]\n";
  kv("nx", std::to_string(c.grid.nx));
  kv("ny", std::to_string(c.grid.ny));
  kv("nz", std::to_string(c.grid.nz));
  kv("lx", d(c.grid.lx));
  kv("ly", d(c.grid.ly));
  kv("lz", d(c.grid.lz));
  o << "[physics]\n";
  kv("eps", d(c.eps));
  kv("b11", d(c.slip.b11));
  kv("b12", d(c.slip.b12));
  kv("b22", d(c.slip.b22));
  kv("mms_forcing", c.mms_forcing ? "1" : "0");
  o << "[time]\n";
  kv("dt", d(c.dt));
  kv("t_final", d(c.t_final));
  kv("cfl_safety", d(c.cfl_safety));
  kv("energy_tol", d(c.energy_tol));
  kv("solver_tol", d(c.solver_tol));
  kv("poisson", c.poisson == PoissonMethod::Spectral ? "spectral" : "cg");
  kv("max_iterations", std::to_string(c.max_iterations));
  o << "[ic]\n";
  kv("name", c.ic.name);
  kv("a", d(c.ic.a));
  kv("b", d(c.ic.b));
  kv("seed", std::to_string(c.ic.seed));
  kv("kmax", std::to_string(c.ic.kmax));
  o << "[diag]\n";
  kv("diag_every", std::to_string(c.diag_every));
  kv("diag_m", std::to_string(c.diag_m));
  kv("time_derivs", c.time_derivs ? "1" : "0");
  kv("div_tol", d(c.div_tol));
  kv("unit_tol", d(c.unit_tol));
  o << "[sweep]\n";
  std::string ladder;
  for (std::size_t n = 0; n < c.sweep.ladder.size(); ++n) ladder += (n ? ", " : "") + d(c.sweep.ladder[n]);
  kv("ladder", ladder);
  kv("force", c.sweep.force ? "1" : "0");
  kv("jobs", std::to_string(c.sweep.jobs));
  return o.str();
}

std::uint64_t config_hash(const SimConfig& cfg) {
  // jobs and force do not change results
  SimConfig c = cfg;
  c.sweep.jobs = 1;
  c.sweep.force = false;
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : format_config(c)) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

// --- CSV ----------------------------------------------------------------------

namespace {

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  std::ofstream f(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return f;
}

void finish(std::ofstream& f, const std::filesystem::path& path) {
  f.flush();
  if (!f) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::vector<std::vector<double>> read_csv(const std::filesystem::path& path, const char* header) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(f, line) || trim(line) != header)
    throw std::invalid_argument(path.string() + ": line 1: header must be '" + std::string(header) + "'");
  const std::size_t ncol = static_cast<std::size_t>(std::count(header, header + std::strlen(header), ',')) + 1;
  std::vector<std::vector<double>> rows;
  int n = 1;
  while (std::getline(f, line)) {
    ++n;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      double v;
      if (!parse_double(trim(cell), v))
        throw std::invalid_argument(path.string() + ": line " + std::to_string(n) + ": bad number '" + cell + "'");
      row.push_back(v);
    }
    if (row.size() != ncol)
      throw std::invalid_argument(path.string() + ": line " + std::to_string(n) + ": expected " +
                                  std::to_string(ncol) + " columns");
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

void write_diag_csv(const std::vector<DiagnosticsRecord>& records, const std::filesystem::path& path) {
  if (records.empty()) throw std::invalid_argument("nothing to write");
  auto f = open_out(path);
  f << kDiagHeader << '\n';
  for (const DiagnosticsRecord& r : records) {
    const double v[] = {r.t,        r.kinetic,         r.elastic,  r.visc_diss, r.dir_diss,
                        r.quartic,  r.boundary_work,   r.energy_residual, r.unit_dev, r.div_res,
                        r.nm_value, r.eta_trace,       r.linf_grad_u, r.p1_norm, r.p2_norm};
    for (std::size_t n = 0; n < std::size(v); ++n) f << (n ? "," : "") << format_double(v[n]);
    f << '\n';
  }
  finish(f, path);
}

std::vector<DiagnosticsRecord> read_diag_csv(const std::filesystem::path& path) {
  std::vector<DiagnosticsRecord> out;
  for (const auto& v : read_csv(path, kDiagHeader)) {
    DiagnosticsRecord r;
    double* dst[] = {&r.t,        &r.kinetic,       &r.elastic,         &r.visc_diss, &r.dir_diss,
                     &r.quartic,  &r.boundary_work, &r.energy_residual, &r.unit_dev,  &r.div_res,
                     &r.nm_value, &r.eta_trace,     &r.linf_grad_u,     &r.p1_norm,   &r.p2_norm};
    for (std::size_t n = 0; n < std::size(dst); ++n) *dst[n] = v[n];
    out.push_back(r);
  }
  return out;
}

void write_sweep_csv(const SweepResult& result, const std::filesystem::path& path) {
  if (result.members.empty()) throw std::invalid_argument("nothing to write");
  auto f = open_out(path);
  f << kSweepHeader << '\n';
  for (const MemberResult& m : result.members) {
    f << format_double(m.eps) << ',' << format_double(m.final.u_l2sq) << ',' << format_double(m.final.d_h1sq) << ','
      << format_double(m.final.u_linf) << ',' << format_double(m.final.d_w1inf) << ','
      << format_double(m.wall_time_s) << '\n';
  }
  finish(f, path);
}

std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path) {
  std::vector<SweepRow> out;
  for (const auto& v : read_csv(path, kSweepHeader)) out.push_back({v[0], {v[1], v[2], v[3], v[4]}, v[5]});
  return out;
}

SweepResult result_from_rows(const std::vector<SweepRow>& rows) {
  SweepResult r;
  for (const SweepRow& row : rows) {
    r.eps_ladder.push_back(row.eps);
    MemberResult m;
    m.eps = row.eps;
    m.final = row.err;
    m.sup = row.err;
    m.times = {0.0};
    m.errors = {row.err};
    m.wall_time_s = row.wall_time_s;
    r.members.push_back(std::move(m));
  }
  analyse(r);
  return r;
}

std::string sweep_report(const SweepResult& r) {
  std::ostringstream o;
  char buf[256];
  o << "vanishing-viscosity sweep\n";
  std::snprintf(buf, sizeof buf, "config hash        %016llx\n", static_cast<unsigned long long>(r.config_hash));
  o << buf;
  std::snprintf(buf, sizeof buf, "reference wall time %.3f s\n", r.reference_wall_time_s);
  o << buf;
  if (r.partial) o << "PARTIAL RESULT: at least one member failed\n";
  o << "\nerrors at t_final\n";
  std::snprintf(buf, sizeof buf, "%-14s %-14s %-14s %-14s %-14s %-10s\n", "eps", "u_l2sq", "d_h1sq", "u_linf",
                "d_w1inf", "wall_s");
  o << buf;
  for (const MemberResult& m : r.members) {
    std::snprintf(buf, sizeof buf, "%-14.6e %-14.6e %-14.6e %-14.6e %-14.6e %-10.3f\n", m.eps, m.final.u_l2sq,
                  m.final.d_h1sq, m.final.u_linf, m.final.d_w1inf, m.wall_time_s);
    o << buf;
  }
  o << "\nsup over recorded times\n";
  std::snprintf(buf, sizeof buf, "%-14s %-14s %-14s %-14s %-14s %-14s %-14s\n", "eps", "u_l2sq", "d_h1sq", "u_linf",
                "d_w1inf", "nm_max", "grad_u_max");
  o << buf;
  for (const MemberResult& m : r.members) {
    std::snprintf(buf, sizeof buf, "%-14.6e %-14.6e %-14.6e %-14.6e %-14.6e %-14.6e %-14.6e\n", m.eps, m.sup.u_l2sq,
                  m.sup.d_h1sq, m.sup.u_linf, m.sup.d_w1inf, m.nm_max, m.linf_grad_u_max);
    o << buf;
  }
  o << "\nrate fits (log err vs log eps)\n";
  std::snprintf(buf, sizeof buf, "fitted_slope_l2    %.6f  r^2 %.6f  [%s]  (bound exponent 1.5)\n", r.fit_l2.slope,
                r.fit_l2.r_squared, r.status_l2.c_str());
  o << buf;
  std::snprintf(buf, sizeof buf, "fitted_slope_linf  %.6f  r^2 %.6f  [%s]  (bound exponent 0.3)\n", r.fit_linf.slope,
                r.fit_linf.r_squared, r.status_linf.c_str());
  o << buf;
  o << "\nflags\n";
  if (r.flags.empty()) o << "none\n";
  for (const std::string& f : r.flags) o << "- " << f << '\n';
  return o.str();
}

void write_text(const std::string& text, const std::filesystem::path& path) {
  auto f = open_out(path);
  f << text;
  finish(f, path);
}

// --- checkpoints --------------------------------------------------------------

namespace {

template <class T>
void put(std::ostream& o, T v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  unsigned char b[8];
  for (int n = 0; n < 8; ++n) b[n] = static_cast<unsigned char>(bits >> (8 * n));
  o.write(reinterpret_cast<const char*>(b), 8);
}

template <class T>
T get(std::istream& in, const std::string& where) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw std::invalid_argument(where + ": truncated checkpoint");
  std::uint64_t bits = 0;
  for (int n = 0; n < 8; ++n) bits |= static_cast<std::uint64_t>(b[n]) << (8 * n);
  return std::bit_cast<T>(bits);
}

void put_block(std::ostream& o, const Array3& a) {
  for (int k = 0; k < a.nz(); ++k)
    for (int j = 0; j < a.ny(); ++j)
      for (int i = 0; i < a.nx(); ++i) put(o, a(i, j, k));
}

void get_block(std::istream& in, Array3& a, const std::string& where) {
  for (int k = 0; k < a.nz(); ++k)
    for (int j = 0; j < a.ny(); ++j)
      for (int i = 0; i < a.nx(); ++i) a(i, j, k) = get<double>(in, where);
}

}  // namespace

void write_checkpoint(const State& s, std::uint64_t hash, const ChannelGrid& g, const std::filesystem::path& path) {
  auto f = open_out(path, true);
  f.write(kCheckpointMagic, sizeof kCheckpointMagic);
  put(f, hash);
  put(f, static_cast<std::uint64_t>(g.nx));
  put(f, static_cast<std::uint64_t>(g.ny));
  put(f, static_cast<std::uint64_t>(g.nz));
  put(f, s.t);
  put(f, s.step);
  for (int c = 0; c < 3; ++c) put_block(f, s.u[c]);
  put_block(f, s.p);
  for (int c = 0; c < 3; ++c) put_block(f, s.d[c]);
  finish(f, path);
}

Checkpoint read_checkpoint(const std::filesystem::path& path, const ChannelGrid& g) {
  const std::string where = path.string();
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open checkpoint '" + where + "'");
  char magic[8];
  if (!f.read(magic, 8) || std::memcmp(magic, kCheckpointMagic, 8) != 0)
    throw std::invalid_argument(where + ": not an LCFLOW1 checkpoint");
  Checkpoint cp;
  cp.config_hash = get<std::uint64_t>(f, where);
  const auto nx = get<std::uint64_t>(f, where), ny = get<std::uint64_t>(f, where), nz = get<std::uint64_t>(f, where);
  if (nx != static_cast<std::uint64_t>(g.nx) || ny != static_cast<std::uint64_t>(g.ny) ||
      nz != static_cast<std::uint64_t>(g.nz)) {
    std::ostringstream msg;
    msg << where << ": checkpoint grid " << nx << "x" << ny << "x" << nz << " does not match " << g.nx << "x" << g.ny
        << "x" << g.nz;
    throw std::invalid_argument(msg.str());
  }
  State& s = cp.state;
  s.t = get<double>(f, where);
  s.step = get<std::int64_t>(f, where);
  s.u = make_faces(g);
  s.p = make_scalar(g);
  s.d = make_vector(g);
  for (int c = 0; c < 3; ++c) get_block(f, s.u[c], where);
  get_block(f, s.p, where);
  for (int c = 0; c < 3; ++c) get_block(f, s.d[c], where);
  if (f.peek() != std::char_traits<char>::eof()) throw std::invalid_argument(where + ": trailing bytes in checkpoint");
  return cp;
}

}  // namespace lcflow
