// Command-line front end. Talks to the library through the C API only.
#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nlslab/nlslab.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kConfigError = 2 };

struct CliError {
  int exit_code;
  std::string kind;
  std::string message;
};

[[noreturn]] void config_error(const std::string& msg) { throw CliError{kConfigError, "ConfigError", msg}; }

int exit_for(nls_status s) {
  switch (s) {
    case NLS_INVALID_ARGUMENT:
    case NLS_INVALID_OVERRIDE:
    case NLS_INVALID_GRID:
    case NLS_INVALID_SPEC:
    case NLS_EMPTY_REGION:
    case NLS_IO:
      return kConfigError;
    default:
      return kCheckFailed;
  }
}

void check(nls_status s, const std::string& where) {
  if (s == NLS_OK) return;
  throw CliError{exit_for(s), nls_status_name(s), where + ": " + nls_last_error()};
}

template <class T, void (*D)(T*)>
struct Deleter {
  void operator()(T* p) const { D(p); }
};
using Grid = std::unique_ptr<nls_grid, Deleter<nls_grid, nls_grid_destroy>>;
using Aset = std::unique_ptr<nls_aset, Deleter<nls_aset, nls_aset_destroy>>;
using Afield = std::unique_ptr<nls_afield, Deleter<nls_afield, nls_afield_destroy>>;
using Bundle = std::unique_ptr<nls_bundle, Deleter<nls_bundle, nls_bundle_destroy>>;
using Trajectory = std::unique_ptr<nls_trajectory, Deleter<nls_trajectory, nls_trajectory_destroy>>;
using Report = std::unique_ptr<nls_report, Deleter<nls_report, nls_report_destroy>>;

// ---------------------------------------------------------------------------
// RunConfig

struct KSpec {
  std::string type = "points";  // points | sphere | csv
  std::vector<std::vector<double>> points = {{0.0}};
  std::vector<double> center;
  double radius = 0.0;
  std::string path;
  std::string z_form = "distance";  // distance | squared

  json to_json() const {
    json j{{"type", type}, {"z_form", z_form}};
    if (type == "points") j["points"] = points;
    if (type == "sphere") j["center"] = center, j["radius"] = radius;
    if (type == "csv") j["path"] = path;
    return j;
  }
};

struct RunConfig {
  double alpha = 2.0, lambda2 = 0.0;
  int dim = 1;
  std::string mode = "experiment";
  std::int64_t big_j = 2, k = 8;
  std::optional<double> csu;
  std::int64_t csu_samples = 20000;
  std::uint64_t seed = 1;
  KSpec kset;
  double half_width = 8.0;
  int m = 512;
  double t_start = -1.0, t_end = -1e-4;
  std::size_t nodes = 256;
  double t0 = -0.5, t_stop = -0.02;
  double dt_max = 1e-3, shrink = 0.05, safety = 0.2;
  bool dealias = false;
  std::vector<double> snapshot_times;
  int snapshot_count = 64;
  double analysis_radius = 0.0;
  double fit_lo = -0.5, fit_hi = -0.05;
  nls_check_config checks{};
  std::string out_dir = "nlslab_out";

  RunConfig() { nls_check_config_default(&checks); }

  // Geometric snapshot times on (t0, t_stop] unless listed explicitly.
  std::vector<double> snapshots() const {
    if (!snapshot_times.empty()) return snapshot_times;
    std::vector<double> t;
    for (int i = 1; i <= snapshot_count; ++i)
      t.push_back(-std::exp(std::log(-t0) + (std::log(-t_stop) - std::log(-t0)) * i / snapshot_count));
    if (!t.empty()) t.back() = t_stop;
    return t;
  }

  json to_json() const {
    json j;
    j["model"] = {{"alpha", alpha}, {"lambda2", lambda2}, {"dim", dim}};
    j["scheme"] = {{"mode", mode}, {"J", big_j}, {"k", k}, {"csu_samples", csu_samples}, {"seed", seed}};
    j["scheme"]["csu_override"] = csu ? json(*csu) : json(nullptr);
    j["geometry"] = {{"K", kset.to_json()}, {"L", half_width}, {"M", m}, {"analysis_radius", analysis_radius}};
    j["time"] = {{"t_start", t_start}, {"t_end", t_end}, {"nodes", nodes}, {"t0", t0}, {"t_stop", t_stop}};
    j["solver"] = {{"dt_max", dt_max}, {"c", shrink}, {"safety", safety}, {"dealias", dealias}};
    if (snapshot_times.empty())
      j["solver"]["snapshots"] = snapshot_count;
    else
      j["solver"]["snapshots"] = snapshot_times;
    j["fit"] = {{"t_lo", fit_lo}, {"t_hi", fit_hi}};
    j["checks"] = {{"slope_tol", checks.slope_tol},           {"local_radius", checks.local_radius},
                   {"exterior_radius", checks.exterior_radius}, {"exterior_core", checks.exterior_core},
                   {"bounded_ratio", checks.bounded_ratio},   {"gradient_radius", checks.gradient_radius},
                   {"growth_ratio", checks.growth_ratio},     {"exclude_fraction", checks.exclude_fraction},
                   {"epsilon_threshold", checks.epsilon_threshold}};
    j["output"] = {{"directory", out_dir}};
    return j;
  }
};

template <class T>
void take(const json& j, const char* key, T& dst) {
  if (j.contains(key) && !j[key].is_null()) dst = j[key].get<T>();
}

void load_config(const std::string& path, RunConfig& c) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
    if (j.contains("model")) {
      const auto& m = j["model"];
      take(m, "alpha", c.alpha);
      take(m, "lambda2", c.lambda2);
      take(m, "dim", c.dim);
    }
    if (j.contains("scheme")) {
      const auto& s = j["scheme"];
      take(s, "mode", c.mode);
      take(s, "J", c.big_j);
      take(s, "k", c.k);
      if (s.contains("csu_override") && !s["csu_override"].is_null()) c.csu = s["csu_override"].get<double>();
      take(s, "csu_samples", c.csu_samples);
      take(s, "seed", c.seed);
    }
    if (j.contains("geometry")) {
      const auto& g = j["geometry"];
      take(g, "L", c.half_width);
      take(g, "M", c.m);
      take(g, "analysis_radius", c.analysis_radius);
      if (g.contains("K")) {
        const auto& k = g["K"];
        take(k, "type", c.kset.type);
        take(k, "points", c.kset.points);
        take(k, "center", c.kset.center);
        take(k, "radius", c.kset.radius);
        take(k, "path", c.kset.path);
        take(k, "z_form", c.kset.z_form);
        if (!c.kset.path.empty() && fs::path(c.kset.path).is_relative())
          c.kset.path = (fs::path(path).parent_path() / c.kset.path).string();
      }
    }
    if (j.contains("time")) {
      const auto& t = j["time"];
      take(t, "t_start", c.t_start);
      take(t, "t_end", c.t_end);
      take(t, "nodes", c.nodes);
      // ratio |t_{i+1}|/|t_i| in place of t_end
      if (t.contains("ratio") && !t.contains("t_end"))
        c.t_end = c.t_start * std::pow(t["ratio"].get<double>(), static_cast<double>(c.nodes) - 1.0);
      take(t, "t0", c.t0);
      take(t, "t_stop", c.t_stop);
    }
    if (j.contains("solver")) {
      const auto& s = j["solver"];
      take(s, "dt_max", c.dt_max);
      take(s, "c", c.shrink);
      take(s, "safety", c.safety);
      take(s, "dealias", c.dealias);
      if (s.contains("snapshots")) {
        if (s["snapshots"].is_array())
          c.snapshot_times = s["snapshots"].get<std::vector<double>>();
        else
          c.snapshot_count = s["snapshots"].get<int>();
      }
    }
    if (j.contains("fit")) {
      take(j["fit"], "t_lo", c.fit_lo);
      take(j["fit"], "t_hi", c.fit_hi);
    }
    if (j.contains("checks")) {
      const auto& k = j["checks"];
      take(k, "slope_tol", c.checks.slope_tol);
      take(k, "local_radius", c.checks.local_radius);
      take(k, "exterior_radius", c.checks.exterior_radius);
      take(k, "exterior_core", c.checks.exterior_core);
      take(k, "bounded_ratio", c.checks.bounded_ratio);
      take(k, "gradient_radius", c.checks.gradient_radius);
      take(k, "growth_ratio", c.checks.growth_ratio);
      take(k, "exclude_fraction", c.checks.exclude_fraction);
      take(k, "epsilon_threshold", c.checks.epsilon_threshold);
    }
    if (j.contains("output")) take(j["output"], "directory", c.out_dir);
  } catch (const json::exception& e) {
    config_error(path + ": " + e.what());
  }
}

// Everything that can be checked without building anything.
void validate(const RunConfig& c, bool needs_run) {
  const nls_model m{c.alpha, c.lambda2, c.dim};
  check(nls_model_check(&m, nullptr), "model");
  if (c.mode != "paper" && c.mode != "experiment") config_error("scheme.mode must be paper or experiment");
  if (c.kset.type != "points" && c.kset.type != "sphere" && c.kset.type != "csv")
    config_error("geometry.K.type must be points, sphere or csv");
  if (c.kset.z_form != "distance" && c.kset.z_form != "squared")
    config_error("geometry.K.z_form must be distance or squared");
  if (!(c.t_start < c.t_end && c.t_end < 0.0)) config_error("time: need t_start < t_end < 0");
  if (!needs_run) return;
  if (!(c.t_stop > c.t0)) config_error("time: t_stop must be later than t0");
  if (!(c.t_stop < 0.0)) config_error("time: t_stop must be negative");
  if (c.t0 < c.t_start || c.t_stop > c.t_end) config_error("time: [t0, t_stop] must lie inside [t_start, t_end]");
  if (c.snapshot_times.empty() && c.snapshot_count < 1) config_error("solver.snapshots must be >= 1");
}

// ---------------------------------------------------------------------------
// Pipeline pieces

nls_model model_of(const RunConfig& c) { return {c.alpha, c.lambda2, c.dim}; }

double resolve_csu(const RunConfig& c) {
  if (c.csu) return *c.csu;
  const nls_model m = model_of(c);
  double v = 0;
  check(nls_estimate_csu(&m, c.csu_samples, c.seed, &v), "estimate_csu");
  return v;
}

nls_scheme scheme_of(const RunConfig& c) {
  const nls_model m = model_of(c);
  nls_scheme s{};
  if (c.mode == "paper")
    check(nls_scheme_params(&m, resolve_csu(c), NLS_MODE_PAPER, nullptr, nullptr, &s), "scheme");
  else
    check(nls_scheme_params(&m, resolve_csu(c), NLS_MODE_EXPERIMENT, &c.big_j, &c.k, &s), "scheme");
  return s;
}

json scheme_json(const nls_scheme& s) {
  return {{"mode", s.mode == NLS_MODE_PAPER ? "paper" : "experiment"},
          {"csu", s.csu},
          {"sigma", s.sigma},
          {"theta", s.theta},
          {"J", s.big_j},
          {"k", s.k}};
}

struct Built {
  Grid grid;
  Aset aset;
  Afield afield;
  Bundle bundle;
  nls_scheme scheme{};
};

Built build(const RunConfig& c) {
  Built b;
  b.scheme = scheme_of(c);
  nls_grid* g = nullptr;
  check(nls_grid_create(c.dim, c.half_width, c.m, &g), "grid");
  b.grid.reset(g);
  nls_aset* s = nullptr;
  const int sq = c.kset.z_form == "squared";
  if (c.kset.type == "points") {
    std::vector<double> flat;
    for (const auto& p : c.kset.points) {
      if (static_cast<int>(p.size()) != c.dim) config_error("geometry.K.points: coordinate count differs from dim");
      flat.insert(flat.end(), p.begin(), p.end());
    }
    check(nls_aset_points(c.dim, c.kset.points.size(), flat.data(), sq, &s), "K");
  } else if (c.kset.type == "sphere") {
    if (static_cast<int>(c.kset.center.size()) != c.dim) config_error("geometry.K.center: wrong dimension");
    check(nls_aset_sphere(c.dim, c.kset.center.data(), c.kset.radius, sq, &s), "K");
  } else {
    check(nls_aset_from_csv(c.kset.path.c_str(), &s), "K");
  }
  b.aset.reset(s);
  nls_afield* a = nullptr;
  check(nls_afield_build(s, b.scheme.k, g, &a), "A");
  b.afield.reset(a);
  const nls_model m = model_of(c);
  const nls_time_grid tg{c.t_start, c.t_end, c.nodes};
  nls_bundle* bu = nullptr;
  check(nls_bundle_build(a, &m, &b.scheme, &tg, c.analysis_radius, &bu), "bundle");
  b.bundle.reset(bu);
  return b;
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream out(p);
  if (!out) throw CliError{kConfigError, "Io", "cannot write " + p.string()};
  out << j.dump(2) << "\n";
}

fs::path prepare_dir(const fs::path& d) {
  std::error_code ec;
  fs::create_directories(d, ec);
  if (ec) throw CliError{kConfigError, "Io", "cannot create " + d.string() + ": " + ec.message()};
  return d;
}

// Returns false when the run diverged (partial record still written).
bool run_simulation(const RunConfig& c, const Built& b, const fs::path& dir, json& summary) {
  const auto snaps = c.snapshots();
  const nls_solver_config cfg{c.dt_max, c.shrink, c.safety, c.t_stop, snaps.data(), snaps.size(), c.dealias ? 1 : 0};
  nls_trajectory* tr = nullptr;
  const nls_status st = nls_simulate(b.bundle.get(), c.t0, &cfg, &tr);
  const std::string msg = st == NLS_OK ? "" : nls_last_error();
  Trajectory owned(tr);
  if (st != NLS_OK && st != NLS_DIVERGED) throw CliError{exit_for(st), nls_status_name(st), "simulate: " + msg};
  check(nls_trajectory_write_csv(tr, (dir / "trajectory.csv").string().c_str()), "write trajectory");
  check(nls_trajectory_write_steps_csv(tr, (dir / "steps.csv").string().c_str()), "write steps");
  nls_trajectory_info ti{};
  check(nls_trajectory_info_get(tr, &ti), "trajectory info");
  summary = {{"t0", ti.t0},
             {"t_last", ti.t_last},
             {"snapshots", ti.snapshots},
             {"steps", ti.steps},
             {"diverged", ti.diverged != 0}};
  if (ti.diverged) summary["last_good_t"] = ti.last_good_t, summary["message"] = msg;
  return st == NLS_OK;
}

// Returns all_pass; writes report.json and norms.csv.
bool run_verify(const RunConfig& c, const Built& b, const fs::path& traj_csv, const fs::path& dir, json& summary) {
  nls_trajectory* tr = nullptr;
  check(nls_trajectory_read_csv(traj_csv.string().c_str(), b.grid.get(), &tr), "read trajectory");
  Trajectory owned(tr);
  nls_report* r = nullptr;
  check(nls_verify(tr, b.bundle.get(), &c.checks, &r), "verify");
  Report rep(r);
  check(nls_report_write(r, dir.string().c_str()), "write report");
  std::size_t n = 0;
  int all = 0;
  check(nls_report_summary(r, &n, &all), "report");
  summary = {{"all_pass", all != 0}, {"checks", json::array()}};
  for (std::size_t i = 0; i < n; ++i) {
    nls_check ck{};
    check(nls_report_check(r, i, &ck), "report");
    summary["checks"].push_back({{"name", ck.name}, {"fitted", ck.fitted}, {"pass", ck.pass != 0}});
  }
  return all != 0;
}

std::string output_dir(const RunConfig& c) {
  if (const char* env = std::getenv("NLSLAB_OUT"); env && *env) return env;
  return c.out_dir;
}

// ---------------------------------------------------------------------------
// Verbs

int cmd_params(const RunConfig& c) {
  validate(c, false);
  const nls_model m = model_of(c);
  int sub = 0;
  check(nls_model_check(&m, &sub), "model");
  json out;
  out["model"] = {{"alpha", c.alpha}, {"lambda2", c.lambda2}, {"dim", c.dim}, {"h1_subcritical", sub != 0}};
  out["scheme"] = scheme_json(scheme_of(c));
  if (c.mode == "experiment") {
    nls_scheme p{};
    const nls_status st = nls_scheme_params(&m, resolve_csu(c), NLS_MODE_PAPER, nullptr, nullptr, &p);
    out["paper"] = st == NLS_OK ? scheme_json(p) : json{{"error", nls_status_name(st)}, {"message", nls_last_error()}};
  }
  std::cout << out.dump(2) << "\n";
  return kOk;
}

int cmd_build(const RunConfig& c) {
  validate(c, false);
  const Built b = build(c);
  const auto dir = prepare_dir(fs::path(output_dir(c)) / "bundle");
  check(nls_bundle_export(b.bundle.get(), dir.string().c_str(), c.fit_lo, c.fit_hi), "export bundle");
  check(nls_afield_export_csv(b.afield.get(), (dir / "A.csv").string().c_str()), "export A");
  write_json(dir / "config.json", c.to_json());
  nls_bundle_info bi{};
  check(nls_bundle_info_get(b.bundle.get(), &bi), "bundle info");
  json out{{"bundle", dir.string()}, {"J", bi.big_j}, {"time_nodes", bi.time_nodes}};
  out["trusted_from"] = bi.has_trusted_window ? json(bi.trusted_from) : json(nullptr);
  std::cout << out.dump(2) << "\n";
  return kOk;
}

int cmd_simulate(const RunConfig& c) {
  validate(c, true);
  const Built b = build(c);
  const auto dir = prepare_dir(output_dir(c));
  json s;
  const bool ok = run_simulation(c, b, dir, s);
  json manifest{{"config", c.to_json()}, {"scheme", scheme_json(b.scheme)}, {"run", s}};
  write_json(dir / "simulate.json", manifest);
  std::cout << s.dump(2) << "\n";
  if (!ok) throw CliError{kCheckFailed, "Diverged", s.value("message", std::string("diverged"))};
  return kOk;
}

int cmd_verify(const RunConfig& c, const std::string& traj) {
  validate(c, true);
  const Built b = build(c);  // verify rebuilds the bundle from the same config
  const auto dir = prepare_dir(output_dir(c));
  const fs::path tpath = traj.empty() ? dir / "trajectory.csv" : fs::path(traj);
  json s;
  const bool pass = run_verify(c, b, tpath, dir, s);
  std::cout << s.dump(2) << "\n";
  return pass ? kOk : kCheckFailed;
}

std::vector<std::vector<std::vector<double>>> parse_k_list(const std::vector<std::string>& specs) {
  // Each entry is a ';'-separated list of points, coordinates separated by ':'.
  std::vector<std::vector<std::vector<double>>> out;
  for (const auto& s : specs) {
    std::vector<std::vector<double>> pts;
    std::stringstream ss(s);
    std::string pt;
    while (std::getline(ss, pt, ';')) {
      std::vector<double> x;
      std::stringstream ps(pt);
      std::string v;
      while (std::getline(ps, v, ':')) {
        try {
          x.push_back(std::stod(v));
        } catch (const std::exception&) {
          config_error("bad K entry '" + s + "'");
        }
      }
      pts.push_back(x);
    }
    out.push_back(pts);
  }
  return out;
}

int cmd_sweep(RunConfig c, std::vector<double> alphas, std::vector<std::int64_t> js,
              const std::vector<std::string>& ks) {
  if (alphas.empty()) alphas = {c.alpha};
  if (js.empty()) js = {c.big_j};
  auto kl = parse_k_list(ks);
  if (kl.empty()) kl = {c.kset.points};
  const fs::path root = prepare_dir(output_dir(c));
  // Validate every cell before running any.
  std::vector<RunConfig> cells;
  std::vector<std::string> names;
  for (double a : alphas)
    for (const auto& k : kl)
      for (auto j : js) {
        RunConfig cell = c;
        cell.alpha = a;
        cell.big_j = j;
        cell.kset.type = "points";
        cell.kset.points = k;
        validate(cell, true);
        const nls_model m = model_of(cell);
        nls_scheme tmp{};
        if (cell.mode == "experiment")
          check(nls_scheme_params(&m, 1.0, NLS_MODE_EXPERIMENT, &cell.big_j, &cell.k, &tmp), "sweep cell");
        std::string kname;
        for (const auto& p : k) {
          if (!kname.empty()) kname += "_";
          for (std::size_t i = 0; i < p.size(); ++i) kname += (i ? "x" : "") + CLI::detail::to_string(p[i]);
        }
        cells.push_back(cell);
        names.push_back("alpha" + CLI::detail::to_string(a) + "_K" + kname + "_J" + std::to_string(j));
      }
  json summary = json::array();
  bool all = true;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto dir = prepare_dir(root / names[i]);
    json cell{{"cell", names[i]}};
    try {
      const Built b = build(cells[i]);
      write_json(dir / "config.json", cells[i].to_json());
      json sim;
      const bool ok = run_simulation(cells[i], b, dir, sim);
      cell["simulate"] = sim;
      if (ok) {
        json ver;
        const bool pass = run_verify(cells[i], b, dir / "trajectory.csv", dir, ver);
        cell["all_pass"] = pass;
        all = all && pass;
      } else {
        cell["all_pass"] = false;
        all = false;
      }
    } catch (const CliError& e) {
      if (e.exit_code == kConfigError) throw;
      cell["error"] = {{"kind", e.kind}, {"message", e.message}};
      cell["all_pass"] = false;
      all = false;
    }
    summary.push_back(cell);
  }
  write_json(root / "sweep.json", summary);
  std::cout << summary.dump(2) << "\n";
  return all ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nlslab: blow-up ansatz, split-step solver and rate checks"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string config_path;

  // Flags shared by every verb; they override the config file.
  struct Overrides {
    std::optional<double> alpha, lambda2, csu, t0, t_stop, dt_max;
    std::optional<int> dim, m;
    std::optional<std::int64_t> big_j, k;
    std::optional<std::string> mode, out;
  } ov;
  auto add_common = [&](CLI::App* sc) {
    sc->add_option("--config", config_path, "RunConfig JSON file");
    sc->add_option("--alpha", ov.alpha);
    sc->add_option("--lambda2", ov.lambda2);
    sc->add_option("--dim", ov.dim);
    sc->add_option("--csu", ov.csu, "use this Csu instead of estimating it");
    sc->add_option("--mode", ov.mode)->check(CLI::IsMember({"paper", "experiment"}));
    sc->add_option("--J", ov.big_j);
    sc->add_option("--k", ov.k);
    sc->add_option("--M", ov.m);
    sc->add_option("--t0", ov.t0);
    sc->add_option("--t-stop", ov.t_stop);
    sc->add_option("--dt-max", ov.dt_max);
    sc->add_option("--out", ov.out, "output directory (NLSLAB_OUT takes precedence)");
  };
  auto* params = app.add_subcommand("params", "print scheme parameters as JSON");
  auto* build_cmd = app.add_subcommand("build-ansatz", "build U_0..U_J and export the bundle");
  auto* sim = app.add_subcommand("simulate", "integrate from U_J(t0) and write the trajectory");
  auto* ver = app.add_subcommand("verify", "rate and epsilon checks; exit 0 iff all pass");
  auto* sweep = app.add_subcommand("sweep", "simulate and verify over a grid of alpha / K / J");
  for (auto* sc : {params, build_cmd, sim, ver, sweep}) add_common(sc);
  std::string traj;
  ver->add_option("--trajectory", traj, "trajectory CSV (default <out>/trajectory.csv)");
  std::vector<double> sweep_alpha;
  std::vector<std::int64_t> sweep_j;
  std::vector<std::string> sweep_k;
  sweep->add_option("--alphas", sweep_alpha)->delimiter(',');
  sweep->add_option("--Js", sweep_j)->delimiter(',');
  sweep->add_option("--Ks", sweep_k, "point sets, e.g. \"0\" \"-0.5;0.5\"");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << json{{"error", "ConfigError"}, {"message", e.what()}}.dump() << "\n";
    return kConfigError;
  }

  try {
    if (!config_path.empty()) load_config(config_path, cfg);
    if (ov.alpha) cfg.alpha = *ov.alpha;
    if (ov.lambda2) cfg.lambda2 = *ov.lambda2;
    if (ov.dim) cfg.dim = *ov.dim;
    if (ov.csu) cfg.csu = *ov.csu;
    if (ov.mode) cfg.mode = *ov.mode;
    if (ov.big_j) cfg.big_j = *ov.big_j;
    if (ov.k) cfg.k = *ov.k;
    if (ov.m) cfg.m = *ov.m;
    if (ov.t0) cfg.t0 = *ov.t0;
    if (ov.t_stop) cfg.t_stop = *ov.t_stop;
    if (ov.dt_max) cfg.dt_max = *ov.dt_max;
    if (ov.out) cfg.out_dir = *ov.out;

    if (*params) return cmd_params(cfg);
    if (*build_cmd) return cmd_build(cfg);
    if (*sim) return cmd_simulate(cfg);
    if (*ver) return cmd_verify(cfg, traj);
    if (*sweep) return cmd_sweep(cfg, sweep_alpha, sweep_j, sweep_k);
  } catch (const CliError& e) {
    std::cerr << json{{"error", e.kind}, {"message", e.message}, {"exit_code", e.exit_code}}.dump() << "\n";
    return e.exit_code;
  }
  return kConfigError;
}
