#include "io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "error.hpp"

namespace nlslab::io {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ofstream open_out(const std::string& path) {
  const fs::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCode::Io, "cannot open " + path + " for writing");
  return os;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, ',')) out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  while (end && (*end == ' ' || *end == '\r')) ++end;
  if (end == s.c_str() || (end && *end != '\0')) fail(ErrorCode::Io, "bad number '" + s + "' in " + where);
  return v;
}

// JSON has no infinities; open-ended targets become null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_row_coords(std::string& line, const geometry::Grid& grid, std::size_t ix) {
  double x[8];
  grid.coordinates(ix, x);
  for (int d = 0; d < grid.dim(); ++d) {
    line += fmt17(x[d]);
    line += ',';
  }
}

}  // namespace

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  auto os = open_out(path);
  os << text;
  if (!os) fail(ErrorCode::Io, "write failed for " + path);
}

void write_grid_field_csv(const std::string& path, const std::string& tag, const geometry::Grid& grid,
                          std::span<const double> values) {
  if (values.size() != grid.node_count()) fail(ErrorCode::InvalidArgument, "field size does not match grid");
  auto os = open_out(path);
  const std::size_t m = static_cast<std::size_t>(grid.points_per_dim());
  os << tag << ',' << m << ',' << fmt17(grid.half_width()) << ',' << grid.dim() << '\n';
  for (std::size_t i = 0; i < values.size(); ++i) {
    os << fmt17(values[i]) << ((i + 1) % m == 0 ? '\n' : ',');
  }
  if (!os) fail(ErrorCode::Io, "write failed for " + path);
}

GridFieldCsv read_grid_field_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorCode::Io, "cannot open " + path);
  std::string line;
  if (!std::getline(is, line)) fail(ErrorCode::InvalidSpec, path + ": missing header");
  const auto head = split(line);
  if (head.size() != 4) fail(ErrorCode::InvalidSpec, path + ": header must be '<tag>,M,L,dim'");
  auto trim = [](std::string s) {
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.pop_back();
    while (!s.empty() && s.front() == ' ') s.erase(s.begin());
    return s;
  };
  const int m = static_cast<int>(parse_double(trim(head[1]), path));
  const double l = parse_double(trim(head[2]), path);
  const int dim = static_cast<int>(parse_double(trim(head[3]), path));
  geometry::Grid grid(dim, l, m);
  RealField values;
  values.reserve(grid.node_count());
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != static_cast<std::size_t>(m))
      fail(ErrorCode::InvalidSpec, path + ": row " + std::to_string(rows + 1) + " does not have M values");
    for (const auto& c : cells) values.push_back(parse_double(trim(c), path));
    ++rows;
  }
  if (values.size() != grid.node_count())
    fail(ErrorCode::InvalidSpec, path + ": expected M^(dim-1) rows");
  return {trim(head[0]), grid, std::move(values)};
}

void write_spacetime_csv(const std::string& path, const geometry::Grid& grid, std::span<const double> times,
                         const ansatz::SpaceTimeField& f) {
  auto os = open_out(path);
  os << 't';
  for (int d = 0; d < grid.dim(); ++d) os << ",x" << d;
  os << ",re,im\n";
  std::string line;
  for (std::size_t it = 0; it < f.time_count(); ++it) {
    const std::string ts = fmt17(times[it]) + ",";
    for (std::size_t ix = 0; ix < f.node_count(); ++ix) {
      line = ts;
      write_row_coords(line, grid, ix);
      const cplx v = f.at(it, ix);
      line += fmt17(v.real());
      line += ',';
      line += fmt17(v.imag());
      line += '\n';
      os << line;
    }
  }
  if (!os) fail(ErrorCode::Io, "write failed for " + path);
}

void write_trajectory_csv(const std::string& path, const geometry::Grid& grid,
                          const solver::TrajectoryRecord& traj) {
  ansatz::SpaceTimeField f(traj.snapshots.size(), grid.node_count());
  std::vector<double> times;
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    times.push_back(traj.snapshots[i].t);
    std::copy(traj.snapshots[i].u.begin(), traj.snapshots[i].u.end(), f.row(i).begin());
  }
  write_spacetime_csv(path, grid, times, f);
}

solver::TrajectoryRecord read_trajectory_csv(const std::string& path, const geometry::Grid& grid) {
  std::ifstream is(path);
  if (!is) fail(ErrorCode::Io, "cannot open " + path);
  std::string line;
  std::getline(is, line);
  const std::size_t cols = static_cast<std::size_t>(grid.dim()) + 3;
  if (split(line).size() != cols) fail(ErrorCode::Io, path + ": header does not match grid dimension");
  solver::TrajectoryRecord rec;
  const std::size_t n = grid.node_count();
  std::size_t row = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != cols) fail(ErrorCode::Io, path + ": bad row " + std::to_string(row + 2));
    const double t = parse_double(cells[0], path);
    if (row % n == 0) {
      rec.snapshots.push_back({t, ComplexField(n)});
    } else if (t != rec.snapshots.back().t) {
      fail(ErrorCode::Io, path + ": snapshot at t = " + cells[0] + " is incomplete");
    }
    rec.snapshots.back().u[row % n] = {parse_double(cells[cols - 2], path), parse_double(cells[cols - 1], path)};
    ++row;
  }
  if (row == 0 || row % n != 0) fail(ErrorCode::Io, path + ": row count is not a multiple of the node count");
  rec.t0 = rec.snapshots.front().t;
  return rec;
}

void write_steps_csv(const std::string& path, const solver::TrajectoryRecord& traj) {
  auto os = open_out(path);
  os << "t,dt,mass,max_amplitude\n";
  for (const auto& s : traj.steps)
    os << fmt17(s.t) << ',' << fmt17(s.dt) << ',' << fmt17(s.mass) << ',' << fmt17(s.max_amplitude) << '\n';
}

json to_json(const model::ModelParams& p) {
  return {{"alpha", p.alpha}, {"lambda2", p.lambda2}, {"dim", p.dim}, {"h1_subcritical", p.h1_subcritical()}};
}

json to_json(const model::SchemeParams& s) {
  return {{"mode", s.mode == model::SchemeMode::Paper ? "paper" : "experiment"},
          {"csu", s.csu},
          {"sigma", s.sigma},
          {"theta", s.theta},
          {"J", s.big_j},
          {"k", s.k}};
}

json to_json(const metrics::Check& c) {
  return {{"name", c.name},
          {"window", {num(c.window_lo), num(c.window_hi)}},
          {"target_lo", num(c.target_lo)},
          {"target_hi", num(c.target_hi)},
          {"fitted", num(c.fitted)},
          {"r2", num(c.r2)},
          {"pass", c.pass},
          {"note", c.note}};
}

json to_json(const metrics::RateFit& f) {
  return {{"slope", num(f.slope)},
          {"intercept", num(f.intercept)},
          {"r2", num(f.r_squared)},
          {"window", {num(f.t_lo), num(f.t_hi)}},
          {"samples", f.samples}};
}

void write_bundle(const std::string& dir, const ansatz::AnsatzBundle& b, double fit_lo, double fit_hi) {
  const auto& grid = b.a.grid;
  json levels = json::array();
  const auto& u0 = b.u[0];
  auto slope_of = [&](const ansatz::SpaceTimeField& f) -> json {
    const auto series = ansatz::level_ratio_series(f, u0, b.analysis_mask);
    try {
      return to_json(metrics::fit_rate(b.tg.nodes, series, fit_lo, fit_hi));
    } catch (const Error& e) {
      return {{"error", error_code_name(e.code())}, {"message", e.what()}};
    }
  };
  for (std::int64_t j = 0; j <= b.big_j(); ++j) {
    const std::string tag = std::to_string(j);
    write_spacetime_csv(dir + "/U_" + tag + ".csv", grid, b.tg.nodes, b.u[j]);
    write_spacetime_csv(dir + "/Err_" + tag + ".csv", grid, b.tg.nodes, b.err[j]);
    json lv = {{"j", j}, {"U", "U_" + tag + ".csv"}, {"Err", "Err_" + tag + ".csv"}, {"err_ratio_fit", slope_of(b.err[j])}};
    if (j > 0) {
      lv["w_ratio_fit"] = slope_of(b.w[j]);
      lv["tail_exponents"] = {num(b.tables[j - 1].tail_p[0]), num(b.tables[j - 1].tail_p[1]),
                              num(b.tables[j - 1].tail_p[2])};
    }
    levels.push_back(lv);
  }
  write_grid_field_csv(dir + "/A.csv", "A", grid, b.a.values);
  json manifest = {
      {"model", to_json(b.model)},
      {"scheme", to_json(b.scheme)},
      {"k_set", b.a.spec.describe()},
      {"grid", {{"dim", grid.dim()}, {"L", grid.half_width()}, {"M", grid.points_per_dim()}}},
      {"time_grid", {{"t_start", b.tg.t_start}, {"t_end", b.tg.t_end}, {"nodes", b.tg.size()}}},
      {"a_field", {{"k_nodes", b.a.k_node_count}, {"bound_grad", b.a.bound_grad}, {"bound_lap", b.a.bound_lap}}},
      {"trusted_window", b.trusted_from ? json{*b.trusted_from, b.tg.t_end} : json(nullptr)},
      {"fit_window", {fit_lo, fit_hi}},
      {"levels", levels}};
  write_text(dir + "/manifest.json", manifest.dump(2) + "\n");
}

nlohmann::json report_json(const metrics::RunReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  json energy = json::array();
  for (std::size_t i = 0; i < r.epsilon.t.size(); ++i) energy.push_back({r.epsilon.t[i], num(r.epsilon.energy[i])});
  json eps = {{"initial_l2", r.epsilon.initial_l2},
              {"sup_relative", num(r.epsilon.sup_relative)},
              {"slope_fit", to_json(r.epsilon.slope_fit)},
              {"t", r.epsilon.t},
              {"l2", r.epsilon.l2},
              {"grad_l2", r.epsilon.grad_l2},
              {"relative", r.epsilon.relative}};
  return {{"params",
           {{"model", to_json(r.model)},
            {"scheme", to_json(r.scheme)},
            {"k_set", r.k_set},
            {"trusted_from", r.trusted_from ? json(*r.trusted_from) : json(nullptr)}}},
          {"checks", checks},
          {"all_pass", r.all_pass()},
          {"epsilon", eps},
          {"energy", energy}};
}

void write_norms_csv(const std::string& path, const std::vector<metrics::NormSeries>& series) {
  auto os = open_out(path);
  os << "t,series_label,region_label,value\n";
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.t.size(); ++i)
      os << fmt17(s.t[i]) << ',' << s.label << ",\"" << s.region << "\"," << fmt17(s.value[i]) << '\n';
}

void write_report(const std::string& dir, const metrics::RunReport& r) {
  write_text(dir + "/report.json", report_json(r).dump(2) + "\n");
  write_norms_csv(dir + "/norms.csv", r.norms);
}

}  // namespace nlslab::io
