#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nlslab/io.hpp"

using namespace nlslab;
using geometry::Grid;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "nlslab_unit_io";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Internal;
}

}  // namespace

TEST_CASE("fmt17 round-trips doubles") {
  for (double v : {0.1, -1.0 / 3, 1e-300, 6.02214076e23, std::nextafter(1.0, 2.0)})
    CHECK(std::stod(io::fmt17(v)) == v);
}

TEST_CASE("grid field CSV round-trip") {
  Grid g(2, 4.0, 16);
  RealField z(g.node_count());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = std::sin(0.37 * i) / 3.0;
  const auto p = scratch("z.csv");
  io::write_grid_field_csv(p.string(), "Z", g, z);
  const auto back = io::read_grid_field_csv(p.string());
  CHECK(back.tag == "Z");
  CHECK(back.grid == g);
  CHECK(back.values == z);
  CHECK(code_of([] { io::read_grid_field_csv("/nonexistent/z.csv"); }) == ErrorCode::Io);
  std::ofstream(scratch("bad.csv")) << "Z,16,8,1\n1,2,3\n";
  CHECK(code_of([] { io::read_grid_field_csv(scratch("bad.csv").string()); }) != ErrorCode::Internal);
}

TEST_CASE("trajectory CSV round-trip is bit-exact") {
  Grid g(1, 8.0, 32);
  solver::TrajectoryRecord rec;
  rec.t0 = -0.5;
  for (double t : {-0.5, -0.25, -1.0 / 7}) {
    ComplexField u(g.node_count());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = cplx(std::cos(t * i), std::exp(t) / (i + 1.0));
    rec.snapshots.push_back({t, u});
  }
  const auto p = scratch("traj.csv");
  io::write_trajectory_csv(p.string(), g, rec);
  const auto back = io::read_trajectory_csv(p.string(), g);
  REQUIRE(back.snapshots.size() == 3);
  CHECK(back.t0 == -0.5);
  for (std::size_t s = 0; s < 3; ++s) {
    CHECK(back.snapshots[s].t == rec.snapshots[s].t);
    CHECK(back.snapshots[s].u == rec.snapshots[s].u);
  }
  CHECK(code_of([&] { io::read_trajectory_csv(p.string(), Grid(1, 8.0, 64)); }) != ErrorCode::Internal);
}

TEST_CASE("report JSON is deterministic and keeps the schema") {
  metrics::RunReport r;
  r.model = {2.0, 1.0, 1};
  r.scheme.big_j = 2;
  r.scheme.k = 8;
  r.k_set = "points[(0)]";
  r.trusted_from = -0.04;
  r.checks.push_back({"local_l2_rate", -0.4, -0.02, -0.55, -0.3875, -0.45, 0.99, true, "x0=0"});
  r.checks.push_back({"epsilon_l2_slope", -0.4, -0.02, 0.0, INFINITY, -0.1, 0.5, false, ""});
  r.epsilon.t = {-0.5, -0.1};
  r.epsilon.energy = {0.0, 1.5};
  r.norms.push_back({"u_l2", "|x|<0.5", {-0.5, -0.1}, {1.0, 2.0}});
  const auto j = io::report_json(r);
  CHECK(j.contains("params"));
  CHECK(j["checks"].size() == 2);
  CHECK(j["checks"][0]["name"] == "local_l2_rate");
  CHECK(j["checks"][1]["target_hi"].is_null());
  CHECK(j["all_pass"] == false);
  CHECK(j.contains("epsilon"));
  CHECK(j["energy"].size() == 2);
  const auto d1 = scratch("r1"), d2 = scratch("r2");
  io::write_report(d1.string(), r);
  io::write_report(d2.string(), r);
  CHECK(slurp(d1 / "report.json") == slurp(d2 / "report.json"));
  CHECK(slurp(d1 / "norms.csv") == slurp(d2 / "norms.csv"));
  CHECK(slurp(d1 / "norms.csv").rfind("t,series_label,region_label,value", 0) == 0);
}
