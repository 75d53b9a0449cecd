// Acceptance run: one PASS/FAIL line per criterion, sub-results indented.
// Usage: acceptance [--criterion N] [--info]
#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "nlslab/ansatz.hpp"
#include "nlslab/metrics.hpp"
#include "nlslab/model.hpp"
#include "nlslab/solver.hpp"
#include "oracles.hpp"

using namespace nlslab;
using geometry::CompactSetSpec;
using geometry::Grid;
using geometry::RegionSpec;

namespace {

struct Verdict {
  bool pass = true;
  std::vector<std::string> lines;

  void add(bool ok, const std::string& what) {
    pass = pass && ok;
    lines.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void note(const std::string& what) { lines.push_back("     " + what); }
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const Grid& grid() {
  static const Grid g(1, 8.0, 512);
  return g;
}

model::SchemeParams experiment(const model::ModelParams& p, std::int64_t j, std::int64_t k = 8) {
  return model::compute_scheme_params(p, 3.0, model::SchemeMode::Experiment, {j, k});
}

ansatz::TimeGrid bundle_times() { return ansatz::TimeGrid::geometric(-1.0, -1e-4, 256); }

std::vector<double> geometric(double a, double b, int n) {
  std::vector<double> t;
  for (int i = 1; i <= n; ++i) t.push_back(-std::exp(std::log(-a) + (std::log(-b) - std::log(-a)) * i / n));
  t.back() = b;
  return t;
}

// ---------------------------------------------------------------------------

Verdict c1_ode_identity() {
  Verdict v;
  const auto a = geometry::build_A(CompactSetSpec::make_points({{0.0}}), 8, grid());
  const auto tg = ansatz::TimeGrid::geometric(-1.0, -0.01, 64);
  for (double alpha : {0.5, 1.0, 2.0, 3.0}) {
    for (double l2v : {0.0, 1.0}) {
      const model::ModelParams p{alpha, l2v, 1};
      double worst = 0;
      for (double t : tg.nodes) {
        const auto u = ansatz::eval_U0(a, t, p);
        const auto du = ansatz::eval_dt_U0(a, t, p);
        for (std::size_t i = 0; i < u.size(); ++i) {
          const cplx fu = oracle::f(u[i], alpha);
          worst = std::max(worst, std::abs(du[i] - cplx(1.0, l2v) * fu) / std::abs(fu));
        }
      }
      v.add(worst < 1e-10, "alpha=" + num(alpha) + " lambda2=" + num(l2v) + " max rel residual " + num(worst) +
                               " (< 1e-10)");
    }
  }
  return v;
}

double phi_residual(const ansatz::SpaceTimeField& w, const ansatz::SpaceTimeField& u0,
                    const ansatz::SpaceTimeField& g, const model::ModelParams& p, const ansatz::TimeGrid& tg) {
  double num_ = 0, den = 0;
  for (std::size_t it = 1; it + 1 < tg.size(); ++it) {
    const double s0 = std::log(-tg.nodes[it - 1]), s1 = std::log(-tg.nodes[it]), s2 = std::log(-tg.nodes[it + 1]);
    for (std::size_t ix = 0; ix < u0.node_count(); ++ix) {
      const cplx dw = oracle::three_point(s0, s1, s2, w.at(it - 1, ix), w.at(it, ix), w.at(it + 1, ix)) / tg.nodes[it];
      const cplx r = dw - p.lambda() * oracle::df_scaled(u0.at(it, ix), w.at(it, ix), p.alpha) - g.at(it, ix);
      num_ += std::norm(r);
      den += std::norm(g.at(it, ix));
    }
  }
  return std::sqrt(num_ / den);
}

Verdict c2_phi() {
  Verdict v;
  const auto a = geometry::build_A(CompactSetSpec::make_points({{0.0}}), 8, grid());
  const auto tg = bundle_times();
  for (double l2v : {0.0, 1.0}) {
    const model::ModelParams p{2.0, l2v, 1};
    const auto u0 = ansatz::sample_U0(a, tg, p);
    ansatz::SpaceTimeField g(tg.size(), u0.node_count());
    for (std::size_t it = 0; it < tg.size(); ++it) {
      const auto lap = ansatz::spectral_laplacian(u0.row(it), grid());
      for (std::size_t ix = 0; ix < lap.size(); ++ix) g.at(it, ix) = cplx(0, 1) * lap[ix];
    }
    const auto r = ansatz::phi_apply(g, u0, p, tg);
    const double res = phi_residual(r.w, u0, g, p, tg);
    v.add(res < 1e-3, "lambda2=" + num(l2v) + " residual of dw/dt - lambda df(U0) w - Err0: " + num(res) + " (< 1e-3)");
    if (l2v == 0.0)
      v.add(r.term3_max_abs == 0.0, "lambda2=0 third term max |.| = " + num(r.term3_max_abs) + " (== 0)");
    ansatz::SpaceTimeField zero(tg.size(), u0.node_count());
    const auto z = ansatz::phi_apply(zero, u0, p, tg);
    bool all_zero = true;
    for (cplx c : z.w.data()) all_zero = all_zero && c == cplx{};
    v.add(all_zero, "lambda2=" + num(l2v) + " Phi(0) == 0 exactly");
  }
  return v;
}

Verdict c3_refinement() {
  Verdict v;
  const auto a = geometry::build_A(CompactSetSpec::make_points({{0.0}}), 8, grid());
  const auto tg = bundle_times();
  const std::vector<std::uint8_t> mask = geometry::region_mask(grid(), RegionSpec::ball({0.0}, 4.0));
  for (double l2v : {0.0, 1.0}) {
    const model::ModelParams p{2.0, l2v, 1};
    const auto b = ansatz::build_ansatz(a, p, experiment(p, 2), tg);
    std::vector<double> mt;
    std::vector<std::size_t> idx;
    for (std::size_t it = 0; it < tg.size(); ++it)
      if (tg.nodes[it] >= -0.5 && tg.nodes[it] <= -0.05) {
        idx.push_back(it);
        mt.push_back(-tg.nodes[it]);
      }
    auto slope_of = [&](const ansatz::SpaceTimeField& f) {
      const auto s = ansatz::level_ratio_series(f, b.u[0], mask);
      std::vector<double> y;
      for (std::size_t it : idx) y.push_back(s[it]);
      return oracle::loglog_slope(mt, y);
    };
    const double err_target[3] = {-0.25, 0.5, 1.25};
    for (int j = 0; j <= 2; ++j) {
      const double s = slope_of(b.err[j]);
      v.add(std::abs(s - err_target[j]) <= 0.1, "lambda2=" + num(l2v) + " Err_" + std::to_string(j) + " slope " +
                                                   num(s) + " (target " + num(err_target[j]) + " +- 0.1)");
    }
    const double w_target[3] = {0.0, 0.75, 1.5};
    for (int j = 1; j <= 2; ++j) {
      const double s = slope_of(b.w[j]);
      v.add(std::abs(s - w_target[j]) <= 0.1, "lambda2=" + num(l2v) + " w_" + std::to_string(j) + " slope " +
                                                 num(s) + " (target " + num(w_target[j]) + " +- 0.1)");
    }
    double mn = INFINITY, mx = 0;
    for (std::size_t it : idx) {
      mn = std::min(mn, b.half_ratio_min[it]);
      mx = std::max(mx, b.half_ratio_max[it]);
    }
    v.add(mn >= 0.5 && mx <= 2.0, "lambda2=" + num(l2v) + " |U_J|/|U0| on [-0.5,-0.05] in [" + num(mn) + ", " +
                                      num(mx) + "] (within [0.5, 2]); trusted from t = " +
                                      (b.trusted_from ? num(*b.trusted_from) : std::string("none")));
  }
  return v;
}

Verdict c4_integrator() {
  Verdict v;
  {
    Grid g(1, 8.0, 64);
    spectral::Spectral sp(g);
    for (double l2v : {0.0, 1.0}) {
      const model::ModelParams p{2.0, l2v, 1};
      ComplexField u(g.node_count());
      for (std::size_t i = 0; i < u.size(); ++i)
        u[i] = 0.5 * (1.0 + 0.5 * std::cos(std::numbers::pi / 4 * g.coordinate(i, 0)));
      auto run = [&](double dt, int n) {
        ComplexField x = u;
        for (int s = 0; s < n; ++s) x = solver::strang_step(sp, x, dt, p);
        return x;
      };
      const double T = 0.2;
      const int n = 20;
      const auto ref = run(T / (2 * n * 64), 2 * n * 64);
      auto err = [&](const ComplexField& x) {
        double d = 0;
        for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - ref[i]));
        return d;
      };
      const double order = std::log2(err(run(T / n, n)) / err(run(T / (2 * n), 2 * n)));
      v.add(order >= 1.8 && order <= 2.2, "lambda2=" + num(l2v) + " Strang order " + num(order) + " (in [1.8, 2.2])");
    }
  }
  Grid g(1, 8.0, 512);
  spectral::Spectral sp(g);
  const model::ModelParams p{2.0, 1.0, 1};
  ComplexField u(g.node_count());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = g.coordinate(i, 0);
    u[i] = 0.9 * std::exp(-x * x) * std::polar(1.0, 0.3 * x);
  }
  auto l2sq = [&](const ComplexField& x) {
    double s = 0;
    for (cplx c : x) s += std::norm(c);
    return s * g.spacing();
  };
  double lin = 0;
  for (double dt : {1e-4, 0.01, 1.0}) lin = std::max(lin, std::abs(l2sq(solver::linear_step(sp, u, dt)) / l2sq(u) - 1));
  v.add(lin <= 1e-13, "linear substep L2 drift " + num(lin) + " (<= 1e-13 relative)");
  auto source = [&](const ComplexField& x) {
    double s = 0;
    for (cplx c : x) s += std::pow(std::abs(c), p.alpha + 2);
    return 2 * s * g.spacing();
  };
  const double dt = 1e-4;
  double worst = 0;
  for (int n = 0; n < 50; ++n) {
    const auto next = solver::strang_step(sp, u, dt, p);
    const double rate = (l2sq(next) - l2sq(u)) / dt;
    const double rhs = 0.5 * (source(u) + source(next));
    worst = std::max(worst, std::abs(rate - rhs) / rhs);
    u = next;
  }
  v.add(worst < 1e-4, "mass identity d/dt||u||^2 = 2 int |u|^(alpha+2) at dt=1e-4: defect " + num(worst) +
                          " (< 1e-4 relative)");
  return v;
}

// One simulation of the blow-up run, with the divergence caught.
struct Run {
  std::optional<ansatz::AnsatzBundle> bundle;
  solver::TrajectoryRecord record;
  bool diverged = false;
  double last_good_t = 0.0;
  std::string error;
  double seconds = 0.0;
};

Run simulate(const CompactSetSpec& k_set, std::int64_t j, double t0, double t_stop, int snapshots = 64) {
  Run r;
  const auto t_start = std::chrono::steady_clock::now();
  const model::ModelParams p{2.0, 0.0, 1};
  const auto a = geometry::build_A(k_set, 8, grid());
  r.bundle = ansatz::build_ansatz(a, p, experiment(p, j), bundle_times());
  solver::SolverConfig cfg;
  cfg.t_stop = t_stop;
  cfg.snapshot_times = geometric(t0, t_stop, snapshots);
  spectral::Spectral sp(grid());
  const auto init = ansatz::eval_UJ(*r.bundle, t0);
  try {
    r.record = solver::integrate(sp, init, t0, cfg, p);
  } catch (const solver::DivergedError& e) {
    r.diverged = true;
    r.last_good_t = e.last_good_t();
    r.record = e.partial();
    r.error = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return r;
}

const Run& item5_run() {
  static const Run r = simulate(CompactSetSpec::make_points({{0.0}}), 2, -0.5, -0.02);
  return r;
}

void report_checks(Verdict& v, const std::vector<metrics::Check>& checks, const std::string& filter = "") {
  for (const auto& c : checks) {
    if (!filter.empty() && c.name.rfind(filter, 0) != 0) continue;
    v.add(c.pass, c.name + ": " + num(c.fitted) + " target [" + num(c.target_lo) + ", " + num(c.target_hi) +
                      "] on [" + num(c.window_lo) + ", " + num(c.window_hi) + "]" +
                      (c.r2 < 1.0 ? " r2=" + num(c.r2) : "") + (c.note.empty() ? "" : "; " + c.note));
  }
}

bool run_completed(Verdict& v, const Run& r, double t_stop) {
  if (r.diverged) {
    v.add(false, "run reaches t_stop = " + num(t_stop) + ": diverged, last good t = " + num(r.last_good_t) + " (" +
                     r.error + ")");
    return false;
  }
  v.add(true, "run reaches t_stop = " + num(t_stop) + " (" + std::to_string(r.record.steps.size()) + " steps, " +
                  num(r.seconds) + " s)");
  return true;
}

Verdict c5_rates() {
  Verdict v;
  const auto& r = item5_run();
  if (!run_completed(v, r, -0.02)) {
    v.add(false, "(i) L2(|x|<0.5) slope in [-0.55, -0.3875]: not evaluable");
    v.add(false, "(ii) H1(|x|>1) max/min < 3: not evaluable");
    v.add(false, "(iii) grad L2(|x|<1) increasing, final/initial >= 10: not evaluable");
    return v;
  }
  report_checks(v, metrics::check_blowup_rates(r.record, *r.bundle).checks);
  return v;
}

Verdict c6_two_points() {
  Verdict v;
  const auto k_set = CompactSetSpec::make_two_points(0.5, 1);
  const Run r = simulate(k_set, 2, -0.5, -0.02);
  if (!run_completed(v, r, -0.02)) {
    v.add(false, "local L2 slopes at x0 = -0.5, 0.5 <= -0.3875: not evaluable");
    v.add(false, "H1 on {|x|>1.5} u {|x|<0.1} max/min < 3: not evaluable");
    return v;
  }
  metrics::RateCheckConfig cfg;
  cfg.local_radius = 0.25;
  cfg.exterior = RegionSpec::union_of({RegionSpec::outside_ball({0.0}, 1.5), RegionSpec::ball({0.0}, 0.1)});
  const auto cs = metrics::check_blowup_rates(r.record, *r.bundle, cfg);
  for (const auto& c : cs.checks) {
    if (c.name.rfind("local_l2_rate", 0) == 0)
      v.add(c.fitted <= -0.3875, c.name + ": " + num(c.fitted) + " (<= -0.3875)");
    else if (c.name.rfind("exterior_h1_bounded", 0) == 0)
      report_checks(v, {c});
  }
  return v;
}

Verdict c7_epsilon() {
  Verdict v;
  const auto& r = item5_run();
  const bool complete = run_completed(v, r, -0.02);
  const auto e = metrics::check_epsilon(r.record, *r.bundle);
  v.add(e.summary.initial_l2 == 0.0, "eps(t0) = u(t0) - U_J(t0): ||.||_L2 = " + num(e.summary.initial_l2) + " (== 0)");
  if (!complete) {
    v.note("partial run up to t = " + num(r.record.snapshots.back().t) + ": sup relative size " +
           num(e.summary.sup_relative));
    v.add(false, "sup_t ||eps||/||U_J|| < 0.01: not evaluable on the requested window");
    v.add(false, "slope of ||eps||_L2 > 0: not evaluable on the requested window");
    return v;
  }
  report_checks(v, e.set.checks, "epsilon_relative_size");
  report_checks(v, e.set.checks, "epsilon_l2_slope");
  return v;
}

Verdict c8_paper_constants() {
  Verdict v;
  const auto s = model::compute_scheme_params({2.0, 0.0, 1}, 1.0, model::SchemeMode::Paper);
  v.add(s.sigma == 256.0, "sigma = " + num(s.sigma) + " (== 256)");
  v.add(s.theta == 1.0 / 12, "theta = " + num(s.theta) + " (== 1/12)");
  v.add(s.big_j == 1026, "J = " + std::to_string(s.big_j) + " (== 1026)");
  v.add(s.k == 2056, "k = " + std::to_string(s.k) + " (== 2056)");
  const auto again = model::compute_scheme_params({2.0, 0.0, 1}, 1.0, model::SchemeMode::Paper);
  v.add(again.sigma == s.sigma && again.theta == s.theta && again.big_j == s.big_j && again.k == s.k,
        "repeat call is identical");
  return v;
}

// Diagnostics that explain the red criteria. Printed, never gate anything.
void info() {
  std::printf("[INFO] diagnostics\n");
  {
    const Run r = simulate(CompactSetSpec::make_points({{0.0}}), 0, -0.5, -0.02);
    std::printf("  J=0 run t0=-0.5 -> -0.02: %s\n",
                r.diverged ? ("diverged at " + num(r.last_good_t)).c_str() : "completed");
    if (!r.diverged) {
      for (const auto& c : metrics::check_blowup_rates(r.record, *r.bundle).checks)
        std::printf("    %s %s = %s\n", c.pass ? "ok  " : "FAIL", c.name.c_str(), num(c.fitted).c_str());
      const auto e = metrics::check_epsilon(r.record, *r.bundle);
      std::printf("    eps sup relative %s, slope %s\n", num(e.summary.sup_relative).c_str(),
                  num(e.summary.slope_fit.slope).c_str());
    }
  }
  {
    // Ansatz itself used as the trajectory: how much can the gradient grow?
    const model::ModelParams p{2.0, 0.0, 1};
    const auto a = geometry::build_A(CompactSetSpec::make_points({{0.0}}), 8, grid());
    const auto b = ansatz::build_ansatz(a, p, experiment(p, 0), bundle_times());
    solver::TrajectoryRecord rec;
    rec.t0 = -0.5;
    rec.snapshots.push_back({-0.5, ansatz::eval_UJ(b, -0.5)});
    for (double t : geometric(-0.5, -0.02, 64)) rec.snapshots.push_back({t, ansatz::eval_UJ(b, t)});
    for (const auto& c : metrics::check_blowup_rates(rec, b).checks)
      std::printf("  U0 as trajectory: %s %s = %s\n", c.pass ? "ok  " : "FAIL", c.name.c_str(), num(c.fitted).c_str());
    std::printf("  ideal ||grad U0||_L2(|x|<1) ~ (-t)^(-1/2-1/(2k)): growth over [-0.5,-0.02] = %s\n",
                num(std::pow(25.0, 0.5 + 1.0 / 16)).c_str());
  }
  for (std::int64_t j : {0, 2}) {
    const Run r = simulate(CompactSetSpec::make_points({{0.0}}), j, -0.03, -1e-4, 16);
    std::printf("  J=%lld run t0=-0.03 -> -1e-4: %s\n", static_cast<long long>(j),
                r.diverged ? ("diverged at " + num(r.last_good_t)).c_str() : "completed");
    if (r.diverged && !r.record.steps.empty()) {
      const auto& last = r.record.snapshots.back();
      std::size_t arg = 0;
      for (std::size_t i = 0; i < last.u.size(); ++i)
        if (std::abs(last.u[i]) > std::abs(last.u[arg])) arg = i;
      std::printf("    last snapshot t=%s peak |u| at x=%s\n", num(last.t).c_str(),
                  num(grid().coordinate(arg, 0)).c_str());
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  bool with_info = false;
  app.add_option("--criterion", only, "run a single criterion (1-8)")->check(CLI::Range(1, 8));
  app.add_flag("--info", with_info, "print diagnostics only");
  CLI11_PARSE(app, argc, argv);

  if (with_info) {
    info();
    return 0;
  }
  struct Item {
    int id;
    const char* title;
    Verdict (*fn)();
  };
  const Item items[] = {
      {1, "ODE identity of U0", c1_ode_identity},
      {2, "Phi solves the linearized equation", c2_phi},
      {3, "refinement orders of Err_j and w_j", c3_refinement},
      {4, "split-step integrator", c4_integrator},
      {5, "blow-up rates, K={0}", c5_rates},
      {6, "two-point blow-up set", c6_two_points},
      {7, "epsilon smallness", c7_epsilon},
      {8, "paper-mode constants", c8_paper_constants},
  };
  bool all = true;
  for (const auto& it : items) {
    if (only && it.id != only) continue;
    Verdict v;
    try {
      v = it.fn();
    } catch (const Error& e) {
      v.add(false, std::string("error ") + error_code_name(e.code()) + ": " + e.what());
    }
    std::printf("[%s] C%d %s\n", v.pass ? "PASS" : "FAIL", it.id, it.title);
    for (const auto& l : v.lines) std::printf("    %s\n", l.c_str());
    std::fflush(stdout);
    all = all && v.pass;
  }
  return all ? 0 : 1;
}
