#include <nlslab/nlslab.h>

#include <cstring>
#include <memory>
#include <string>

#include "ansatz.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "model.hpp"
#include "solver.hpp"

using namespace nlslab;

struct nls_grid {
  geometry::Grid grid;
};
struct nls_aset {
  geometry::CompactSetSpec spec;
};
struct nls_afield {
  geometry::AField a;
};
struct nls_bundle {
  ansatz::AnsatzBundle b;
};
struct nls_trajectory {
  geometry::Grid grid;
  solver::TrajectoryRecord rec;
  bool diverged = false;
  double last_good_t = 0.0;
};
struct nls_report {
  metrics::RunReport r;
};

namespace {

thread_local std::string g_last_error;

template <class F>
nls_status guard(F&& f) {
  try {
    f();
    g_last_error.clear();
    return NLS_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return static_cast<nls_status>(static_cast<int>(e.code()));
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return NLS_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return NLS_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) fail(ErrorCode::InvalidArgument, std::string(what) + " is NULL");
}

model::ModelParams to_model(const nls_model* m) {
  need(m, "model");
  model::ModelParams p{m->alpha, m->lambda2, m->dim};
  p.validate();
  return p;
}

model::SchemeParams to_scheme(const nls_scheme* s) {
  need(s, "scheme");
  return {s->csu, s->sigma, s->theta, s->big_j, s->k,
          s->mode == NLS_MODE_PAPER ? model::SchemeMode::Paper : model::SchemeMode::Experiment};
}

}  // namespace

extern "C" {

const char* nls_status_name(nls_status s) {
  if (s == NLS_OK) return "Ok";
  return error_code_name(static_cast<ErrorCode>(static_cast<int>(s)));
}

const char* nls_last_error(void) { return g_last_error.c_str(); }

const char* nls_version(void) { return "0.1.0"; }

nls_status nls_model_check(const nls_model* m, int* h1_subcritical) {
  return guard([&] {
    const auto p = to_model(m);
    if (h1_subcritical) *h1_subcritical = p.h1_subcritical() ? 1 : 0;
  });
}

nls_status nls_eval_f(const nls_model* m, const double z[2], double out[2]) {
  return guard([&] {
    need(z, "z");
    need(out, "out");
    const cplx v = model::eval_f({z[0], z[1]}, to_model(m));
    out[0] = v.real();
    out[1] = v.imag();
  });
}

nls_status nls_ode_flow(const nls_model* m, const double u0[2], double dt, double out[2]) {
  return guard([&] {
    need(u0, "u0");
    need(out, "out");
    const cplx v = model::ode_flow({u0[0], u0[1]}, dt, to_model(m));
    out[0] = v.real();
    out[1] = v.imag();
  });
}

nls_status nls_estimate_csu(const nls_model* m, int64_t samples, uint64_t seed, double* out) {
  return guard([&] {
    need(out, "out");
    *out = model::estimate_csu(to_model(m), samples, seed);
  });
}

nls_status nls_scheme_params(const nls_model* m, double csu, nls_scheme_mode mode, const int64_t* big_j,
                             const int64_t* k, nls_scheme* out) {
  return guard([&] {
    need(out, "out");
    model::SchemeOverrides ov;
    if (big_j) ov.big_j = *big_j;
    if (k) ov.k = *k;
    const auto s = model::compute_scheme_params(
        to_model(m), csu, mode == NLS_MODE_PAPER ? model::SchemeMode::Paper : model::SchemeMode::Experiment, ov);
    *out = {s.csu, s.sigma, s.theta, s.big_j, s.k, mode};
  });
}

nls_status nls_grid_create(int dim, double half_width, int points_per_dim, nls_grid** out) {
  return guard([&] {
    need(out, "out");
    *out = new nls_grid{geometry::Grid(dim, half_width, points_per_dim)};
  });
}

void nls_grid_destroy(nls_grid* g) { delete g; }
size_t nls_grid_node_count(const nls_grid* g) { return g ? g->grid.node_count() : 0; }
double nls_grid_spacing(const nls_grid* g) { return g ? g->grid.spacing() : 0.0; }

nls_status nls_aset_points(int dim, size_t count, const double* coords, int squared, nls_aset** out) {
  return guard([&] {
    need(out, "out");
    if (count > 0) need(coords, "coords");
    if (dim < 1) fail(ErrorCode::InvalidSpec, "dim must be >= 1");
    std::vector<geometry::Point> pts;
    for (size_t i = 0; i < count; ++i)
      pts.emplace_back(coords + i * static_cast<size_t>(dim), coords + (i + 1) * static_cast<size_t>(dim));
    auto s = geometry::CompactSetSpec::make_points(std::move(pts),
                                                   squared ? geometry::ZForm::Squared : geometry::ZForm::Distance);
    s.validate(dim);
    *out = new nls_aset{std::move(s)};
  });
}

nls_status nls_aset_sphere(int dim, const double* center, double radius, int squared, nls_aset** out) {
  return guard([&] {
    need(out, "out");
    need(center, "center");
    if (dim < 1) fail(ErrorCode::InvalidSpec, "dim must be >= 1");
    auto s = geometry::CompactSetSpec::make_sphere(geometry::Point(center, center + dim), radius,
                                                   squared ? geometry::ZForm::Squared : geometry::ZForm::Distance);
    s.validate(dim);
    *out = new nls_aset{std::move(s)};
  });
}

nls_status nls_aset_from_csv(const char* path, nls_aset** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    auto f = io::read_grid_field_csv(path);
    if (f.tag != "Z") fail(ErrorCode::InvalidSpec, std::string(path) + ": header tag must be Z");
    auto s = geometry::CompactSetSpec::make_user_field(f.grid, std::move(f.values));
    s.validate(f.grid.dim());
    *out = new nls_aset{std::move(s)};
  });
}

void nls_aset_destroy(nls_aset* s) { delete s; }

nls_status nls_aset_describe(const nls_aset* s, char* buf, size_t cap, size_t* needed) {
  return guard([&] {
    need(s, "set");
    const std::string d = s->spec.describe();
    if (needed) *needed = d.size() + 1;
    if (buf && cap > 0) {
      const size_t n = std::min(cap - 1, d.size());
      std::memcpy(buf, d.data(), n);
      buf[n] = '\0';
    }
  });
}

nls_status nls_afield_build(const nls_aset* s, int64_t k, const nls_grid* g, nls_afield** out) {
  return guard([&] {
    need(s, "set");
    need(g, "grid");
    need(out, "out");
    *out = new nls_afield{geometry::build_A(s->spec, k, g->grid)};
  });
}

void nls_afield_destroy(nls_afield* a) { delete a; }

nls_status nls_afield_info_get(const nls_afield* a, nls_afield_info* out) {
  return guard([&] {
    need(a, "afield");
    need(out, "out");
    *out = {a->a.k, a->a.k_node_count, a->a.bound_grad, a->a.bound_lap};
  });
}

nls_status nls_afield_values(const nls_afield* a, double* out, size_t n) {
  return guard([&] {
    need(a, "afield");
    need(out, "out");
    if (n != a->a.values.size()) fail(ErrorCode::InvalidArgument, "buffer length must equal the node count");
    std::copy(a->a.values.begin(), a->a.values.end(), out);
  });
}

nls_status nls_afield_export_csv(const nls_afield* a, const char* path) {
  return guard([&] {
    need(a, "afield");
    need(path, "path");
    io::write_grid_field_csv(path, "A", a->a.grid, a->a.values);
  });
}

nls_status nls_bundle_build(const nls_afield* a, const nls_model* m, const nls_scheme* s, const nls_time_grid* tg,
                            double analysis_radius, nls_bundle** out) {
  return guard([&] {
    need(a, "afield");
    need(tg, "time grid");
    need(out, "out");
    const auto grid = ansatz::TimeGrid::geometric(tg->t_start, tg->t_end, tg->count);
    ansatz::BuildOptions opt;
    opt.analysis_radius = analysis_radius;
    *out = new nls_bundle{ansatz::build_ansatz(a->a, to_model(m), to_scheme(s), grid, opt)};
  });
}

void nls_bundle_destroy(nls_bundle* b) { delete b; }

nls_status nls_bundle_info_get(const nls_bundle* b, nls_bundle_info* out) {
  return guard([&] {
    need(b, "bundle");
    need(out, "out");
    const auto& x = b->b;
    *out = {x.big_j(), x.tg.size(), x.trusted_from ? 1 : 0, x.trusted_from.value_or(0.0), x.tg.t_start,
            x.tg.t_end};
  });
}

nls_status nls_bundle_eval_uj(const nls_bundle* b, double t, double* out, size_t n) {
  return guard([&] {
    need(b, "bundle");
    need(out, "out");
    if (n != b->b.a.values.size()) fail(ErrorCode::InvalidArgument, "buffer length must equal the node count");
    const auto u = ansatz::eval_UJ(b->b, t);
    for (size_t i = 0; i < n; ++i) {
      out[2 * i] = u[i].real();
      out[2 * i + 1] = u[i].imag();
    }
  });
}

nls_status nls_bundle_level_ratio(const nls_bundle* b, nls_level_kind kind, int64_t j, double* out, size_t nt) {
  return guard([&] {
    need(b, "bundle");
    need(out, "out");
    const auto& x = b->b;
    if (j < 0 || j > x.big_j() || (kind == NLS_LEVEL_W && j == 0))
      fail(ErrorCode::InvalidArgument, "level index out of range");
    if (nt != x.tg.size()) fail(ErrorCode::InvalidArgument, "buffer length must equal the time node count");
    const auto& f = kind == NLS_LEVEL_U ? x.u[j] : kind == NLS_LEVEL_W ? x.w[j] : x.err[j];
    const auto s = ansatz::level_ratio_series(f, x.u[0], x.analysis_mask);
    std::copy(s.begin(), s.end(), out);
  });
}

nls_status nls_bundle_export(const nls_bundle* b, const char* dir, double fit_lo, double fit_hi) {
  return guard([&] {
    need(b, "bundle");
    need(dir, "dir");
    io::write_bundle(dir, b->b, fit_lo, fit_hi);
  });
}

nls_status nls_simulate(const nls_bundle* b, double t0, const nls_solver_config* cfg, nls_trajectory** out) {
  return guard([&] {
    need(b, "bundle");
    need(cfg, "config");
    need(out, "out");
    *out = nullptr;
    solver::SolverConfig sc;
    sc.dt_max = cfg->dt_max;
    sc.shrink_factor = cfg->shrink_factor;
    sc.substep_safety = cfg->substep_safety;
    sc.t_stop = cfg->t_stop;
    if (cfg->snapshot_count > 0) need(cfg->snapshot_times, "snapshot_times");
    sc.snapshot_times.assign(cfg->snapshot_times, cfg->snapshot_times + cfg->snapshot_count);
    sc.dealias = cfg->dealias != 0;
    sc.validate(t0);
    const auto init = ansatz::eval_UJ(b->b, t0);
    spectral::Spectral sp(b->b.a.grid);
    try {
      auto rec = solver::integrate(sp, init, t0, sc, b->b.model);
      *out = new nls_trajectory{b->b.a.grid, std::move(rec), false, 0.0};
    } catch (const solver::DivergedError& e) {
      *out = new nls_trajectory{b->b.a.grid, e.partial(), true, e.last_good_t()};
      throw;
    }
  });
}

void nls_trajectory_destroy(nls_trajectory* tr) { delete tr; }

nls_status nls_trajectory_info_get(const nls_trajectory* tr, nls_trajectory_info* out) {
  return guard([&] {
    need(tr, "trajectory");
    need(out, "out");
    const auto& r = tr->rec;
    *out = {r.t0, r.snapshots.empty() ? r.t0 : r.snapshots.back().t, r.snapshots.size(), r.steps.size(),
            tr->diverged ? 1 : 0, tr->diverged ? tr->last_good_t : (r.snapshots.empty() ? r.t0 : r.snapshots.back().t)};
  });
}

nls_status nls_trajectory_write_csv(const nls_trajectory* tr, const char* path) {
  return guard([&] {
    need(tr, "trajectory");
    need(path, "path");
    io::write_trajectory_csv(path, tr->grid, tr->rec);
  });
}

nls_status nls_trajectory_write_steps_csv(const nls_trajectory* tr, const char* path) {
  return guard([&] {
    need(tr, "trajectory");
    need(path, "path");
    io::write_steps_csv(path, tr->rec);
  });
}

nls_status nls_trajectory_read_csv(const char* path, const nls_grid* g, nls_trajectory** out) {
  return guard([&] {
    need(path, "path");
    need(g, "grid");
    need(out, "out");
    *out = new nls_trajectory{g->grid, io::read_trajectory_csv(path, g->grid), false, 0.0};
  });
}

void nls_check_config_default(nls_check_config* out) {
  if (!out) return;
  *out = {0.05, 0.5, 1.0, 0.0, 3.0, 1.0, 10.0, 0.1, 0.01};
}

nls_status nls_verify(const nls_trajectory* tr, const nls_bundle* b, const nls_check_config* cfg, nls_report** out) {
  return guard([&] {
    need(tr, "trajectory");
    need(b, "bundle");
    need(out, "out");
    nls_check_config c;
    nls_check_config_default(&c);
    if (cfg) c = *cfg;
    const auto& bundle = b->b;
    if (!(tr->grid == bundle.a.grid)) fail(ErrorCode::InvalidArgument, "trajectory grid differs from bundle grid");
    const int dim = bundle.model.dim;
    const geometry::Point zero(static_cast<size_t>(dim), 0.0);
    metrics::RateCheckConfig rc;
    rc.slope_tol = c.slope_tol;
    rc.local_radius = c.local_radius;
    rc.bounded_ratio = c.bounded_ratio;
    rc.growth_ratio = c.growth_ratio;
    rc.exclude_fraction = c.exclude_fraction;
    auto ext = geometry::RegionSpec::outside_ball(zero, c.exterior_radius);
    rc.exterior = c.exterior_core > 0.0
                      ? geometry::RegionSpec::union_of({ext, geometry::RegionSpec::ball(zero, c.exterior_core)})
                      : ext;
    rc.gradient_region = geometry::RegionSpec::ball(zero, c.gradient_radius);
    auto rates = metrics::check_blowup_rates(tr->rec, bundle, rc);
    metrics::EpsilonConfig ec;
    ec.relative_threshold = c.epsilon_threshold;
    ec.exclude_fraction = c.exclude_fraction;
    auto eps = metrics::check_epsilon(tr->rec, bundle, ec);

    metrics::RunReport r;
    r.model = bundle.model;
    r.scheme = bundle.scheme;
    r.k_set = bundle.a.spec.describe();
    r.trusted_from = bundle.trusted_from;
    r.checks = rates.checks;
    r.checks.insert(r.checks.end(), eps.set.checks.begin(), eps.set.checks.end());
    r.epsilon = eps.summary;
    r.norms = rates.series;
    r.norms.insert(r.norms.end(), eps.set.series.begin(), eps.set.series.end());
    *out = new nls_report{std::move(r)};
  });
}

void nls_report_destroy(nls_report* r) { delete r; }

nls_status nls_report_summary(const nls_report* r, size_t* checks, int* all_pass) {
  return guard([&] {
    need(r, "report");
    if (checks) *checks = r->r.checks.size();
    if (all_pass) *all_pass = r->r.all_pass() ? 1 : 0;
  });
}

nls_status nls_report_check(const nls_report* r, size_t i, nls_check* out) {
  return guard([&] {
    need(r, "report");
    need(out, "out");
    if (i >= r->r.checks.size()) fail(ErrorCode::InvalidArgument, "check index out of range");
    const auto& c = r->r.checks[i];
    std::memset(out, 0, sizeof *out);
    std::strncpy(out->name, c.name.c_str(), sizeof out->name - 1);
    out->window_lo = c.window_lo;
    out->window_hi = c.window_hi;
    out->target_lo = c.target_lo;
    out->target_hi = c.target_hi;
    out->fitted = c.fitted;
    out->r2 = c.r2;
    out->pass = c.pass ? 1 : 0;
  });
}

nls_status nls_report_write(const nls_report* r, const char* dir) {
  return guard([&] {
    need(r, "report");
    need(dir, "dir");
    io::write_report(dir, r->r);
  });
}

nls_status nls_gn_diagnostic(const nls_model* m, const nls_grid* g, const double* widths, size_t n, double* ratios,
                             double* spread) {
  return guard([&] {
    need(g, "grid");
    need(widths, "widths");
    spectral::Spectral sp(g->grid);
    const auto rep = metrics::gn_diagnostic(sp, std::span<const double>(widths, n), to_model(m));
    if (ratios) std::copy(rep.ratios.begin(), rep.ratios.end(), ratios);
    if (spread) *spread = rep.spread;
  });
}

}  // extern "C"
