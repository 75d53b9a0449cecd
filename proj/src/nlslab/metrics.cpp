#include "metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "error.hpp"

namespace nlslab::metrics {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

RealField grad_sq(spectral::Spectral& sp, std::span<const cplx> field) {
  const int dim = sp.grid().dim();
  RealField g2(field.size(), 0.0);
  for (int d = 0; d < dim; ++d) {
    const auto g = sp.gradient(field, d);
    for (std::size_t i = 0; i < g.size(); ++i) g2[i] += std::norm(g[i]);
  }
  return g2;
}

geometry::Point origin(int dim) { return geometry::Point(static_cast<std::size_t>(dim), 0.0); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

double region_norm(spectral::Spectral& sp, std::span<const cplx> field, std::span<const std::uint8_t> mask,
                   NormKind kind, double p) {
  if (mask.size() != field.size()) fail(ErrorCode::InvalidArgument, "mask size does not match field");
  if (std::none_of(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; }))
    fail(ErrorCode::EmptyRegion, "norm over an empty region");
  const double vol = sp.grid().cell_volume();
  double s = 0.0;
  switch (kind) {
    case NormKind::L2:
      for (std::size_t i = 0; i < field.size(); ++i)
        if (mask[i]) s += std::norm(field[i]);
      return std::sqrt(s * vol);
    case NormKind::Lp:
      if (!(p >= 1.0)) fail(ErrorCode::InvalidArgument, "Lp norm needs p >= 1");
      for (std::size_t i = 0; i < field.size(); ++i)
        if (mask[i]) s += std::pow(std::abs(field[i]), p);
      return std::pow(s * vol, 1.0 / p);
    case NormKind::H1:
    case NormKind::GradL2: {
      const auto g2 = grad_sq(sp, field);
      for (std::size_t i = 0; i < field.size(); ++i)
        if (mask[i]) s += g2[i] + (kind == NormKind::H1 ? std::norm(field[i]) : 0.0);
      return std::sqrt(s * vol);
    }
  }
  return 0.0;
}

double energy(spectral::Spectral& sp, std::span<const cplx> eps, const model::ModelParams& p) {
  const auto g2 = grad_sq(sp, eps);
  double kin = 0.0, pot = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    kin += g2[i];
    pot += std::pow(std::abs(eps[i]), p.alpha + 2.0);
  }
  const double vol = sp.grid().cell_volume();
  return 0.5 * kin * vol - p.lambda2 / (p.alpha + 2.0) * pot * vol;
}

RateFit fit_rate(std::span<const double> t, std::span<const double> value, double t_lo, double t_hi) {
  if (t.size() != value.size()) fail(ErrorCode::InvalidArgument, "fit_rate: length mismatch");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] >= t_lo && t[i] <= t_hi)) continue;
    if (!(t[i] < 0.0)) fail(ErrorCode::InvalidArgument, "fit_rate: times must be negative");
    if (!(value[i] > 0.0))
      fail(ErrorCode::NonPositiveValue, "fit_rate: value " + fmt(value[i]) + " at t = " + fmt(t[i]));
    xs.push_back(std::log(-t[i]));
    ys.push_back(std::log(value[i]));
  }
  if (xs.size() < 8)
    fail(ErrorCode::InsufficientData, "fit_rate: " + std::to_string(xs.size()) + " samples in window, need 8");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) fail(ErrorCode::InsufficientData, "fit_rate: all samples at one time");
  RateFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (f.intercept + f.slope * xs[i]);
    ss_res += r * r;
  }
  f.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  f.t_lo = t_lo;
  f.t_hi = t_hi;
  f.samples = xs.size();
  return f;
}

std::pair<double, double> trimmed_window(double t_a, double t_b, double fraction) {
  const double la = std::log(-t_a), lb = std::log(-t_b);
  return {-std::exp(la - fraction * (la - lb)), t_b};
}

bool CheckSet::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

CheckSet check_blowup_rates(const solver::TrajectoryRecord& traj, const ansatz::AnsatzBundle& b,
                            const RateCheckConfig& cfg) {
  using geometry::RegionSpec;
  const auto& snaps = traj.snapshots;
  if (snaps.size() < 8) fail(ErrorCode::InsufficientData, "fewer than 8 snapshots");
  const double t_a = snaps.front().t, t_b = snaps.back().t;
  if (!(t_b < 0.0) || t_a / t_b < 10.0)
    fail(ErrorCode::InsufficientData, "snapshots must cover at least one decade of -t");
  const auto& grid = b.a.grid;
  const int dim = grid.dim();
  spectral::Spectral sp(grid);
  const auto [w_lo, w_hi] = trimmed_window(t_a, t_b, cfg.exclude_fraction);

  const RegionSpec exterior = cfg.exterior.value_or(RegionSpec::outside_ball(origin(dim), 1.0));
  const RegionSpec gradient = cfg.gradient_region.value_or(RegionSpec::ball(origin(dim), 1.0));
  const auto anchors = geometry::anchor_points(b.a.spec);

  CheckSet out;
  std::vector<std::vector<std::uint8_t>> local_masks;
  for (const auto& x0 : anchors) {
    const RegionSpec r = RegionSpec::ball(x0, cfg.local_radius);
    local_masks.push_back(geometry::region_mask(grid, r));
    out.series.push_back({"u_l2", r.label(), {}, {}});
  }
  const auto ext_mask = geometry::region_mask(grid, exterior);
  const auto grad_mask = geometry::region_mask(grid, gradient);
  out.series.push_back({"u_h1", exterior.label(), {}, {}});
  out.series.push_back({"u_grad_l2", gradient.label(), {}, {}});
  const std::size_t na = anchors.size();

  for (const auto& s : snaps) {
    for (std::size_t i = 0; i < na; ++i) {
      out.series[i].t.push_back(s.t);
      out.series[i].value.push_back(region_norm(sp, s.u, local_masks[i], NormKind::L2));
    }
    out.series[na].t.push_back(s.t);
    out.series[na].value.push_back(region_norm(sp, s.u, ext_mask, NormKind::H1));
    out.series[na + 1].t.push_back(s.t);
    out.series[na + 1].value.push_back(region_norm(sp, s.u, grad_mask, NormKind::GradL2));
  }

  const double a = b.model.alpha;
  const double lo = -1.0 / a - cfg.slope_tol;
  const double hi = -1.0 / a + dim / (2.0 * static_cast<double>(b.a.k)) + cfg.slope_tol;
  for (std::size_t i = 0; i < na; ++i) {
    const RateFit f = fit_rate(out.series[i].t, out.series[i].value, w_lo, w_hi);
    out.checks.push_back({"local_l2_rate " + out.series[i].region, w_lo, w_hi, lo, hi, f.slope, f.r_squared,
                          f.slope >= lo && f.slope <= hi, "least-squares slope vs ln(-t)"});
  }

  auto in_window = [&](const NormSeries& s) {
    std::vector<double> v;
    for (std::size_t i = 0; i < s.t.size(); ++i)
      if (s.t[i] >= w_lo && s.t[i] <= w_hi) v.push_back(s.value[i]);
    return v;
  };
  {
    const auto v = in_window(out.series[na]);
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    const double ratio = *mx / *mn;
    out.checks.push_back({"exterior_h1_bounded " + exterior.label(), w_lo, w_hi, 1.0, cfg.bounded_ratio, ratio,
                          1.0, ratio < cfg.bounded_ratio, "max/min of the H1 norm over the window"});
  }
  {
    const auto v = in_window(out.series[na + 1]);
    bool increasing = true;
    for (std::size_t i = 1; i < v.size(); ++i)
      if (!(v[i] > v[i - 1])) increasing = false;
    const double ratio = v.back() / v.front();
    out.checks.push_back({"gradient_growth " + gradient.label(), w_lo, w_hi, cfg.growth_ratio, kInf, ratio, 1.0,
                          increasing && ratio >= cfg.growth_ratio,
                          std::string("final/initial; strictly increasing: ") + (increasing ? "yes" : "no")});
  }
  return out;
}

EpsilonResult check_epsilon(const solver::TrajectoryRecord& traj, const ansatz::AnsatzBundle& b,
                            const EpsilonConfig& cfg) {
  const auto& snaps = traj.snapshots;
  if (snaps.empty()) fail(ErrorCode::InsufficientData, "trajectory has no snapshots");
  spectral::Spectral sp(b.a.grid);
  const std::vector<std::uint8_t> all(b.a.grid.node_count(), 1);
  EpsilonResult res;
  auto& sm = res.summary;
  for (const auto& s : snaps) {
    const auto uj = ansatz::eval_UJ(b, s.t);
    ComplexField eps(uj.size());
    for (std::size_t i = 0; i < eps.size(); ++i) eps[i] = s.u[i] - uj[i];
    const double l2 = region_norm(sp, eps, all, NormKind::L2);
    sm.t.push_back(s.t);
    sm.l2.push_back(l2);
    sm.grad_l2.push_back(region_norm(sp, eps, all, NormKind::GradL2));
    sm.relative.push_back(l2 / region_norm(sp, uj, all, NormKind::L2));
    sm.energy.push_back(energy(sp, eps, b.model));
  }
  sm.initial_l2 = sm.l2.front();
  sm.sup_relative = *std::max_element(sm.relative.begin(), sm.relative.end());
  const double t_a = snaps.front().t, t_b = snaps.back().t;

  auto& checks = res.set.checks;
  checks.push_back({"epsilon_initial_zero", t_a, t_a, 0.0, 0.0, sm.initial_l2, 1.0, sm.initial_l2 == 0.0,
                    "||u(t0) - U_J(t0)||_L2"});
  checks.push_back({"epsilon_relative_size", t_a, t_b, 0.0, cfg.relative_threshold, sm.sup_relative, 1.0,
                    sm.sup_relative < cfg.relative_threshold, "sup_t ||eps||_L2 / ||U_J||_L2"});
  if (t_b > t_a) {
    const auto [w_lo, w_hi] = trimmed_window(t_a, t_b, cfg.exclude_fraction);
    std::vector<double> ft, fv;
    for (std::size_t i = 0; i < sm.t.size(); ++i)
      if (sm.t[i] > t_a) {
        ft.push_back(sm.t[i]);
        fv.push_back(sm.l2[i]);
      }
    sm.slope_fit = fit_rate(ft, fv, w_lo, w_hi);
    checks.push_back({"epsilon_l2_slope", w_lo, w_hi, 0.0, kInf, sm.slope_fit.slope, sm.slope_fit.r_squared,
                      sm.slope_fit.slope > 0.0, "slope of ||eps||_L2 vs ln(-t)"});
  }
  res.set.series.push_back({"eps_l2", "whole", sm.t, sm.l2});
  res.set.series.push_back({"eps_grad_l2", "whole", sm.t, sm.grad_l2});
  res.set.series.push_back({"eps_relative", "whole", sm.t, sm.relative});
  return res;
}

GnReport gn_diagnostic(spectral::Spectral& sp, std::span<const double> widths, const model::ModelParams& p) {
  if (widths.size() < 5) fail(ErrorCode::InvalidArgument, "gn_diagnostic needs at least 5 fields");
  const auto& grid = sp.grid();
  const double a = p.alpha, nd = p.dim;
  GnReport r;
  r.theta = nd * a / (4.0 * (a + 1.0));
  r.exp_lower = (4.0 - (nd - 4.0) * a) / (2.0 * (a + 2.0));
  r.exp_grad = nd * a / (2.0 * (a + 2.0));
  auto ratio_for = [&](double w) {
    ComplexField u(grid.node_count());
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double rr = grid.radius(i);
      u[i] = std::exp(-rr * rr / (2.0 * w * w));
    }
    const auto g2 = grad_sq(sp, u);
    double top = 0.0, low = 0.0, grad = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double m = std::abs(u[i]);
      top += std::pow(m, 2.0 * a + 2.0);
      low += std::pow(m, a + 2.0);
      grad += std::pow(m, a) * g2[i];
    }
    const double vol = grid.cell_volume();
    return top * vol / (std::pow(low * vol, r.exp_lower) * std::pow(grad * vol, r.exp_grad));
  };
  r.widths.assign(widths.begin(), widths.end());
  for (double w : widths) r.ratios.push_back(ratio_for(w));
  r.unit_ratio = ratio_for(1.0);
  const auto [mn, mx] = std::minmax_element(r.ratios.begin(), r.ratios.end());
  r.spread = *mx / *mn;
  return r;
}

}  // namespace nlslab::metrics

namespace nlslab::metrics {

bool RunReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

}  // namespace nlslab::metrics
