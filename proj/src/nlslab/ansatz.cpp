#include "ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"
#include "spectral.hpp"

namespace nlslab::ansatz {
namespace {

// Integrand entries below this fraction of their noise envelope are treated
// as roundoff (e.g. Re(conj(U0) G) when G is exactly i times a real field).
constexpr double kNegligible = 1e-12;

// In place: h[i, x] -> int_{t_i}^0 g ds, where h = g * (-t) is the integrand
// in tau = ln(-t). The tail (t_end, 0) is closed with h_end / p, p fitted from
// the spatial l2 norms of h at the last two nodes. Returns p (NaN if h vanishes).
double cumulate_to_zero(RealField& h, const TimeGrid& tg, std::size_t nx) {
  const std::size_t nt = tg.size();
  auto l2 = [&](std::size_t it) {
    double s = 0.0;
    for (std::size_t ix = 0; ix < nx; ++ix) s += h[it * nx + ix] * h[it * nx + ix];
    return std::sqrt(s);
  };
  const double n1 = l2(nt - 1), n0 = l2(nt - 2);
  double p = std::numeric_limits<double>::quiet_NaN();
  double inv_p = 0.0;
  if (n1 > 0.0) {
    if (!(n0 > 0.0))
      fail(ErrorCode::NonIntegrableTail, "integrand switches on at the last time node");
    p = std::log(n1 / n0) / std::log(tg.nodes[nt - 1] / tg.nodes[nt - 2]);
    if (!(p > 0.0) || !std::isfinite(p))
      fail(ErrorCode::NonIntegrableTail,
           "fitted tail exponent p = " + std::to_string(p) + " is not positive");
    inv_p = 1.0 / p;
  }
  std::vector<double> tau(nt);
  for (std::size_t i = 0; i < nt; ++i) tau[i] = std::log(-tg.nodes[i]);
  double* last = &h[(nt - 1) * nx];
  std::vector<double> prev(last, last + nx);
  for (std::size_t ix = 0; ix < nx; ++ix) last[ix] = prev[ix] * inv_p;
  for (std::size_t i = nt - 1; i-- > 0;) {
    const double dtau = tau[i] - tau[i + 1];
    double* row = &h[i * nx];
    const double* next = &h[(i + 1) * nx];
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double hi = row[ix];
      row[ix] = next[ix] + 0.5 * (hi + prev[ix]) * dtau;
      prev[ix] = hi;
    }
  }
  return p;
}

void zero_negligible(RealField& h, const RealField& env) {
  for (std::size_t i = 0; i < h.size(); ++i)
    if (std::abs(h[i]) <= kNegligible * env[i]) h[i] = 0.0;
}

}  // namespace

TimeGrid TimeGrid::geometric(double t_start, double t_end, std::size_t count) {
  if (!(t_start < t_end) || !(t_end <= -1e-6) || !std::isfinite(t_start))
    fail(ErrorCode::InvalidArgument, "time grid needs t_start < t_end <= -1e-6");
  if (count < 32) fail(ErrorCode::InvalidArgument, "time grid needs at least 32 nodes");
  TimeGrid tg;
  tg.t_start = t_start;
  tg.t_end = t_end;
  tg.nodes.resize(count);
  const double l0 = std::log(-t_start), l1 = std::log(-t_end);
  for (std::size_t i = 0; i < count; ++i)
    tg.nodes[i] = -std::exp(l0 + (l1 - l0) * static_cast<double>(i) / static_cast<double>(count - 1));
  tg.nodes.front() = t_start;
  tg.nodes.back() = t_end;
  return tg;
}

double TimeGrid::ratio() const {
  return std::pow(t_end / t_start, 1.0 / static_cast<double>(nodes.size() - 1));
}

ComplexField eval_U0(const geometry::AField& a, double t, const model::ModelParams& p) {
  if (!(t < 0.0)) fail(ErrorCode::InvalidArgument, "U0 is defined for t < 0 only");
  ComplexField out(a.values.size());
  const double e = -1.0 / p.alpha, ph = -p.lambda2 / p.alpha;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double w = -p.alpha * t + a.values[i];
    out[i] = std::polar(std::pow(w, e), ph * std::log(w));
  }
  return out;
}

ComplexField eval_dt_U0(const geometry::AField& a, double t, const model::ModelParams& p) {
  if (!(t < 0.0)) fail(ErrorCode::InvalidArgument, "U0 is defined for t < 0 only");
  ComplexField out(a.values.size());
  const double e = -1.0 / p.alpha - 1.0, ph = -p.lambda2 / p.alpha;
  const cplx lam = p.lambda();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double w = -p.alpha * t + a.values[i];
    out[i] = lam * std::polar(std::pow(w, e), ph * std::log(w));
  }
  return out;
}

SpaceTimeField sample_U0(const geometry::AField& a, const TimeGrid& tg, const model::ModelParams& p) {
  SpaceTimeField f(tg.size(), a.values.size());
  for (std::size_t it = 0; it < tg.size(); ++it) {
    const auto row = eval_U0(a, tg.nodes[it], p);
    std::copy(row.begin(), row.end(), f.row(it).begin());
  }
  return f;
}

ComplexField spectral_laplacian(std::span<const cplx> field, const geometry::Grid& grid) {
  spectral::Spectral sp(grid);
  return sp.laplacian(field);
}

PhiResult phi_apply(const SpaceTimeField& g, const SpaceTimeField& u0, const model::ModelParams& p,
                    const TimeGrid& tg) {
  const std::size_t nt = tg.size(), nx = u0.node_count();
  if (g.time_count() != nt || u0.time_count() != nt || g.node_count() != nx)
    fail(ErrorCode::InvalidArgument, "phi_apply: field shapes do not match the time grid");
  const double a = p.alpha;
  RealField h1(nt * nx), h2(nt * nx), e1(nt * nx);
  for (std::size_t it = 0; it < nt; ++it) {
    const double s = -tg.nodes[it];
    // transform roundoff in G is absolute, of the order of eps * max|G|
    double gmax = 0.0;
    for (std::size_t ix = 0; ix < nx; ++ix) gmax = std::max(gmax, std::abs(g.at(it, ix)));
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const std::size_t k = it * nx + ix;
      const cplx u = u0.at(it, ix), gv = g.at(it, ix);
      const double au = std::abs(u);
      if (!(au > 0.0)) fail(ErrorCode::DegenerateInput, "phi_apply: U0 vanishes");
      const cplx c = std::conj(u) * gv;
      h1[k] = s * std::pow(au, -a - 2.0) * c.real();
      e1[k] = s * std::pow(au, -a - 1.0) * gmax;
      h2[k] = s * c.imag() / (au * au);
      const double e2 = s * gmax / au;
      if (std::abs(h1[k]) <= kNegligible * e1[k]) h1[k] = 0.0;
      if (std::abs(h2[k]) <= kNegligible * e2) h2[k] = 0.0;
    }
  }
  PhiResult res;
  res.tables.tail_p[0] = cumulate_to_zero(h1, tg, nx);
  res.tables.tail_p[1] = cumulate_to_zero(h2, tg, nx);
  cumulate_to_zero(e1, tg, nx);
  // I_1 = -h1, I_2 = -h2 from here on (int_0^t = -int_t^0).
  RealField h3(nt * nx), e3(nt * nx);
  for (std::size_t it = 0; it < nt; ++it) {
    const double s = -tg.nodes[it];
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const std::size_t k = it * nx + ix;
      const double w2a = std::pow(std::abs(u0.at(it, ix)), 2.0 * a);
      h3[k] = s * w2a * (-h1[k]);
      e3[k] = s * w2a * e1[k];
    }
  }
  zero_negligible(h3, e3);
  res.tables.tail_p[2] = cumulate_to_zero(h3, tg, nx);

  res.w = SpaceTimeField(nt, nx);
  const cplx im(0.0, 1.0);
  const cplx c3 = im * (a * p.lambda2);
  for (std::size_t k = 0; k < nt * nx; ++k) {
    h1[k] = -h1[k];
    h2[k] = -h2[k];
    h3[k] = -h3[k];
  }
  for (std::size_t it = 0; it < nt; ++it)
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const std::size_t k = it * nx + ix;
      const cplx u = u0.at(it, ix);
      const cplx t3 = c3 * u * h3[k];
      res.term3_max_abs = std::max(res.term3_max_abs, std::abs(t3));
      res.w.at(it, ix) = std::pow(std::abs(u), a) * u * h1[k] + im * u * h2[k] + t3;
    }
  res.tables.i1 = std::move(h1);
  res.tables.i2 = std::move(h2);
  res.tables.i3 = std::move(h3);
  return res;
}

std::vector<double> level_ratio_series(const SpaceTimeField& f, const SpaceTimeField& u0,
                                       std::span<const std::uint8_t> mask) {
  std::vector<double> out(f.time_count(), 0.0);
  for (std::size_t it = 0; it < f.time_count(); ++it)
    for (std::size_t ix = 0; ix < f.node_count(); ++ix)
      if (mask[ix]) out[it] = std::max(out[it], std::abs(f.at(it, ix)) / std::abs(u0.at(it, ix)));
  return out;
}

AnsatzBundle build_ansatz(const geometry::AField& a, const model::ModelParams& p,
                          const model::SchemeParams& sp, const TimeGrid& tg, const BuildOptions& opt) {
  p.validate();
  model::validate_scheme(p, sp.big_j, sp.k);
  if (a.k != sp.k) fail(ErrorCode::InvalidArgument, "AField exponent k differs from the scheme's k");
  if (a.grid.dim() != p.dim) fail(ErrorCode::InvalidArgument, "grid dimension differs from model dim");
  if (tg.size() < 32) fail(ErrorCode::InvalidArgument, "time grid needs at least 32 nodes");

  AnsatzBundle b{a, p, sp, tg, {}, {}, {}, {}, {}, {}, {}, {}, std::nullopt};
  const std::size_t nt = tg.size(), nx = a.values.size();
  spectral::Spectral spec(a.grid);
  const cplx im(0.0, 1.0), lam = p.lambda();

  auto i_laplacian = [&](const SpaceTimeField& f) {
    SpaceTimeField out(nt, nx);
    for (std::size_t it = 0; it < nt; ++it) {
      const auto lap = spec.laplacian(f.row(it));
      auto dst = out.row(it);
      for (std::size_t ix = 0; ix < nx; ++ix) dst[ix] = im * lap[ix];
    }
    return out;
  };

  const std::size_t levels = static_cast<std::size_t>(sp.big_j) + 1;
  b.u.reserve(levels);  // u0 below must stay valid
  b.w.reserve(levels);
  b.err.reserve(levels);
  b.u.push_back(sample_U0(a, tg, p));
  b.w.emplace_back();
  b.err.push_back(i_laplacian(b.u[0]));
  const SpaceTimeField& u0 = b.u[0];
  for (std::int64_t j = 1; j <= sp.big_j; ++j) {
    PhiResult phi = phi_apply(b.err.back(), u0, p, tg);
    const SpaceTimeField& prev = b.u.back();
    SpaceTimeField next(nt, nx);
    SpaceTimeField err = i_laplacian(phi.w);
    for (std::size_t k = 0; k < nt * nx; ++k) {
      const cplx up = prev.data()[k], wj = phi.w.data()[k];
      const cplx un = up + wj;
      next.data()[k] = un;
      err.data()[k] += lam * (model::eval_f(un, p) - model::eval_f(up, p) -
                              model::eval_df(u0.data()[k], wj, p));
    }
    b.w.push_back(std::move(phi.w));
    b.tables.push_back(std::move(phi.tables));
    b.u.push_back(std::move(next));
    b.err.push_back(std::move(err));
  }

  b.correction = SpaceTimeField(nt, nx);
  if (sp.big_j > 0)
    for (std::size_t k = 0; k < nt * nx; ++k) b.correction.data()[k] = b.u.back().data()[k] - u0.data()[k];

  const double radius = opt.analysis_radius > 0.0 ? opt.analysis_radius : 0.5 * a.grid.half_width();
  b.analysis_mask = geometry::region_mask(
      a.grid, geometry::RegionSpec::ball(geometry::Point(static_cast<std::size_t>(p.dim), 0.0), radius));
  b.half_ratio_min.assign(nt, INFINITY);
  b.half_ratio_max.assign(nt, 0.0);
  const SpaceTimeField& uj = b.u.back();
  std::size_t good = 0;
  std::optional<std::size_t> suffix;
  for (std::size_t it = nt; it-- > 0;) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      if (!b.analysis_mask[ix]) continue;
      const double r = std::abs(uj.at(it, ix)) / std::abs(u0.at(it, ix));
      b.half_ratio_min[it] = std::min(b.half_ratio_min[it], r);
      b.half_ratio_max[it] = std::max(b.half_ratio_max[it], r);
    }
    const bool ok = b.half_ratio_min[it] >= 0.5 && b.half_ratio_max[it] <= 2.0;
    if (ok) ++good;
    if (ok && (it == nt - 1 || suffix == it + 1)) suffix = it;
  }
  if (good == 0)
    fail(ErrorCode::HalfBoundViolated, "1/2 |U0| <= |U_J| <= 2 |U0| fails at every time node");
  if (suffix) b.trusted_from = tg.nodes[*suffix];
  return b;
}

ComplexField eval_UJ(const AnsatzBundle& b, double t) {
  const auto& nodes = b.tg.nodes;
  if (!(t >= nodes.front() && t <= nodes.back()))
    fail(ErrorCode::OutOfWindow, "t = " + std::to_string(t) + " is outside the bundle time grid");
  const auto it = std::lower_bound(nodes.begin(), nodes.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - nodes.begin());
  if (*it == t) {
    const auto row = b.u.back().row(i);
    return {row.begin(), row.end()};
  }
  ComplexField out = eval_U0(b.a, t, b.model);
  if (b.big_j() == 0) return out;
  const double l0 = std::log(-nodes[i - 1]), l1 = std::log(-nodes[i]);
  const double wgt = (std::log(-t) - l0) / (l1 - l0);
  const auto c0 = b.correction.row(i - 1), c1 = b.correction.row(i);
  for (std::size_t ix = 0; ix < out.size(); ++ix) out[ix] += (1.0 - wgt) * c0[ix] + wgt * c1[ix];
  return out;
}

HomogeneousResidual verify_homogeneous_solutions(const SpaceTimeField& u0, const model::ModelParams& p,
                                                 const TimeGrid& tg) {
  const std::size_t nt = tg.size(), nx = u0.node_count();
  const cplx im(0.0, 1.0), lam = p.lambda();
  auto residual = [&](auto&& make_w) {
    SpaceTimeField w(nt, nx);
    for (std::size_t k = 0; k < nt * nx; ++k) w.data()[k] = make_w(u0.data()[k]);
    double num = 0.0, den = 0.0;
    for (std::size_t it = 1; it + 1 < nt; ++it) {
      const double ta = std::log(-tg.nodes[it - 1]), tb = std::log(-tg.nodes[it]),
                   tc = std::log(-tg.nodes[it + 1]);
      const double ha = tb - ta, hc = tc - tb;
      // three-point derivative on a nonuniform grid, then d/dt = (1/t) d/dtau
      const double ca = -hc / (ha * (ha + hc)), cb = (hc - ha) / (ha * hc), cc = ha / (hc * (ha + hc));
      for (std::size_t ix = 0; ix < nx; ++ix) {
        const cplx dw = (ca * w.at(it - 1, ix) + cb * w.at(it, ix) + cc * w.at(it + 1, ix)) / tg.nodes[it];
        const cplx r = dw - lam * model::eval_df(u0.at(it, ix), w.at(it, ix), p);
        num += std::norm(r);
        den += std::norm(dw);
      }
    }
    return std::sqrt(num / den);
  };
  HomogeneousResidual out;
  out.i_u0 = residual([&](cplx u) { return im * u; });
  out.lambda_f = residual([&](cplx u) { return lam * model::eval_f(u, p); });
  out.plain_u0 = residual([](cplx u) { return u; });
  return out;
}

}  // namespace nlslab::ansatz
