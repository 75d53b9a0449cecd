#include "solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nlslab::solver {

void SolverConfig::validate(double t0) const {
  if (!(dt_max > 0.0) || !std::isfinite(dt_max)) fail(ErrorCode::InvalidArgument, "dt_max must be > 0");
  if (!(shrink_factor > 0.0 && shrink_factor <= 1.0))
    fail(ErrorCode::InvalidArgument, "shrink_factor must lie in (0, 1]");
  if (!(substep_safety > 0.0 && substep_safety < 1.0))
    fail(ErrorCode::InvalidArgument, "substep_safety must lie in (0, 1)");
  if (!(t_stop < 0.0)) fail(ErrorCode::InvalidArgument, "t_stop must be negative");
  if (!(t_stop >= t0)) fail(ErrorCode::InvalidArgument, "t_stop must not precede t0");
  if (!(amplitude_limit > 0.0)) fail(ErrorCode::InvalidArgument, "amplitude_limit must be > 0");
  for (double s : snapshot_times)
    if (!(s > t0 && s <= t_stop))
      fail(ErrorCode::InvalidArgument, "snapshot time " + std::to_string(s) + " outside (t0, t_stop]");
}

double mass(std::span<const cplx> u, double cell_volume) {
  double s = 0.0;
  for (cplx v : u) s += std::norm(v);
  return s * cell_volume;
}

double max_amplitude(std::span<const cplx> u) {
  double m = 0.0;
  for (cplx v : u) {
    const double a = std::abs(v);
    if (std::isnan(a)) return a;
    m = std::max(m, a);
  }
  return m;
}

ComplexField linear_step(spectral::Spectral& sp, std::span<const cplx> u, double dt) {
  ComplexField out(u.begin(), u.end());
  sp.propagate(out, dt);
  return out;
}

ComplexField strang_step(spectral::Spectral& sp, std::span<const cplx> u, double dt,
                         const model::ModelParams& p, bool dealias) {
  ComplexField out(u.size());
  const double half = 0.5 * dt;
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = model::ode_flow(u[i], half, p);
  if (dealias) sp.dealias(out);
  sp.propagate(out, dt);
  for (auto& v : out) v = model::ode_flow(v, half, p);
  if (dealias) sp.dealias(out);
  return out;
}

TrajectoryRecord integrate(spectral::Spectral& sp, std::span<const cplx> init, double t0,
                           const SolverConfig& cfg, const model::ModelParams& p) {
  p.validate();
  cfg.validate(t0);
  if (init.size() != sp.grid().node_count())
    fail(ErrorCode::InvalidArgument, "initial field does not match the grid");
  for (cplx v : init)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      fail(ErrorCode::InvalidArgument, "initial field is not finite");

  std::vector<double> targets(cfg.snapshot_times);
  targets.push_back(cfg.t_stop);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  auto rec = std::make_shared<TrajectoryRecord>();
  rec->t0 = t0;
  ComplexField u(init.begin(), init.end());
  rec->snapshots.push_back({t0, u});
  const double vol = sp.grid().cell_volume();
  double t = t0;
  std::size_t next = 0;
  if (targets.front() == t0) ++next;  // t_stop == t0
  while (next < targets.size()) {
    const double target = targets[next];
    const double amax = max_amplitude(u);
    double dt = std::min(cfg.dt_max, cfg.shrink_factor * (-t));
    if (amax > 0.0) dt = std::min(dt, cfg.substep_safety * std::pow(amax, -p.alpha) / p.alpha);
    bool lands = false;
    if (dt >= target - t) {
      dt = target - t;
      lands = true;
    }
    ComplexField un;
    try {
      un = strang_step(sp, u, dt, p, cfg.dealias);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::StepTooLarge) throw;
      throw DivergedError("nonlinear substep blew up at t = " + std::to_string(t), t, rec);
    }
    const double an = max_amplitude(un);
    if (!std::isfinite(an) || an > cfg.amplitude_limit) {
      std::ostringstream os;
      os.precision(17);
      os << "max amplitude " << an << " after step from t = " << t;
      throw DivergedError(os.str(), t, rec);
    }
    u = std::move(un);
    t = lands ? target : t + dt;
    rec->steps.push_back({t, dt, mass(u, vol), an});
    if (lands) {
      rec->snapshots.push_back({t, u});
      ++next;
    }
  }
  return std::move(*rec);
}

}  // namespace nlslab::solver
