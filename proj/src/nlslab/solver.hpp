#pragma once

#include <memory>
#include <span>
#include <vector>

#include "error.hpp"
#include "model.hpp"
#include "spectral.hpp"

namespace nlslab::solver {

struct SolverConfig {
  double dt_max = 1e-3;
  /// dt <= shrink_factor * (-t)
  double shrink_factor = 0.05;
  /// dt <= substep_safety * max|u|^(-alpha) / alpha
  double substep_safety = 0.2;
  double t_stop = -0.02;
  std::vector<double> snapshot_times;
  bool dealias = false;
  double amplitude_limit = 1e12;

  /// Throws InvalidArgument on out-of-range entries or snapshots outside (t0, t_stop].
  void validate(double t0) const;
};

struct StepDiagnostics {
  double t;  // time after the step
  double dt;
  double mass;
  double max_amplitude;
};

struct Snapshot {
  double t;
  ComplexField u;
};

struct TrajectoryRecord {
  double t0 = 0.0;
  std::vector<Snapshot> snapshots;
  std::vector<StepDiagnostics> steps;
};

/// Carries the record up to the last finite step.
class DivergedError : public Error {
 public:
  DivergedError(const std::string& what, double last_good_t, std::shared_ptr<TrajectoryRecord> partial)
      : Error(ErrorCode::Diverged, what), last_good_t_(last_good_t), partial_(std::move(partial)) {}
  double last_good_t() const { return last_good_t_; }
  const TrajectoryRecord& partial() const { return *partial_; }

 private:
  double last_good_t_;
  std::shared_ptr<TrajectoryRecord> partial_;
};

/// Discrete mass h^N sum |u|^2.
double mass(std::span<const cplx> u, double cell_volume);
double max_amplitude(std::span<const cplx> u);

/// exp(-i |xi|^2 dt) in Fourier space.
ComplexField linear_step(spectral::Spectral& sp, std::span<const cplx> u, double dt);

/// Half exact nonlinear flow, full linear step, half nonlinear flow.
/// Throws StepTooLarge if dt/2 reaches the pointwise ODE blow-up time.
ComplexField strang_step(spectral::Spectral& sp, std::span<const cplx> u, double dt,
                         const model::ModelParams& p, bool dealias = false);

/// Split-step integration from (t0, init) to cfg.t_stop, landing exactly on
/// every snapshot time. t0 and t_stop are always recorded.
TrajectoryRecord integrate(spectral::Spectral& sp, std::span<const cplx> init, double t0,
                           const SolverConfig& cfg, const model::ModelParams& p);

}  // namespace nlslab::solver
