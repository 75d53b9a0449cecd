#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ansatz.hpp"
#include "solver.hpp"

namespace nlslab::metrics {

enum class NormKind { L2, Lp, H1, GradL2 };

/// Riemann-sum norm over masked nodes. H1 and GradL2 take the spectral
/// gradient of the whole field and mask it afterwards.
double region_norm(spectral::Spectral& sp, std::span<const cplx> field,
                   std::span<const std::uint8_t> mask, NormKind kind, double p = 2.0);

/// E = 1/2 int |grad eps|^2 - lambda2/(alpha+2) int |eps|^(alpha+2)
double energy(spectral::Spectral& sp, std::span<const cplx> eps, const model::ModelParams& p);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double t_lo = 0.0, t_hi = 0.0;
  std::size_t samples = 0;
};

/// Least squares of ln(value) against ln(-t) over samples with t in [t_lo, t_hi].
RateFit fit_rate(std::span<const double> t, std::span<const double> value, double t_lo, double t_hi);

/// [t_a, t_b] with the first `fraction` of its ln(-t) extent removed.
std::pair<double, double> trimmed_window(double t_a, double t_b, double fraction);

struct NormSeries {
  std::string label;
  std::string region;
  std::vector<double> t, value;
};

struct Check {
  std::string name;
  double window_lo = 0.0, window_hi = 0.0;
  double target_lo = 0.0, target_hi = 0.0;
  double fitted = 0.0;
  double r2 = 1.0;
  bool pass = false;
  std::string note;
};

struct RateCheckConfig {
  double slope_tol = 0.05;
  /// Radius of the ball around each x0 in K.
  double local_radius = 0.5;
  /// Region with bounded H1 norm; defaults to {|x| > 1}.
  std::optional<geometry::RegionSpec> exterior;
  double bounded_ratio = 3.0;
  /// Region where the gradient norm must grow; defaults to {|x| < 1}.
  std::optional<geometry::RegionSpec> gradient_region;
  double growth_ratio = 10.0;
  double exclude_fraction = 0.1;
};

struct CheckSet {
  std::vector<Check> checks;
  std::vector<NormSeries> series;
  bool all_pass() const;
};

/// Verdicts on the local L2 rate at each anchor of K, H1 boundedness away
/// from K and gradient growth near K.
CheckSet check_blowup_rates(const solver::TrajectoryRecord& traj, const ansatz::AnsatzBundle& b,
                            const RateCheckConfig& cfg = {});

struct EpsilonConfig {
  double relative_threshold = 0.01;
  double exclude_fraction = 0.1;
};

struct EpsilonSummary {
  std::vector<double> t, l2, grad_l2, relative, energy;
  double sup_relative = 0.0;
  double initial_l2 = 0.0;
  RateFit slope_fit;
};

struct EpsilonResult {
  CheckSet set;
  EpsilonSummary summary;
};

/// eps = u - U_J at every snapshot.
EpsilonResult check_epsilon(const solver::TrajectoryRecord& traj, const ansatz::AnsatzBundle& b,
                            const EpsilonConfig& cfg = {});

struct GnReport {
  double theta = 0.0;                    // N alpha / (4 (alpha + 1))
  double exp_lower = 0.0, exp_grad = 0.0;  // exponents on int|u|^(a+2) and int|u|^a|grad u|^2
  std::vector<double> widths, ratios;
  double unit_ratio = 0.0;
  double spread = 0.0;                   // max/min over the family
};

/// int |u|^(2a+2) / ((int |u|^(a+2))^e1 (int |u|^a |grad u|^2)^e2) on Gaussians
/// exp(-|x|^2 / (2 w^2)).
GnReport gn_diagnostic(spectral::Spectral& sp, std::span<const double> widths, const model::ModelParams& p);

}  // namespace nlslab::metrics

namespace nlslab::metrics {

/// Everything report.json and norms.csv are written from.
struct RunReport {
  model::ModelParams model;
  model::SchemeParams scheme;
  std::string k_set;
  std::optional<double> trusted_from;
  std::vector<Check> checks;
  EpsilonSummary epsilon;
  std::vector<NormSeries> norms;

  bool all_pass() const;
};

}  // namespace nlslab::metrics
