#include "model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace nlslab {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::InvalidOverride: return "InvalidOverride";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::NonIntegrableTail: return "NonIntegrableTail";
    case ErrorCode::HalfBoundViolated: return "HalfBoundViolated";
    case ErrorCode::OutOfWindow: return "OutOfWindow";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::NonPositiveValue: return "NonPositiveValue";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

namespace model {

void ModelParams::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    fail(ErrorCode::InvalidArgument, "alpha must be a finite positive real");
  if (!std::isfinite(lambda2))
    fail(ErrorCode::InvalidArgument, "lambda2 must be finite");
  if (dim < 1) fail(ErrorCode::InvalidArgument, "dim must be >= 1");
}

double ModelParams::lambda_abs() const { return std::hypot(1.0, lambda2); }

cplx eval_f(cplx u, const ModelParams& p) {
  const double r = std::abs(u);
  if (r == 0.0) return {0.0, 0.0};
  return std::pow(r, p.alpha) * u;
}

cplx eval_df(cplx u, cplx v, const ModelParams& p) {
  const double r = std::abs(u);
  if (r == 0.0) {
    if (p.alpha < 1.0)
      fail(ErrorCode::DegenerateInput, "df(0) is undefined for alpha < 1");
    return {0.0, 0.0};
  }
  const double ra = std::pow(r, p.alpha);
  // |u|^(alpha-2) u^2 = |u|^alpha * (u/|u|)^2
  const cplx phase = u / r;
  return 0.5 * (p.alpha + 2.0) * ra * v + 0.5 * p.alpha * ra * phase * phase * std::conj(v);
}

namespace {

// df(u) v = a v + b conj(v) with a real.
struct DfCoefficients {
  double a;
  cplx b;
};

DfCoefficients df_coefficients(cplx u, const ModelParams& p) {
  const double r = std::abs(u);
  if (r == 0.0) return {0.0, {0.0, 0.0}};
  const double ra = std::pow(r, p.alpha);
  const cplx phase = u / r;
  return {0.5 * (p.alpha + 2.0) * ra, 0.5 * p.alpha * ra * phase * phase};
}

}  // namespace

double df_norm(cplx u, const ModelParams& p) {
  const auto c = df_coefficients(u, p);
  return std::abs(c.a) + std::abs(c.b);
}

double df_diff_norm(cplx a, cplx b, const ModelParams& p) {
  const auto ca = df_coefficients(a, p);
  const auto cb = df_coefficients(b, p);
  return std::abs(ca.a - cb.a) + std::abs(ca.b - cb.b);
}

cplx ode_flow(cplx u0, double dt, const ModelParams& p) {
  if (!(dt >= 0.0)) fail(ErrorCode::InvalidArgument, "ode_flow needs dt >= 0");
  const double r = std::abs(u0);
  if (r == 0.0) return {0.0, 0.0};
  const double q = 1.0 - p.alpha * dt * std::pow(r, p.alpha);
  if (!(q > 0.0)) {
    std::ostringstream os;
    os << "ode_flow step dt=" << dt << " reaches the ODE blow-up time "
       << std::pow(r, -p.alpha) / p.alpha;
    fail(ErrorCode::StepTooLarge, os.str());
  }
  // q^(-1/alpha - i lambda2/alpha)
  const double lq = std::log(q);
  const double mod = std::exp(-lq / p.alpha);
  const double arg = -p.lambda2 * lq / p.alpha;
  return u0 * cplx(mod * std::cos(arg), mod * std::sin(arg));
}

double csu_ratio(cplx u, cplx v, const ModelParams& p) {
  const double a = p.alpha;
  const double ru = std::abs(u);
  const double rv = std::abs(v);
  const double ua = std::pow(ru, a);
  const double va = std::pow(rv, a);
  const double ca = p.c_alpha();
  double best = 0.0;
  auto take = [&](double num, double den) {
    if (den > 0.0 && std::isfinite(num) && std::isfinite(den)) best = std::max(best, num / den);
  };
  take(df_norm(u, p), ua);
  take(std::abs(eval_f(u + v, p) - eval_f(u, p)), (ua + va) * rv);
  const double ddf = df_diff_norm(u + v, u, p);
  const double um1 = ru > 0.0 ? std::pow(ru, a - 1.0) : 0.0;
  take(ddf, va + ca * um1 * rv);
  take(ddf, ua + va);
  if (ru > 0.0 || a >= 1.0) {
    const cplx rem = eval_f(u + v, p) - eval_f(u, p) - eval_df(u, v, p);
    take(std::abs(rem), std::pow(rv, a + 1.0) + ca * um1 * rv * rv);
  }
  return best;
}

double estimate_csu(const ModelParams& p, std::int64_t samples, std::uint64_t seed) {
  p.validate();
  if (samples < 1) fail(ErrorCode::InvalidArgument, "estimate_csu needs samples >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_mod(-3.0, 3.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  double worst = 0.0;
  for (std::int64_t i = 0; i < samples; ++i) {
    // Both sides of every inequality are homogeneous of the same degree, so
    // only the modulus ratio and the two phases matter; |u| is still varied.
    const double lu = log_mod(rng);
    const double lv = log_mod(rng);
    const double pu = phase(rng);
    const double pv = phase(rng);
    const cplx u = std::polar(std::pow(10.0, lu), pu);
    const cplx v = std::polar(std::pow(10.0, lv), pv);
    worst = std::max(worst, csu_ratio(u, v, p));
  }
  return std::max(1.0, 1.05 * worst);
}

void validate_scheme(const ModelParams& p, std::int64_t big_j, std::int64_t k) {
  const double kmin = std::max(6.0, p.dim * p.alpha);
  std::ostringstream os;
  if (!(static_cast<double>(k) > kmin)) {
    os << "k=" << k << " must exceed max(6, N*alpha)=" << kmin;
    fail(ErrorCode::InvalidOverride, os.str());
  }
  if (big_j < 0) fail(ErrorCode::InvalidOverride, "J must be >= 0");
  if (2 * big_j > k - 4) {
    os << "J=" << big_j << " exceeds (k-4)/2 for k=" << k;
    fail(ErrorCode::InvalidOverride, os.str());
  }
}

SchemeParams compute_scheme_params(const ModelParams& p, double csu, SchemeMode mode,
                                   const SchemeOverrides& overrides) {
  p.validate();
  if (!(csu >= 1.0) || !std::isfinite(csu))
    fail(ErrorCode::InvalidArgument, "csu must be a finite real >= 1");
  const double a = p.alpha;
  const double lam = p.lambda_abs();
  const double n = p.dim;

  SchemeParams s;
  s.csu = csu;
  s.mode = mode;
  s.sigma = std::max(std::pow(2.0, a + 1.0) / a * lam * csu,
                     2.0 * a * lam * std::pow(8.0 * csu * lam, a));
  s.theta = std::min({0.5, 2.0 / n, 1.0 / (n * a + 1.0), 1.0 / (3.0 * a * a)});
  const double paper_j = std::floor(2.0 / a + 4.0 * s.sigma) + 1.0;
  const double paper_k =
      std::ceil(std::max({2.0 * paper_j + 4.0, 4.0 / (s.theta * s.sigma), 2.0 * n * a}));

  if (mode == SchemeMode::Paper) {
    if (overrides.big_j || overrides.k)
      fail(ErrorCode::InvalidOverride, "J/k overrides are only accepted in experiment mode");
    if (paper_k > 9.0e18) fail(ErrorCode::InvalidArgument, "paper-mode k overflows int64");
    s.big_j = static_cast<std::int64_t>(paper_j);
    s.k = static_cast<std::int64_t>(paper_k);
  } else {
    if (!overrides.big_j || !overrides.k)
      fail(ErrorCode::InvalidOverride, "experiment mode needs both J and k");
    s.big_j = *overrides.big_j;
    s.k = *overrides.k;
  }
  validate_scheme(p, s.big_j, s.k);
  return s;
}

}  // namespace model
}  // namespace nlslab
