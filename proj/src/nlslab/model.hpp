#pragma once

#include <complex>
#include <cstdint>
#include <optional>

#include "error.hpp"

namespace nlslab {

using cplx = std::complex<double>;

namespace model {

/// Parameters of du/dt = i Lap u + lambda |u|^alpha u with lambda = 1 + i*lambda2.
struct ModelParams {
  double alpha = 2.0;
  double lambda2 = 0.0;
  int dim = 1;

  /// Throws InvalidArgument unless alpha > 0, dim >= 1 and both reals are finite.
  void validate() const;
  cplx lambda() const { return {1.0, lambda2}; }
  double lambda_abs() const;
  /// (N - 2) alpha < 4. Exposed as a flag only; nothing refuses to run on it.
  bool h1_subcritical() const { return (dim - 2) * alpha < 4.0; }
  /// 0 for alpha <= 1, 1 otherwise.
  double c_alpha() const { return alpha <= 1.0 ? 0.0 : 1.0; }
};

enum class SchemeMode { Paper, Experiment };

struct SchemeParams {
  double csu = 1.0;
  double sigma = 0.0;
  double theta = 0.0;
  std::int64_t big_j = 0;
  std::int64_t k = 0;
  SchemeMode mode = SchemeMode::Paper;
};

struct SchemeOverrides {
  std::optional<std::int64_t> big_j;
  std::optional<std::int64_t> k;
};

cplx eval_f(cplx u, const ModelParams& p);

/// Real derivative of f at u applied to v:
/// ((alpha+2)/2)|u|^alpha v + (alpha/2)|u|^(alpha-2) u^2 conj(v).
/// At u = 0 the value is 0 for alpha >= 1; alpha < 1 throws DegenerateInput.
cplx eval_df(cplx u, cplx v, const ModelParams& p);

/// Operator norm of the real-linear map v -> df(u)v, i.e. (alpha+1)|u|^alpha.
double df_norm(cplx u, const ModelParams& p);

/// Operator norm of v -> df(a)v - df(b)v.
double df_diff_norm(cplx a, cplx b, const ModelParams& p);

/// Exact flow of u' = lambda |u|^alpha u over a step dt >= 0.
/// Throws StepTooLarge if dt reaches the ODE blow-up time |u0|^-alpha / alpha.
cplx ode_flow(cplx u0, double dt, const ModelParams& p);

/// Largest ratio |lhs|/rhs over the five Taylor-type inequalities for one (u, v).
double csu_ratio(cplx u, cplx v, const ModelParams& p);

/// Randomized lower estimate of the universal Taylor constant, times 1.05 and
/// floored at 1. The i-th sample depends only on (seed, i), so a longer run
/// with the same seed sees a superset of pairs.
double estimate_csu(const ModelParams& p, std::int64_t samples, std::uint64_t seed);

SchemeParams compute_scheme_params(const ModelParams& p, double csu, SchemeMode mode,
                                   const SchemeOverrides& overrides = {});

/// Throws InvalidOverride if k <= max(6, N alpha), J < 0 or 2J > k - 4.
void validate_scheme(const ModelParams& p, std::int64_t big_j, std::int64_t k);

}  // namespace model
}  // namespace nlslab
