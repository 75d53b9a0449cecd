#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "geometry.hpp"
#include "model.hpp"

namespace nlslab::ansatz {

/// Geometric time nodes t_0 = t_start < ... < t_{n-1} = t_end < 0.
struct TimeGrid {
  double t_start = -1.0;
  double t_end = -1e-4;
  std::vector<double> nodes;

  /// Throws InvalidArgument unless t_start < t_end <= -1e-6 and count >= 32.
  static TimeGrid geometric(double t_start, double t_end, std::size_t count);
  std::size_t size() const { return nodes.size(); }
  /// |t_{i+1}| / |t_i|
  double ratio() const;
};

/// One ComplexField per time node, stored contiguously.
class SpaceTimeField {
 public:
  SpaceTimeField() = default;
  SpaceTimeField(std::size_t nt, std::size_t nx) : nt_(nt), nx_(nx), data_(nt * nx) {}

  std::size_t time_count() const { return nt_; }
  std::size_t node_count() const { return nx_; }
  std::span<cplx> row(std::size_t it) { return {data_.data() + it * nx_, nx_}; }
  std::span<const cplx> row(std::size_t it) const { return {data_.data() + it * nx_, nx_}; }
  cplx& at(std::size_t it, std::size_t ix) { return data_[it * nx_ + ix]; }
  cplx at(std::size_t it, std::size_t ix) const { return data_[it * nx_ + ix]; }
  const ComplexField& data() const { return data_; }
  ComplexField& data() { return data_; }
  bool empty() const { return data_.empty(); }

 private:
  std::size_t nt_ = 0, nx_ = 0;
  ComplexField data_;
};

/// U_0 = W^(-1/alpha - i lambda2/alpha), W = -alpha t + A.
ComplexField eval_U0(const geometry::AField& a, double t, const model::ModelParams& p);
/// Closed-form time derivative lambda W^(-1/alpha - 1 - i lambda2/alpha).
ComplexField eval_dt_U0(const geometry::AField& a, double t, const model::ModelParams& p);
SpaceTimeField sample_U0(const geometry::AField& a, const TimeGrid& tg, const model::ModelParams& p);

ComplexField spectral_laplacian(std::span<const cplx> field, const geometry::Grid& grid);

struct PhiTables {
  RealField i1, i2, i3;          // cumulative integrals from 0 to t, per (time, node)
  std::array<double, 3> tail_p;  // fitted tail exponents (NaN when the integrand vanishes)
};

struct PhiResult {
  SpaceTimeField w;
  PhiTables tables;
  double term3_max_abs = 0.0;
};

/// Solution of dw/dt = lambda df(U0) w + G vanishing at t = 0.
/// Throws NonIntegrableTail if an integrand does not decay toward t = 0.
PhiResult phi_apply(const SpaceTimeField& g, const SpaceTimeField& u0, const model::ModelParams& p,
                    const TimeGrid& tg);

struct AnsatzBundle {
  geometry::AField a;
  model::ModelParams model;
  model::SchemeParams scheme;
  TimeGrid tg;
  /// Levels j = 0..J. w[0] is empty; u[0] is U_0.
  std::vector<SpaceTimeField> w, u, err;
  std::vector<PhiTables> tables;
  /// Sum of w_j, stored for interpolation.
  SpaceTimeField correction;
  std::vector<std::uint8_t> analysis_mask;
  /// Per time node: min and max of |U_J|/|U_0| over the analysis region.
  std::vector<double> half_ratio_min, half_ratio_max;
  /// Start of the largest suffix of time nodes on which the half-bound holds.
  std::optional<double> trusted_from;

  std::int64_t big_j() const { return static_cast<std::int64_t>(u.size()) - 1; }
};

struct BuildOptions {
  /// Half-bound and ratio maxima are taken over this ball around 0;
  /// radius <= 0 means half the box width.
  double analysis_radius = 0.0;
};

AnsatzBundle build_ansatz(const geometry::AField& a, const model::ModelParams& p,
                          const model::SchemeParams& sp, const TimeGrid& tg,
                          const BuildOptions& opt = {});

/// max over masked nodes of |F| / |U_0| at each time node.
std::vector<double> level_ratio_series(const SpaceTimeField& f, const SpaceTimeField& u0,
                                       std::span<const std::uint8_t> mask);

/// U_J at any t in [t_start, t_end]. Stored nodes are returned exactly;
/// between nodes U_0 is exact and the correction is linear in ln(-t).
ComplexField eval_UJ(const AnsatzBundle& b, double t);

struct HomogeneousResidual {
  double i_u0 = 0.0;       // w = i U_0
  double lambda_f = 0.0;   // w = lambda f(U_0) = dU_0/dt
  double plain_u0 = 0.0;   // w = U_0, negative control
};

/// Relative discrete-L2 residual of dw/dt - lambda df(U_0) w at interior time
/// nodes, with a centered finite difference in ln(-t).
HomogeneousResidual verify_homogeneous_solutions(const SpaceTimeField& u0, const model::ModelParams& p,
                                                 const TimeGrid& tg);

}  // namespace nlslab::ansatz
