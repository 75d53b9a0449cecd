#pragma once

#include <memory>
#include <span>

#include "grid.hpp"

namespace nlslab::spectral {

/// FFT-backed Fourier multipliers on a periodic Grid.  Owns an FFTW plan and
/// a scratch buffer, so one instance must not be used from two threads at
/// once; construct one per worker instead.
class Spectral {
 public:
  explicit Spectral(const geometry::Grid& grid);
  ~Spectral();
  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;
  Spectral(Spectral&&) noexcept;
  Spectral& operator=(Spectral&&) noexcept;

  const geometry::Grid& grid() const { return grid_; }

  /// Multiplier -|xi|^2.
  ComplexField laplacian(std::span<const cplx> field);
  /// Multiplier i*xi_axis; the Nyquist mode is dropped.
  ComplexField gradient(std::span<const cplx> field, int axis);
  RealField gradient_real(std::span<const double> field, int axis);
  RealField laplacian_real(std::span<const double> field);
  /// Free Schrodinger flow exp(-i|xi|^2 dt) applied in place.
  void propagate(std::span<cplx> field, double dt);
  /// 2/3-rule: zero every mode with |index| > M/3 along any axis.
  void dealias(std::span<cplx> field);
  /// Grid-scaled frequency-space squared L2 norm (Parseval counterpart of
  /// h^N sum |u|^2).
  double spectral_mass(std::span<const cplx> field);

 private:
  template <class Multiplier>
  ComplexField apply(std::span<const cplx> field, Multiplier&& mult);
  template <class Multiplier>
  void apply_in_place(std::span<cplx> field, Multiplier&& mult);

  geometry::Grid grid_;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace nlslab::spectral
