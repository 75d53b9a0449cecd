#include "spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>

#include "error.hpp"

namespace nlslab {
namespace geometry {

Grid::Grid(int dim, double half_width, int points_per_dim)
    : dim_(dim), half_width_(half_width), m_(points_per_dim) {
  if (dim < 1) fail(ErrorCode::InvalidGrid, "grid dim must be >= 1");
  if (points_per_dim < 16 || (points_per_dim & (points_per_dim - 1)) != 0)
    fail(ErrorCode::InvalidGrid, "points_per_dim must be a power of two >= 16");
  if (!(half_width >= 4.0) || !std::isfinite(half_width))
    fail(ErrorCode::InvalidGrid, "half_width must be >= 4");
  spacing_ = 2.0 * half_width / points_per_dim;
  cell_volume_ = std::pow(spacing_, dim);
  count_ = 1;
  for (int d = 0; d < dim; ++d) count_ *= static_cast<std::size_t>(points_per_dim);
}

double Grid::coordinate(std::size_t idx, int axis) const {
  std::size_t stride = 1;
  for (int d = dim_ - 1; d > axis; --d) stride *= static_cast<std::size_t>(m_);
  return axis_coordinate(static_cast<int>((idx / stride) % static_cast<std::size_t>(m_)));
}

void Grid::coordinates(std::size_t idx, double* out) const {
  for (int d = dim_ - 1; d >= 0; --d) {
    out[d] = axis_coordinate(static_cast<int>(idx % static_cast<std::size_t>(m_)));
    idx /= static_cast<std::size_t>(m_);
  }
}

double Grid::radius(std::size_t idx) const {
  if (dim_ == 1) return std::abs(coordinate(idx, 0));
  double s = 0.0;
  for (int d = dim_ - 1; d >= 0; --d) {
    const double x = axis_coordinate(static_cast<int>(idx % static_cast<std::size_t>(m_)));
    s += x * x;
    idx /= static_cast<std::size_t>(m_);
  }
  return std::sqrt(s);
}

}  // namespace geometry

namespace spectral {
namespace {

// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct Spectral::Impl {
  fftw_complex* buffer = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  std::vector<double> wavenumber;  // per axis index, shared by all axes
  std::size_t n = 0;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    if (buffer) fftw_free(buffer);
  }
};

Spectral::Spectral(const geometry::Grid& grid) : grid_(grid), impl_(std::make_unique<Impl>()) {
  const int m = grid.points_per_dim();
  impl_->n = grid.node_count();
  impl_->wavenumber.resize(static_cast<std::size_t>(m));
  const double base = std::numbers::pi / grid.half_width();  // 2 pi / (2L)
  for (int j = 0; j < m; ++j) impl_->wavenumber[j] = base * (j <= m / 2 - 1 ? j : j - m);
  std::vector<int> dims(static_cast<std::size_t>(grid.dim()), m);
  std::lock_guard lock(planner_mutex());
  impl_->buffer = fftw_alloc_complex(impl_->n);
  if (!impl_->buffer) fail(ErrorCode::Internal, "fftw_alloc_complex failed");
  impl_->forward = fftw_plan_dft(grid.dim(), dims.data(), impl_->buffer, impl_->buffer,
                                 FFTW_FORWARD, FFTW_ESTIMATE);
  impl_->backward = fftw_plan_dft(grid.dim(), dims.data(), impl_->buffer, impl_->buffer,
                                  FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!impl_->forward || !impl_->backward) fail(ErrorCode::Internal, "fftw planning failed");
}

Spectral::~Spectral() = default;
Spectral::Spectral(Spectral&&) noexcept = default;
Spectral& Spectral::operator=(Spectral&&) noexcept = default;

// Calls mult(linear_index, per-axis mode indices, value&) on every mode.
template <class Multiplier>
void Spectral::apply_in_place(std::span<cplx> field, Multiplier&& mult) {
  const std::size_t n = impl_->n;
  if (field.size() != n) fail(ErrorCode::InvalidArgument, "field size does not match grid");
  auto* buf = reinterpret_cast<cplx*>(impl_->buffer);
  std::copy(field.begin(), field.end(), buf);
  fftw_execute(impl_->forward);
  const int m = grid_.points_per_dim();
  const int dim = grid_.dim();
  int modes[8] = {0};
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rest = i;
    for (int d = dim - 1; d >= 0; --d) {
      modes[d] = static_cast<int>(rest % static_cast<std::size_t>(m));
      rest /= static_cast<std::size_t>(m);
    }
    buf[i] *= inv_n;
    mult(modes, buf[i]);
  }
  fftw_execute(impl_->backward);
  std::copy(buf, buf + n, field.begin());
}

template <class Multiplier>
ComplexField Spectral::apply(std::span<const cplx> field, Multiplier&& mult) {
  ComplexField out(field.begin(), field.end());
  apply_in_place(out, std::forward<Multiplier>(mult));
  return out;
}

ComplexField Spectral::laplacian(std::span<const cplx> field) {
  const auto& kx = impl_->wavenumber;
  const int dim = grid_.dim();
  return apply(field, [&](const int* modes, cplx& v) {
    double k2 = 0.0;
    for (int d = 0; d < dim; ++d) k2 += kx[modes[d]] * kx[modes[d]];
    v *= -k2;
  });
}

ComplexField Spectral::gradient(std::span<const cplx> field, int axis) {
  if (axis < 0 || axis >= grid_.dim()) fail(ErrorCode::InvalidArgument, "gradient axis out of range");
  const auto& kx = impl_->wavenumber;
  const int nyquist = grid_.points_per_dim() / 2;
  return apply(field, [&](const int* modes, cplx& v) {
    const int j = modes[axis];
    v = (j == nyquist) ? cplx{0.0, 0.0} : v * cplx(0.0, kx[j]);
  });
}

RealField Spectral::gradient_real(std::span<const double> field, int axis) {
  ComplexField c(field.begin(), field.end());
  const auto g = gradient(c, axis);
  RealField out(g.size());
  std::transform(g.begin(), g.end(), out.begin(), [](cplx z) { return z.real(); });
  return out;
}

RealField Spectral::laplacian_real(std::span<const double> field) {
  ComplexField c(field.begin(), field.end());
  const auto g = laplacian(c);
  RealField out(g.size());
  std::transform(g.begin(), g.end(), out.begin(), [](cplx z) { return z.real(); });
  return out;
}

void Spectral::propagate(std::span<cplx> field, double dt) {
  if (dt == 0.0) return;
  const auto& kx = impl_->wavenumber;
  const int dim = grid_.dim();
  apply_in_place(field, [&](const int* modes, cplx& v) {
    double k2 = 0.0;
    for (int d = 0; d < dim; ++d) k2 += kx[modes[d]] * kx[modes[d]];
    const double ph = -k2 * dt;
    v *= cplx(std::cos(ph), std::sin(ph));
  });
}

void Spectral::dealias(std::span<cplx> field) {
  const int m = grid_.points_per_dim();
  const int dim = grid_.dim();
  const int cut = m / 3;
  apply_in_place(field, [&](const int* modes, cplx& v) {
    for (int d = 0; d < dim; ++d) {
      const int j = modes[d] < m / 2 ? modes[d] : m - modes[d];
      if (j > cut) {
        v = 0.0;
        return;
      }
    }
  });
}

double Spectral::spectral_mass(std::span<const cplx> field) {
  const std::size_t n = impl_->n;
  if (field.size() != n) fail(ErrorCode::InvalidArgument, "field size does not match grid");
  auto* buf = reinterpret_cast<cplx*>(impl_->buffer);
  std::copy(field.begin(), field.end(), buf);
  fftw_execute(impl_->forward);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::norm(buf[i]);
  // sum |u|^2 = (1/n) sum |U|^2
  return s / static_cast<double>(n) * grid_.cell_volume();
}

}  // namespace spectral
}  // namespace nlslab
