#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace nlslab {

using cplx = std::complex<double>;
using ComplexField = std::vector<cplx>;
using RealField = std::vector<double>;

namespace geometry {

/// Uniform periodic box [-L, L)^N with M nodes per axis, row-major (last axis fastest).
class Grid {
 public:
  /// Throws InvalidGrid unless M is a power of two >= 16, L >= 4 and dim >= 1.
  Grid(int dim, double half_width, int points_per_dim);

  int dim() const { return dim_; }
  double half_width() const { return half_width_; }
  int points_per_dim() const { return m_; }
  double spacing() const { return spacing_; }
  std::size_t node_count() const { return count_; }
  /// Volume element h^N of the Riemann sums.
  double cell_volume() const { return cell_volume_; }

  double axis_coordinate(int j) const { return -half_width_ + j * spacing_; }
  /// Coordinate of node `idx` along `axis`.
  double coordinate(std::size_t idx, int axis) const;
  void coordinates(std::size_t idx, double* out) const;
  double radius(std::size_t idx) const;

  bool operator==(const Grid& o) const {
    return dim_ == o.dim_ && half_width_ == o.half_width_ && m_ == o.m_;
  }

 private:
  int dim_;
  double half_width_;
  int m_;
  double spacing_;
  double cell_volume_;
  std::size_t count_;
};

}  // namespace geometry
}  // namespace nlslab
