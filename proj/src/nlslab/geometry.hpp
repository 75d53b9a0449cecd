#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "grid.hpp"

namespace nlslab::geometry {

/// Smooth cutoff: 1 on s <= 1, 0 on s >= 2, monotone in between.
double chi(double s);
/// chi together with its first two derivatives.
struct ChiJet {
  double v, d1, d2;
};
ChiJet chi_jet(double s);

using Point = std::vector<double>;

/// How Z vanishes on K. Distance: like dist(x, K). Squared: like dist(x, K)^2.
enum class ZForm { Distance, Squared };

/// Description of the blow-up set K, contained in the closed unit ball.
struct CompactSetSpec {
  enum class Kind { Points, Sphere, UserField };

  Kind kind = Kind::Points;
  ZForm z_form = ZForm::Distance;
  std::vector<Point> points;
  Point center;
  double radius = 0.0;
  // UserField: Z sampled on its own grid (must match the build grid).
  std::optional<Grid> user_grid;
  RealField user_z;

  static CompactSetSpec make_points(std::vector<Point> pts, ZForm form = ZForm::Distance);
  /// {-a e_1, +a e_1} in dimension dim.
  static CompactSetSpec make_two_points(double a, int dim, ZForm form = ZForm::Distance);
  static CompactSetSpec make_sphere(Point center, double radius, ZForm form = ZForm::Distance);
  static CompactSetSpec make_user_field(const Grid& grid, RealField z);

  /// Throws InvalidSpec if empty, outside the unit ball, dimension-mismatched,
  /// or (user field) negative, non-finite or without zeros.
  void validate(int dim) const;
  std::string describe() const;
};

/// Euclidean distance from x to K. User fields use their zero nodes.
double distance_to_set(const CompactSetSpec& spec, const double* x, int dim);

/// Points x_0 in K used for local checks: the points themselves, the 2N
/// axis poles of a sphere, or the zero nodes of a user field.
std::vector<Point> anchor_points(const CompactSetSpec& spec);

/// Node values of Z.
RealField build_Z(const CompactSetSpec& spec, const Grid& grid);

struct AField {
  Grid grid;
  CompactSetSpec spec;
  std::int64_t k = 0;
  RealField z;
  RealField values;
  /// Flattened node-major gradient: grad[node * dim + axis].
  RealField grad;
  RealField laplacian;
  std::vector<std::uint8_t> k_node;
  /// sup over A > 0 of |grad A| / A^(1-1/k) and |Lap A| / A^(1-2/k).
  double bound_grad = 0.0;
  double bound_lap = 0.0;
  std::size_t k_node_count = 0;
};

/// A = (Z chi(|x|) + (1 - chi(|x|)) |x|)^k with gradient and Laplacian.
/// Nodes within spacing/2 of K are set to A = 0 with zero derivatives.
AField build_A(const CompactSetSpec& spec, std::int64_t k, const Grid& grid);

struct RegionSpec {
  enum class Kind { Whole, Ball, OutsideBall, ComplementOfNeighborhood, Union };

  Kind kind = Kind::Whole;
  Point center;
  double radius = 0.0;
  std::shared_ptr<const CompactSetSpec> set;
  std::vector<RegionSpec> parts;

  static RegionSpec whole();
  static RegionSpec ball(Point center, double radius);
  static RegionSpec outside_ball(Point center, double radius);
  /// {x : dist(x, K) > delta}
  static RegionSpec complement_of_neighborhood(const CompactSetSpec& k_set, double delta);
  static RegionSpec union_of(std::vector<RegionSpec> parts);

  bool contains(const double* x, int dim) const;
  std::string label() const;
};

/// Per-node membership. Throws EmptyRegion when no node is inside.
std::vector<std::uint8_t> region_mask(const Grid& grid, const RegionSpec& region);

}  // namespace nlslab::geometry
