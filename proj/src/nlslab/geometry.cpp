#include "geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "error.hpp"
#include "spectral.hpp"

namespace nlslab::geometry {
namespace {

// g(t) = exp(-1/t) for t > 0 and its first two derivatives.
struct Bump {
  double v, d1, d2;
};

Bump bump(double t) {
  if (t <= 0.0) return {0.0, 0.0, 0.0};
  const double v = std::exp(-1.0 / t);
  const double t2 = t * t;
  return {v, v / t2, v * (1.0 / (t2 * t2) - 2.0 / (t2 * t))};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_point(const Point& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + fmt(p[i]);
  return s + ")";
}

double norm_of(const double* x, int dim) {
  if (dim == 1) return std::abs(x[0]);
  double s = 0.0;
  for (int d = 0; d < dim; ++d) s += x[d] * x[d];
  return std::sqrt(s);
}

double dist(const double* x, const Point& p, int dim) {
  if (dim == 1) return std::abs(x[0] - p[0]);
  double s = 0.0;
  for (int d = 0; d < dim; ++d) s += (x[d] - p[d]) * (x[d] - p[d]);
  return std::sqrt(s);
}

// Value, gradient and Laplacian of a scalar at one node.
struct Jet {
  double v = 0.0;
  double g[8] = {0};
  double lap = 0.0;
};

// Product rule over factors: Lap prod q_i = sum_i Lap q_i prod_{j!=i} q_j
//   + sum_{i!=j} grad q_i . grad q_j prod_{l!=i,j} q_l.
Jet product(const std::vector<Jet>& f, int dim) {
  const std::size_t n = f.size();
  Jet out;
  out.v = 1.0;
  for (const auto& q : f) out.v *= q.v;
  for (std::size_t i = 0; i < n; ++i) {
    double rest = 1.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) rest *= f[j].v;
    for (int d = 0; d < dim; ++d) out.g[d] += f[i].g[d] * rest;
    out.lap += f[i].lap * rest;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double rest2 = 1.0;
      for (std::size_t l = 0; l < n; ++l)
        if (l != i && l != j) rest2 *= f[l].v;
      double dot = 0.0;
      for (int d = 0; d < dim; ++d) dot += f[i].g[d] * f[j].g[d];
      out.lap += dot * rest2;
    }
  }
  return out;
}

// Closed-form Z at x (never called on K itself for the Distance form).
Jet z_jet(const CompactSetSpec& spec, const double* x, int dim) {
  if (spec.kind == CompactSetSpec::Kind::Points) {
    std::vector<Jet> factors;
    factors.reserve(spec.points.size());
    for (const auto& p : spec.points) {
      Jet q;
      const double r = dist(x, p, dim);
      if (spec.z_form == ZForm::Squared) {
        q.v = r * r;
        for (int d = 0; d < dim; ++d) q.g[d] = 2.0 * (x[d] - p[d]);
        q.lap = 2.0 * dim;
      } else {
        q.v = r;
        if (r > 0.0) {
          for (int d = 0; d < dim; ++d) q.g[d] = (x[d] - p[d]) / r;
          q.lap = (dim - 1) / r;
        }
      }
      factors.push_back(q);
    }
    return product(factors, dim);
  }
  // sphere: s = |x - c|^2 - r^2
  double rho2 = 0.0;
  for (int d = 0; d < dim; ++d) rho2 += (x[d] - spec.center[d]) * (x[d] - spec.center[d]);
  const double s = rho2 - spec.radius * spec.radius;
  Jet q;
  if (spec.z_form == ZForm::Squared) {
    q.v = s * s;
    for (int d = 0; d < dim; ++d) q.g[d] = 4.0 * s * (x[d] - spec.center[d]);
    q.lap = 8.0 * rho2 + 4.0 * dim * s;
  } else {
    const double sg = s > 0.0 ? 1.0 : (s < 0.0 ? -1.0 : 0.0);
    q.v = std::abs(s);
    for (int d = 0; d < dim; ++d) q.g[d] = sg * 2.0 * (x[d] - spec.center[d]);
    q.lap = sg * 2.0 * dim;
  }
  return q;
}

std::vector<Point> user_zero_points(const CompactSetSpec& spec) {
  std::vector<Point> out;
  const Grid& g = *spec.user_grid;
  for (std::size_t i = 0; i < spec.user_z.size(); ++i) {
    if (spec.user_z[i] != 0.0) continue;
    Point p(static_cast<std::size_t>(g.dim()));
    g.coordinates(i, p.data());
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

ChiJet chi_jet(double s) {
  if (s <= 1.0) return {1.0, 0.0, 0.0};
  if (s >= 2.0) return {0.0, 0.0, 0.0};
  const Bump ga = bump(2.0 - s);
  const Bump gb = bump(s - 1.0);
  const double a = ga.v, a1 = -ga.d1, a2 = ga.d2;
  const double b = gb.v, b1 = gb.d1, b2 = gb.d2;
  const double den = a + b;
  const double num1 = a1 * b - a * b1;
  const double num1p = a2 * b - a * b2;
  const double d1 = num1 / (den * den);
  const double d2 = num1p / (den * den) - 2.0 * num1 * (a1 + b1) / (den * den * den);
  return {a / den, d1, d2};
}

double chi(double s) { return chi_jet(s).v; }

CompactSetSpec CompactSetSpec::make_points(std::vector<Point> pts, ZForm form) {
  CompactSetSpec s;
  s.kind = Kind::Points;
  s.z_form = form;
  s.points = std::move(pts);
  return s;
}

CompactSetSpec CompactSetSpec::make_two_points(double a, int dim, ZForm form) {
  Point lo(static_cast<std::size_t>(dim), 0.0), hi(static_cast<std::size_t>(dim), 0.0);
  lo[0] = -a;
  hi[0] = a;
  return make_points({lo, hi}, form);
}

CompactSetSpec CompactSetSpec::make_sphere(Point center, double radius, ZForm form) {
  CompactSetSpec s;
  s.kind = Kind::Sphere;
  s.z_form = form;
  s.center = std::move(center);
  s.radius = radius;
  return s;
}

CompactSetSpec CompactSetSpec::make_user_field(const Grid& grid, RealField z) {
  CompactSetSpec s;
  s.kind = Kind::UserField;
  s.user_grid = grid;
  s.user_z = std::move(z);
  return s;
}

void CompactSetSpec::validate(int dim) const {
  const double tol = 1e-12;
  switch (kind) {
    case Kind::Points:
      if (points.empty()) fail(ErrorCode::InvalidSpec, "point set K is empty");
      for (const auto& p : points) {
        if (static_cast<int>(p.size()) != dim)
          fail(ErrorCode::InvalidSpec, "point " + fmt_point(p) + " has wrong dimension");
        for (double c : p)
          if (!std::isfinite(c)) fail(ErrorCode::InvalidSpec, "non-finite point coordinate");
        if (norm_of(p.data(), dim) > 1.0 + tol)
          fail(ErrorCode::InvalidSpec, "point " + fmt_point(p) + " lies outside the unit ball");
      }
      break;
    case Kind::Sphere:
      if (static_cast<int>(center.size()) != dim)
        fail(ErrorCode::InvalidSpec, "sphere center has wrong dimension");
      if (!(radius > 0.0) || !std::isfinite(radius))
        fail(ErrorCode::InvalidSpec, "sphere radius must be positive");
      if (norm_of(center.data(), dim) + radius > 1.0 + tol)
        fail(ErrorCode::InvalidSpec, "sphere is not contained in the unit ball");
      break;
    case Kind::UserField: {
      if (!user_grid || user_grid->dim() != dim)
        fail(ErrorCode::InvalidSpec, "user Z field has wrong dimension");
      if (user_z.size() != user_grid->node_count())
        fail(ErrorCode::InvalidSpec, "user Z field size does not match its grid");
      std::size_t zeros = 0;
      for (std::size_t i = 0; i < user_z.size(); ++i) {
        const double v = user_z[i];
        if (!std::isfinite(v) || v < 0.0)
          fail(ErrorCode::InvalidSpec, "user Z field is negative or non-finite at node " +
                                           std::to_string(i));
        if (v == 0.0) {
          ++zeros;
          // the zero set must sit in the unit ball, up to one grid cell
          if (user_grid->radius(i) > 1.0 + user_grid->spacing())
            fail(ErrorCode::InvalidSpec, "user Z field vanishes outside the unit ball");
        }
      }
      if (zeros == 0) fail(ErrorCode::InvalidSpec, "user Z field has no zero node");
      break;
    }
  }
}

std::string CompactSetSpec::describe() const {
  const char* form = z_form == ZForm::Squared ? ",squared" : "";
  switch (kind) {
    case Kind::Points: {
      std::string s = "points[";
      for (std::size_t i = 0; i < points.size(); ++i) s += (i ? ";" : "") + fmt_point(points[i]);
      return s + "]" + form;
    }
    case Kind::Sphere:
      return "sphere(c=" + fmt_point(center) + ",r=" + fmt(radius) + ")" + form;
    case Kind::UserField:
      return "user_field(M=" + std::to_string(user_grid ? user_grid->points_per_dim() : 0) + ")";
  }
  return "?";
}

double distance_to_set(const CompactSetSpec& spec, const double* x, int dim) {
  switch (spec.kind) {
    case CompactSetSpec::Kind::Points: {
      double best = INFINITY;
      for (const auto& p : spec.points) best = std::min(best, dist(x, p, dim));
      return best;
    }
    case CompactSetSpec::Kind::Sphere:
      return std::abs(dist(x, spec.center, dim) - spec.radius);
    case CompactSetSpec::Kind::UserField: {
      double best = INFINITY;
      for (const auto& p : user_zero_points(spec)) best = std::min(best, dist(x, p, dim));
      return best;
    }
  }
  return INFINITY;
}

std::vector<Point> anchor_points(const CompactSetSpec& spec) {
  switch (spec.kind) {
    case CompactSetSpec::Kind::Points:
      return spec.points;
    case CompactSetSpec::Kind::Sphere: {
      std::vector<Point> out;
      for (std::size_t d = 0; d < spec.center.size(); ++d)
        for (double sg : {-1.0, 1.0}) {
          Point p = spec.center;
          p[d] += sg * spec.radius;
          out.push_back(p);
        }
      return out;
    }
    case CompactSetSpec::Kind::UserField:
      return user_zero_points(spec);
  }
  return {};
}

RealField build_Z(const CompactSetSpec& spec, const Grid& grid) {
  spec.validate(grid.dim());
  if (spec.kind == CompactSetSpec::Kind::UserField) {
    if (!(*spec.user_grid == grid)) fail(ErrorCode::InvalidSpec, "user Z grid does not match");
    return spec.user_z;
  }
  const int dim = grid.dim();
  RealField z(grid.node_count());
  double x[8];
  for (std::size_t i = 0; i < z.size(); ++i) {
    grid.coordinates(i, x);
    z[i] = z_jet(spec, x, dim).v;
  }
  return z;
}

AField build_A(const CompactSetSpec& spec, std::int64_t k, const Grid& grid) {
  if (k < 3) fail(ErrorCode::InvalidArgument, "exponent k must be at least 3");
  if (grid.dim() > 8) fail(ErrorCode::InvalidGrid, "dimension above 8 is not supported");
  AField a{grid, spec, k, build_Z(spec, grid), {}, {}, {}, {}, 0.0, 0.0, 0};
  const int dim = grid.dim();
  const std::size_t n = grid.node_count();
  const double kd = static_cast<double>(k);
  const double half_h = 0.5 * grid.spacing();
  a.values.assign(n, 0.0);
  a.grad.assign(n * static_cast<std::size_t>(dim), 0.0);
  a.laplacian.assign(n, 0.0);
  a.k_node.assign(n, 0);

  const bool user = spec.kind == CompactSetSpec::Kind::UserField;
  RealField p_val, p_lap;
  std::vector<RealField> p_grad;
  if (user) {
    // P = Z chi(|x|) is compactly supported, so its spectral derivatives
    // do not see the periodic seam.
    spectral::Spectral sp(grid);
    p_val.resize(n);
    for (std::size_t i = 0; i < n; ++i) p_val[i] = a.z[i] * chi(grid.radius(i));
    for (int d = 0; d < dim; ++d) p_grad.push_back(sp.gradient_real(p_val, d));
    p_lap = sp.laplacian_real(p_val);
  }

  double x[8];
  for (std::size_t i = 0; i < n; ++i) {
    grid.coordinates(i, x);
    const double r = norm_of(x, dim);
    const bool on_k = user ? a.z[i] == 0.0 : distance_to_set(spec, x, dim) <= half_h;
    if (on_k) {
      a.k_node[i] = 1;
      ++a.k_node_count;
      continue;
    }
    double* g = &a.grad[i * static_cast<std::size_t>(dim)];
    if (r >= 2.0) {
      a.values[i] = std::pow(r, kd);
      const double rk1 = std::pow(r, kd - 1.0);
      for (int d = 0; d < dim; ++d) g[d] = kd * rk1 * x[d] / r;
      a.laplacian[i] = kd * rk1 * (dim - 1) / r + kd * (kd - 1.0) * std::pow(r, kd - 2.0);
      continue;
    }
    // B = r + chi(r) (Z - r) and its derivatives
    Jet b;
    if (user) {
      const ChiJet c = chi_jet(r);
      const double q = (1.0 - c.v) * r;
      b.v = p_val[i] + q;
      b.lap = p_lap[i];
      for (int d = 0; d < dim; ++d) b.g[d] = p_grad[d][i];
      if (r > 1.0) {
        const double q1 = (1.0 - c.v) - c.d1 * r;
        const double q2 = -2.0 * c.d1 - c.d2 * r;
        for (int d = 0; d < dim; ++d) b.g[d] += q1 * x[d] / r;
        b.lap += q2 + q1 * (dim - 1) / r;
      }
    } else {
      const Jet z = z_jet(spec, x, dim);
      if (r <= 1.0) {
        b = z;
      } else {
        const ChiJet c = chi_jet(r);
        const double diff = z.v - r;
        const double lap_r = (dim - 1) / r;
        b.v = r + c.v * diff;
        double dot = 0.0;
        for (int d = 0; d < dim; ++d) {
          const double gr = x[d] / r;
          b.g[d] = gr + c.d1 * gr * diff + c.v * (z.g[d] - gr);
          dot += gr * (z.g[d] - gr);
        }
        b.lap = lap_r + (c.d2 + c.d1 * lap_r) * diff + 2.0 * c.d1 * dot + c.v * (z.lap - lap_r);
      }
    }
    if (!(b.v > 0.0)) fail(ErrorCode::InvalidSpec, "A vanishes off K at node " + std::to_string(i));
    const double bk2 = std::pow(b.v, kd - 2.0);
    const double bk1 = bk2 * b.v;
    a.values[i] = bk1 * b.v;
    double g2 = 0.0;
    for (int d = 0; d < dim; ++d) {
      g[d] = kd * bk1 * b.g[d];
      g2 += b.g[d] * b.g[d];
    }
    a.laplacian[i] = kd * bk1 * b.lap + kd * (kd - 1.0) * bk2 * g2;
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double v = a.values[i];
    if (!(v > 0.0)) continue;
    double g2 = 0.0;
    for (int d = 0; d < dim; ++d) g2 += a.grad[i * dim + d] * a.grad[i * dim + d];
    a.bound_grad = std::max(a.bound_grad, std::sqrt(g2) / std::pow(v, 1.0 - 1.0 / kd));
    a.bound_lap = std::max(a.bound_lap, std::abs(a.laplacian[i]) / std::pow(v, 1.0 - 2.0 / kd));
  }
  if (a.k_node_count == 0)
    fail(ErrorCode::InvalidSpec, "no grid node lies within spacing/2 of K; refine the grid");
  return a;
}

RegionSpec RegionSpec::whole() { return {}; }

RegionSpec RegionSpec::ball(Point center, double radius) {
  RegionSpec r;
  r.kind = Kind::Ball;
  r.center = std::move(center);
  r.radius = radius;
  return r;
}

RegionSpec RegionSpec::outside_ball(Point center, double radius) {
  RegionSpec r = ball(std::move(center), radius);
  r.kind = Kind::OutsideBall;
  return r;
}

RegionSpec RegionSpec::complement_of_neighborhood(const CompactSetSpec& k_set, double delta) {
  RegionSpec r;
  r.kind = Kind::ComplementOfNeighborhood;
  r.set = std::make_shared<const CompactSetSpec>(k_set);
  r.radius = delta;
  return r;
}

RegionSpec RegionSpec::union_of(std::vector<RegionSpec> parts) {
  RegionSpec r;
  r.kind = Kind::Union;
  r.parts = std::move(parts);
  return r;
}

bool RegionSpec::contains(const double* x, int dim) const {
  switch (kind) {
    case Kind::Whole:
      return true;
    case Kind::Ball:
      return dist(x, center, dim) <= radius;
    case Kind::OutsideBall:
      return dist(x, center, dim) > radius;
    case Kind::ComplementOfNeighborhood:
      return distance_to_set(*set, x, dim) > radius;
    case Kind::Union:
      for (const auto& p : parts)
        if (p.contains(x, dim)) return true;
      return false;
  }
  return false;
}

std::string RegionSpec::label() const {
  switch (kind) {
    case Kind::Whole:
      return "whole";
    case Kind::Ball:
      return "ball" + fmt_point(center) + "r" + fmt(radius);
    case Kind::OutsideBall:
      return "outside" + fmt_point(center) + "r" + fmt(radius);
    case Kind::ComplementOfNeighborhood:
      return "away_from_K_d" + fmt(radius);
    case Kind::Union: {
      std::string s;
      for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? "|" : "") + parts[i].label();
      return s;
    }
  }
  return "?";
}

std::vector<std::uint8_t> region_mask(const Grid& grid, const RegionSpec& region) {
  const int dim = grid.dim();
  if (region.kind == RegionSpec::Kind::Ball || region.kind == RegionSpec::Kind::OutsideBall)
    if (static_cast<int>(region.center.size()) != dim)
      fail(ErrorCode::InvalidArgument, "region center has wrong dimension");
  std::vector<std::uint8_t> mask(grid.node_count(), 0);
  std::size_t count = 0;
  double x[8];
  for (std::size_t i = 0; i < mask.size(); ++i) {
    grid.coordinates(i, x);
    if (region.contains(x, dim)) {
      mask[i] = 1;
      ++count;
    }
  }
  if (count == 0) fail(ErrorCode::EmptyRegion, "region " + region.label() + " contains no node");
  return mask;
}

}  // namespace nlslab::geometry
