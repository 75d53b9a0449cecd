

#include <doctest.h>

#include <cmath>

#include <algorithm>

#include "nlslab/error.hpp"
#include "nlslab/geometry.hpp"
#include "nlslab/spectral.hpp"

using namespace nlslab;
using namespace nlslab::geometry;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Internal;
}

// Smooth window: 1 on |x| <= L - 1, 0 at the seam.
double window(double x, double half) {
  return chi(1.0 + 1.02 * (std::abs(x) - (half - 1.0)));
}

}  // namespace

TEST_CASE("make_grid examples") {
  Grid g(1, 8.0, 16);
  CHECK(g.node_count() == 16);
  CHECK(g.coordinate(0, 0) == -8.0);
  CHECK(g.coordinate(15, 0) == 7.0);
  Grid g2(2, 4.0, 32);
  CHECK(g2.node_count() == 1024);
  CHECK(g2.spacing() == 0.25);
  CHECK(code_of([] { Grid(1, 8.0, 17); }) == ErrorCode::InvalidGrid);
  CHECK(code_of([] { Grid(1, 8.0, 8); }) == ErrorCode::InvalidGrid);
  CHECK(code_of([] { Grid(1, 3.0, 16); }) == ErrorCode::InvalidGrid);
  double x[2];
  g2.coordinates(33, x);  // row 1, column 1; last axis fastest
  CHECK(x[0] == -3.75);
  CHECK(x[1] == -3.75);
}

TEST_CASE("chi examples") {
  CHECK(chi(0.5) == 1.0);
  CHECK(chi(1.0) == 1.0);
  CHECK(chi(3.0) == 0.0);
  CHECK(chi(2.0) == 0.0);
  CHECK(chi(1.5) > 0.0);
  CHECK(chi(1.5) < 1.0);
  CHECK(chi(1.4) >= chi(1.6));
  CHECK(std::abs(chi(1.5) - 0.5) < 1e-15);
  for (double s = 1.01; s < 2.0; s += 0.01) {
    const auto j = chi_jet(s);
    const double h = 1e-5;
    CHECK(j.d1 <= 0.0);
    CHECK(std::abs(j.d1 - (chi(s + h) - chi(s - h)) / (2 * h)) < 1e-7);
    CHECK(std::abs(j.d2 - (chi(s + h) - 2 * chi(s) + chi(s - h)) / (h * h)) < 1e-3);
  }
}

TEST_CASE("build_Z examples") {
  Grid g(1, 8.0, 32);  // spacing 0.5
  auto sq = CompactSetSpec::make_points({{0.0}}, ZForm::Squared);
  auto z = build_Z(sq, g);
  CHECK(z[16] == 0.0);   // x = 0
  CHECK(z[17] == 0.25);  // x = 0.5
  auto two = CompactSetSpec::make_two_points(0.5, 1, ZForm::Squared);
  auto z2 = build_Z(two, g);
  CHECK(z2[15] == 0.0);
  CHECK(z2[17] == 0.0);
  for (std::size_t i = 0; i < z2.size(); ++i) {
    const double x = g.coordinate(i, 0);
    CHECK(z2[i] == doctest::Approx((x - 0.5) * (x - 0.5) * (x + 0.5) * (x + 0.5)));
    if (i != 15 && i != 17) CHECK(z2[i] > 0.0);
  }
  Grid g2(2, 4.0, 32);
  auto circ = CompactSetSpec::make_sphere({0.0, 0.0}, 0.5, ZForm::Squared);
  auto zc = build_Z(circ, g2);
  double x[2];
  for (std::size_t i = 0; i < zc.size(); ++i) {
    g2.coordinates(i, x);
    const double s = x[0] * x[0] + x[1] * x[1] - 0.25;
    CHECK(zc[i] == doctest::Approx(s * s));
  }
  auto dist = CompactSetSpec::make_points({{0.0}});
  CHECK(build_Z(dist, g)[17] == 0.5);
}

TEST_CASE("compact set validation") {
  CHECK(code_of([] { CompactSetSpec::make_points({}).validate(1); }) == ErrorCode::InvalidSpec);
  CHECK(code_of([] { CompactSetSpec::make_points({{1.5}}).validate(1); }) == ErrorCode::InvalidSpec);
  CHECK(code_of([] { CompactSetSpec::make_sphere({0.6, 0.0}, 0.5).validate(2); }) == ErrorCode::InvalidSpec);
  Grid g(1, 8.0, 16);
  RealField z(16, 1.0);
  z[3] = -1.0;
  CHECK(code_of([&] { CompactSetSpec::make_user_field(g, z).validate(1); }) == ErrorCode::InvalidSpec);
  z[3] = 1.0;
  CHECK(code_of([&] { CompactSetSpec::make_user_field(g, z).validate(1); }) == ErrorCode::InvalidSpec);
  z[8] = 0.0;
  CompactSetSpec::make_user_field(g, z).validate(1);
}

TEST_CASE("build_A examples and invariants") {
  Grid g(1, 8.0, 512);
  const std::int64_t k = 8;
  auto sq = CompactSetSpec::make_points({{0.0}}, ZForm::Squared);
  auto a = build_A(sq, k, g);
  const std::size_t i0 = 256, ihalf = 256 + 16;  // x = 0, x = 0.5
  CHECK(a.values[i0] == 0.0);
  CHECK(a.values[ihalf] == doctest::Approx(std::pow(0.5, 2 * k)).epsilon(1e-14));
  const std::size_t i3 = 256 + 96;  // x = 3
  CHECK(a.values[i3] == std::pow(3.0, static_cast<double>(k)));

  for (auto spec : {CompactSetSpec::make_points({{0.0}}), CompactSetSpec::make_two_points(0.5, 1),
                    CompactSetSpec::make_points({{0.0}}, ZForm::Squared)}) {
    auto af = build_A(spec, k, g);
    double min_off = INFINITY;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      const double x = g.coordinate(i, 0);
      CHECK(af.values[i] >= 0.0);
      if (af.k_node[i]) {
        CHECK(af.values[i] == 0.0);
        CHECK(af.grad[i] == 0.0);
        CHECK(af.laplacian[i] == 0.0);
      } else {
        min_off = std::min(min_off, af.values[i]);
      }
      if (std::abs(x) >= 2.0) CHECK(af.values[i] == std::pow(std::abs(x), static_cast<double>(k)));
      if (i > 0) CHECK(af.values[i] == af.values[g.node_count() - i]);  // A(x) = A(-x)
    }
    CHECK(min_off > 0.0);
    CHECK(std::isfinite(af.bound_grad));
    CHECK(std::isfinite(af.bound_lap));
  }
  auto dist = build_A(CompactSetSpec::make_points({{0.0}}), k, g);
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const double x = g.coordinate(i, 0);
    CHECK(dist.values[i] == doctest::Approx(std::pow(std::abs(x), 8.0)).epsilon(1e-13));
  }
}

TEST_CASE("build_A is bit-reproducible") {
  Grid g(2, 4.0, 32);
  auto s = CompactSetSpec::make_sphere({0.0, 0.0}, 0.5);
  auto a = build_A(s, 8, g), b = build_A(s, 8, g);
  CHECK(a.values == b.values);
  CHECK(a.grad == b.grad);
  CHECK(a.laplacian == b.laplacian);
}

TEST_CASE("analytic derivatives of A agree with spectral differentiation") {
  // A smooth window that is 1 on |x| <= L - 1 removes the periodic seam
  // without touching the comparison region.
  struct Case {
    CompactSetSpec spec;
    int dim;
    int m;
  };
  std::vector<Case> cases = {{CompactSetSpec::make_points({{0.0}}), 1, 4096},
                             {CompactSetSpec::make_two_points(0.5, 1), 1, 4096},
                             {CompactSetSpec::make_points({{0.0}}, ZForm::Squared), 1, 4096},
                             {CompactSetSpec::make_two_points(0.5, 1, ZForm::Squared), 1, 4096},
                             {CompactSetSpec::make_sphere({0.0, 0.0}, 0.5, ZForm::Squared), 2, 1024}};
  for (const auto& c : cases) {
    Grid g(c.dim, 8.0, c.m);
    auto a = build_A(c.spec, 8, g);
    spectral::Spectral sp(g);
    RealField win(g.node_count());
    for (std::size_t i = 0; i < win.size(); ++i) {
      double w = 1.0;
      for (int d = 0; d < c.dim; ++d) w *= window(g.coordinate(i, d), 8.0);
      win[i] = w * a.values[i];
    }
    double scale = 0.0, err = 0.0, lscale = 0.0, lerr = 0.0;
    const auto lap = sp.laplacian_real(win);
    for (int d = 0; d < c.dim; ++d) {
      const auto gs = sp.gradient_real(win, d);
      for (std::size_t i = 0; i < win.size(); ++i) {
        bool inside = true;
        for (int e = 0; e < c.dim; ++e) inside = inside && std::abs(g.coordinate(i, e)) <= 8.0 - 1.0;
        if (!inside) continue;
        scale = std::max(scale, std::abs(a.grad[i * c.dim + d]));
        err = std::max(err, std::abs(a.grad[i * c.dim + d] - gs[i]));
        if (d == 0) {
          lscale = std::max(lscale, std::abs(a.laplacian[i]));
          lerr = std::max(lerr, std::abs(a.laplacian[i] - lap[i]));
        }
      }
    }
    CHECK_MESSAGE(err <= 1e-6 * scale, c.spec.describe(), " grad rel err ", err / scale);
    CHECK_MESSAGE(lerr <= 1e-4 * lscale, c.spec.describe(), " lap rel err ", lerr / lscale);
  }
}

TEST_CASE("discrete bound constants are stable under refinement") {
  for (auto spec : {CompactSetSpec::make_points({{0.0}}), CompactSetSpec::make_two_points(0.5, 1)}) {
    auto a = build_A(spec, 8, Grid(1, 8.0, 512));
    auto b = build_A(spec, 8, Grid(1, 8.0, 1024));
    CHECK(b.bound_grad == doctest::Approx(a.bound_grad).epsilon(0.1));
    CHECK(b.bound_lap == doctest::Approx(a.bound_lap).epsilon(0.1));
  }
}

TEST_CASE("user field Z uses spectral derivatives") {
  Grid g(1, 8.0, 512);
  RealField z(g.node_count());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = g.coordinate(i, 0) * g.coordinate(i, 0);
  auto user = build_A(CompactSetSpec::make_user_field(g, z), 8, g);
  auto ref = build_A(CompactSetSpec::make_points({{0.0}}, ZForm::Squared), 8, g);
  CHECK(user.k_node_count == 1);
  double gs = 0, ge = 0, ls = 0, le = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    CHECK(user.values[i] == doctest::Approx(ref.values[i]).epsilon(1e-12));
    gs = std::max(gs, std::abs(ref.grad[i]));
    ge = std::max(ge, std::abs(ref.grad[i] - user.grad[i]));
    ls = std::max(ls, std::abs(ref.laplacian[i]));
    le = std::max(le, std::abs(ref.laplacian[i] - user.laplacian[i]));
  }
  CHECK(ge <= 1e-6 * gs);
  CHECK(le <= 1e-6 * ls);
}

TEST_CASE("region_mask examples") {
  Grid g(1, 8.0, 64);
  auto all = region_mask(g, RegionSpec::ball({0.0}, 8.0));
  CHECK(std::count(all.begin(), all.end(), 1) == 64);
  auto one = region_mask(g, RegionSpec::ball({0.0}, g.spacing() / 2));
  CHECK(std::count(one.begin(), one.end(), 1) == 1);
  CHECK(one[32] == 1);
  auto away = region_mask(g, RegionSpec::complement_of_neighborhood(CompactSetSpec::make_points({{0.0}}), 1.0));
  for (std::size_t i = 0; i < away.size(); ++i) CHECK((away[i] == 1) == (std::abs(g.coordinate(i, 0)) > 1.0));
  auto u = region_mask(g, RegionSpec::union_of({RegionSpec::outside_ball({0.0}, 1.5), RegionSpec::ball({0.0}, 0.1)}));
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = std::abs(g.coordinate(i, 0));
    CHECK((u[i] == 1) == (x > 1.5 || x <= 0.1));
  }
  CHECK(code_of([&] { region_mask(g, RegionSpec::outside_ball({0.0}, 20.0)); }) == ErrorCode::EmptyRegion);
}

TEST_CASE("anchor points and distance") {
  auto s = CompactSetSpec::make_sphere({0.0, 0.0}, 0.5);
  CHECK(anchor_points(s).size() == 4);
  const double x[2] = {1.0, 0.0};
  CHECK(distance_to_set(s, x, 2) == 0.5);
  CHECK(anchor_points(CompactSetSpec::make_two_points(0.5, 1)).size() == 2);
}
