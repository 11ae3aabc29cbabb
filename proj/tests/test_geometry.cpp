#include <doctest.h>

#include <cmath>
#include <set>

#include "deadleaves/geometry.hpp"
#include "deadleaves/rng.hpp"

using namespace deadleaves;

namespace {

PixelSet grid3x3() {
  PixelSet a;
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 3; ++x) a.points.push_back({double(x), double(y)});
  return a;
}

int idx3(int x, int y) { return y * 3 + x; }

}  // namespace

TEST_CASE("pair_critical_radius") {
  CHECK(pair_critical_radius({0, 0}, {0, 1}) == doctest::Approx(0.5).epsilon(1e-15));
  // opposite corners and knight-move pairs of the 3x3 grid
  CHECK(pair_critical_radius({0, 0}, {2, 2}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(pair_critical_radius({0, 0}, {1, 2}) ==
        doctest::Approx(std::sqrt(5.0) / 2.0).epsilon(1e-15));
  CHECK_THROWS_AS(pair_critical_radius({1, 1}, {1, 1}), std::invalid_argument);
}

TEST_CASE("triple_circumradius") {
  auto r = triple_circumradius({0, 0}, {1, 0}, {0, 1});
  REQUIRE(r.has_value());
  CHECK(*r == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-14));

  r = triple_circumradius({0, 0}, {2, 0}, {1, 2});
  REQUIRE(r.has_value());
  CHECK(*r == doctest::Approx(1.25).epsilon(1e-14));

  CHECK_FALSE(triple_circumradius({0, 0}, {1, 0}, {2, 0}).has_value());
  CHECK_THROWS_AS(triple_circumradius({0, 0}, {0, 0}, {1, 0}), std::invalid_argument);

  // permutation invariance
  Rng rng(7);
  for (int t = 0; t < 50; ++t) {
    Point2 p{rng.uniform(0, 4), rng.uniform(0, 4)};
    Point2 q{rng.uniform(0, 4), rng.uniform(0, 4)};
    Point2 s{rng.uniform(0, 4), rng.uniform(0, 4)};
    auto a = triple_circumradius(p, q, s);
    auto b = triple_circumradius(s, p, q);
    auto c = triple_circumradius(q, s, p);
    REQUIRE(a.has_value());
    CHECK(*a == doctest::Approx(*b).epsilon(1e-10));
    CHECK(*a == doctest::Approx(*c).epsilon(1e-10));
  }
}

TEST_CASE("alpha_angle basics and the zero-vertical-difference branch") {
  CHECK(alpha_angle({0, 0}, {1, 0}) == doctest::Approx(0.0));
  CHECK(alpha_angle({0, 0}, {0, 1}) == doctest::Approx(3.14159265358979323846 / 2));
  // dy = 0, dx < 0: the sign falls back to sgn(dx) = -1, giving -pi
  CHECK(alpha_angle({0, 0}, {-1, 0}) == doctest::Approx(-3.14159265358979323846));
  CHECK_THROWS_AS(alpha_angle({2, 2}, {2, 2}), std::invalid_argument);

  // alpha_ji = alpha_ij - pi (mod 2pi) for random pairs
  Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    Point2 p{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    Point2 q{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    if (p == q) continue;
    const double diff = alpha_angle(q, p) - alpha_angle(p, q);
    const double wrapped = std::remainder(diff + 3.14159265358979323846,
                                          2 * 3.14159265358979323846);
    CHECK(std::abs(wrapped) < 1e-12);
  }
}

TEST_CASE("intersection_points") {
  // kissing circles meet at one point
  auto kiss = intersection_points({0, 0}, {2, 0}, 1.0);
  CHECK(kiss.count == 1);
  CHECK(kiss.plus.x == doctest::Approx(1.0));
  CHECK(kiss.plus.y == doctest::Approx(0.0));

  // symmetric configuration with known answers
  auto sym = intersection_points({0, 0}, {0, 2}, std::sqrt(2.0));
  REQUIRE(sym.count == 2);
  std::set<std::pair<int, int>> got{
      {int(std::round(sym.plus.x)), int(std::round(sym.plus.y))},
      {int(std::round(sym.minus.x)), int(std::round(sym.minus.y))}};
  CHECK(got == std::set<std::pair<int, int>>{{-1, 1}, {1, 1}});

  CHECK(intersection_points({0, 0}, {5, 0}, 1.0).count == 0);
  CHECK_THROWS_AS(intersection_points({0, 0}, {0, 0}, 1.0), std::invalid_argument);
}

TEST_CASE("swap symmetry: x_{ij+} = x_{ji-} and both points sit on both circles") {
  Rng rng(23);
  for (int t = 0; t < 200; ++t) {
    Point2 p{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    Point2 q{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const double d = dist(p, q);
    if (d < 1e-3) continue;
    const double r = d / 2 * rng.uniform(1.001, 4.0);
    auto ij = intersection_points(p, q, r);
    auto ji = intersection_points(q, p, r);
    REQUIRE(ij.count == 2);
    REQUIRE(ji.count == 2);
    CHECK(dist(ij.plus, ji.minus) < 1e-12);
    CHECK(dist(ij.minus, ji.plus) < 1e-12);
    for (const Point2& ip : {ij.plus, ij.minus}) {
      CHECK(std::abs(dist(ip, p) - r) < 1e-10 * std::max(1.0, r));
      CHECK(std::abs(dist(ip, q) - r) < 1e-10 * std::max(1.0, r));
    }
  }
}

TEST_CASE("membership_in_region") {
  PixelSet a = grid3x3();
  // center of its own circle; nearest other pixel at distance 1 > r
  CHECK(membership_in_region({0, 0}, 0.9, 1u << idx3(0, 0), a));
  // too far from every member
  CHECK_FALSE(membership_in_region({5, 5}, 0.9, 1u << idx3(0, 0), a));
  CHECK_THROWS_AS(membership_in_region({0, 0}, 1.0, 0u, a), std::invalid_argument);

  // the predicate is its own oracle: compare against direct evaluation of the
  // two quantified conditions for random positions
  SubsetMask v = 0;
  for (int y = 1; y <= 2; ++y)
    for (int x = 1; x <= 2; ++x) v |= 1u << idx3(x, y);
  const double r = 1.3;
  Rng rng(5);
  for (int t = 0; t < 2000; ++t) {
    Point2 p{rng.uniform(-2, 4), rng.uniform(-2, 4)};
    bool expect = true;
    for (int k = 0; k < 9 && expect; ++k) {
      const double dk = dist(p, a[k]);
      expect = (v >> k & 1u) ? dk <= r : dk > r;
    }
    CHECK(membership_in_region(p, r, v, a) == expect);
  }
}

TEST_CASE("delta_singular") {
  PixelSet two;
  two.points = {{0, 0}, {1, 0}};
  const double r = 0.55;  // slightly above the pair critical radius 0.5
  auto ips = intersection_points(two[0], two[1], r);
  REQUIRE(ips.count == 2);
  CHECK(delta_singular(ips.plus, r, 0b11u, two));
  CHECK(delta_singular(ips.minus, r, 0b11u, two));

  // a point strictly inside an excluded pixel's circle is not relevant
  PixelSet three;
  three.points = {{0, 0}, {1, 0}, {0.5, 0.1}};
  auto ips2 = intersection_points(three[0], three[1], 0.55);
  // the lens vertices straddle the segment; the one near (0.5, 0.22) lies
  // inside the circle around (0.5, 0.1)
  const Point2 near = ips2.plus.y > 0 ? ips2.plus : ips2.minus;
  CHECK_FALSE(delta_singular(near, 0.55, 0b011u, three));
}

TEST_CASE("relevant intersection points of the 3x3 example top leaf") {
  // beyond the largest critical radius sqrt(10)/2 the boundary keeps exactly
  // three corners
  PixelSet a = grid3x3();
  SubsetMask v = 0;
  for (int y = 1; y <= 2; ++y)
    for (int x = 1; x <= 2; ++x) v |= 1u << idx3(x, y);
  const double r = 1.7;
  std::set<std::pair<long, long>> points;
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) {
      if (i == j || dist(a[i], a[j]) >= 2 * r) continue;
      for (int sign : {+1, -1}) {
        const Point2 ip = intersection_coords(a[i], a[j], r, sign);
        if (delta_singular(ip, r, v, a))
          points.insert({std::lround(ip.x * 1e9), std::lround(ip.y * 1e9)});
      }
    }
  CHECK(points.size() == 3);

  // and none of them lies in the open interior of the region
  for (const auto& [px, py] : points) {
    const Point2 ip{double(px) * 1e-9, double(py) * 1e-9};
    bool strictly_inside = true;
    for (int k = 0; k < 9 && strictly_inside; ++k) {
      const double dk = dist(ip, a[k]);
      strictly_inside = (v >> k & 1u) ? dk < r - 1e-6 : dk > r + 1e-6;
    }
    CHECK_FALSE(strictly_inside);
  }
}

TEST_CASE("orientation_sign") {
  CHECK(orientation_sign(true, false, +1) == -1);
  CHECK(orientation_sign(true, true, +1) == +1);
  CHECK(orientation_sign(false, false, -1) == -1);
  CHECK(orientation_sign(false, true, -1) == +1);
}

TEST_CASE("critical_radius_schedule") {
  PixelSet a = grid3x3();
  auto sched = critical_radius_schedule(a, 1.0, 2.0);
  REQUIRE(sched.radii.size() >= 2);
  CHECK(sched.radii.front().r == 1.0);
  CHECK(sched.radii.back().r == 2.0);
  for (std::size_t k = 1; k < sched.radii.size(); ++k)
    CHECK(sched.radii[k].r - sched.radii[k - 1].r > kGeomEps);

  // the distinct interior critical radii of the unit 3x3 grid with [1,2]
  const double expect[] = {std::sqrt(5.0) / 2, 5 * std::sqrt(2.0) / 6, 1.25, std::sqrt(2.0),
                           std::sqrt(10.0) / 2};
  REQUIRE(sched.radii.size() == 7);
  for (int k = 0; k < 5; ++k)
    CHECK(sched.radii[std::size_t(k) + 1].r == doctest::Approx(expect[k]).epsilon(1e-12));

  // a single pixel has no pair or triple radii
  PixelSet one;
  one.points = {{0, 0}};
  auto s1 = critical_radius_schedule(one, 1.0, 2.0);
  CHECK(s1.radii.size() == 2);
}
