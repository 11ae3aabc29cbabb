#ifndef DEADLEAVES_GEOMETRY_HPP
#define DEADLEAVES_GEOMETRY_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace deadleaves {

// comparison tolerance (pixel units) for all radius-boundary predicates
inline constexpr double kGeomEps = 1e-9;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline bool operator==(const Point2& a, const Point2& b) { return a.x == b.x && a.y == b.y; }

inline double dist(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }
inline double dist2(const Point2& a, const Point2& b) {
  const double dx = a.x - b.x, dy = a.y - b.y;
  return dx * dx + dy * dy;
}

// The discretized visible area: an ordered list of pairwise-distinct sample
// points. Subsets are bitmasks over this order.
struct PixelSet {
  std::vector<Point2> points;

  int size() const { return static_cast<int>(points.size()); }
  const Point2& operator[](int i) const { return points[static_cast<std::size_t>(i)]; }
};

using SubsetMask = std::uint32_t;

inline void validate_pixel_set(const PixelSet& a) {
  if (a.points.empty()) throw std::invalid_argument("pixel set must be non-empty");
  if (a.points.size() > 31) throw std::invalid_argument("pixel set too large for subset masks");
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    if (!std::isfinite(a.points[i].x) || !std::isfinite(a.points[i].y))
      throw std::invalid_argument("pixel coordinates must be finite");
    for (std::size_t j = i + 1; j < a.points.size(); ++j)
      if (a.points[i] == a.points[j]) throw std::invalid_argument("pixel set has duplicate points");
  }
}

// Sorts pixels row-major by (y, x) ascending; canonical enumeration order for
// reproducible masks and output files.
inline void sort_row_major(PixelSet& a) {
  std::sort(a.points.begin(), a.points.end(), [](const Point2& p, const Point2& q) {
    return p.y != q.y ? p.y < q.y : p.x < q.x;
  });
}

// r*_ij = half the center distance: below it the two circles are disjoint.
inline double pair_critical_radius(const Point2& xi, const Point2& xj) {
  const double d = dist(xi, xj);
  if (d == 0.0) throw std::invalid_argument("pair_critical_radius: coincident points");
  return 0.5 * d;
}

// Circumradius abc / (4 * heron area); collinear -> nullopt. The area uses
// Kahan's ordered form of Heron's formula (the semiperimeter form cancels
// catastrophically on needle triangles), with the sides sorted so the result
// is bit-identical under argument permutation.
inline std::optional<double> triple_circumradius(const Point2& xi, const Point2& xj,
                                                 const Point2& xk) {
  double a = dist(xi, xj), b = dist(xj, xk), c = dist(xi, xk);
  if (a == 0.0 || b == 0.0 || c == 0.0)
    throw std::invalid_argument("triple_circumradius: duplicate points");
  if (a < b) std::swap(a, b);
  if (b < c) std::swap(b, c);
  if (a < b) std::swap(a, b);
  const double h2 = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
  if (h2 <= 0.0) return std::nullopt;
  return a * b * c / std::sqrt(h2);
}

// Signed angle of the vector xj - xi, s_ij * acos(dx/d) with the sign taken
// from the vertical difference and falling back to the horizontal one.
// Satisfies alpha_ji = alpha_ij - pi (mod 2pi); range [-pi, pi].
inline double alpha_angle(const Point2& xi, const Point2& xj) {
  const double dx = xj.x - xi.x, dy = xj.y - xi.y;
  const double d = std::hypot(dx, dy);
  if (d == 0.0) throw std::invalid_argument("alpha_angle: coincident points");
  const double s = dy != 0.0 ? (dy > 0.0 ? 1.0 : -1.0) : (dx > 0.0 ? 1.0 : -1.0);
  return s * std::acos(std::clamp(dx / d, -1.0, 1.0));
}

// beta_ij(r) = acos(d / 2r); argument clamped to 1 within a 1e-12 window so
// evaluation exactly at the pair critical radius stays real.
inline double beta_angle(double d, double r) {
  double arg = d / (2.0 * r);
  if (arg > 1.0) {
    if (arg > 1.0 + 1e-12) throw std::domain_error("beta_angle: circles do not intersect");
    arg = 1.0;
  }
  return std::acos(arg);
}

inline Point2 unit_normal(double t) { return Point2{std::cos(t), std::sin(t)}; }
inline double dot(const Point2& a, const Point2& b) { return a.x * b.x + a.y * b.y; }

// Intersection point of the radius-r circles around pixels i and j, reachable
// as x_{ij+} = x_{ji-}. sign is +1 or -1.
struct IntersectionPoint {
  int i = 0;
  int j = 0;
  int sign = +1;
};

struct CircleIntersections {
  int count = 0;      // 0, 1 (kissing) or 2
  Point2 plus{};      // x_{ij+}
  Point2 minus{};     // x_{ij-}
};

inline Point2 intersection_coords(const Point2& xi, const Point2& xj, double r, int sign) {
  const double t = alpha_angle(xi, xj) + sign * beta_angle(dist(xi, xj), r);
  return Point2{xi.x + r * std::cos(t), xi.y + r * std::sin(t)};
}

inline CircleIntersections intersection_points(const Point2& xi, const Point2& xj, double r) {
  if (r <= 0.0) throw std::invalid_argument("intersection_points: radius must be positive");
  const double d = dist(xi, xj);
  if (d == 0.0) throw std::invalid_argument("intersection_points: coincident circles");
  CircleIntersections out;
  if (d > 2.0 * r * (1.0 + 1e-12)) return out;
  if (std::abs(d - 2.0 * r) <= 1e-12 * std::max(1.0, d)) {
    out.count = 1;
    out.plus = out.minus = Point2{0.5 * (xi.x + xj.x), 0.5 * (xi.y + xj.y)};
    return out;
  }
  out.count = 2;
  out.plus = intersection_coords(xi, xj, r, +1);
  out.minus = intersection_coords(xi, xj, r, -1);
  return out;
}

// p lies in the area of possible positions p_{r,v}: within r of every pixel of
// v (closed) and strictly farther than r from the rest (open). Ties within
// kGeomEps resolve toward the closed side of each test.
inline bool membership_in_region(const Point2& p, double r, SubsetMask v, const PixelSet& a) {
  if (v == 0) throw std::invalid_argument("membership_in_region: empty subset");
  for (int k = 0; k < a.size(); ++k) {
    const double d = dist(p, a[k]);
    if (v >> k & 1u) {
      if (d > r + kGeomEps) return false;
    } else {
      if (d <= r - kGeomEps) return false;
    }
  }
  return true;
}

// delta_{r,v}: 1 iff the point is in the closure of p_{r,v} (<= for members,
// >= for excluded, both within kGeomEps).
inline bool delta_singular(const Point2& ip, double r, SubsetMask v, const PixelSet& a) {
  for (int k = 0; k < a.size(); ++k) {
    const double d = dist(ip, a[k]);
    if (v >> k & 1u) {
      if (d > r + kGeomEps) return false;
    } else {
      if (d < r - kGeomEps) return false;
    }
  }
  return true;
}

// empty-leaf variant: boundary of the impossible-positions area, >= r from all
inline bool delta_singular_empty(const Point2& ip, double r, const PixelSet& a) {
  for (int k = 0; k < a.size(); ++k)
    if (dist(ip, a[k]) < r - kGeomEps) return false;
  return true;
}

// Combined boundary-orientation/endpoint sign c_v(x_{ij+-}):
// -+1 when exactly one of x_i, x_j is in v, +-1 otherwise.
inline int orientation_sign(bool i_in_v, bool j_in_v, int sign) {
  return (i_in_v != j_in_v) ? -sign : sign;
}

enum class CriticalKind { bound, pair, triple };

struct CriticalRadius {
  double r = 0.0;
  CriticalKind kind = CriticalKind::bound;
  // pixel indices backing the entry; {i,j} for pair, {i,j,k} for triple.
  // dedup merges provenance of coincident radii.
  std::vector<std::array<int, 3>> provenance;
};

struct CriticalRadiusSchedule {
  std::vector<CriticalRadius> radii;  // strictly increasing, r_min first, r_max last

  int intervals() const { return static_cast<int>(radii.size()) - 1; }
  double lo(int l) const { return radii[static_cast<std::size_t>(l)].r; }
  double hi(int l) const { return radii[static_cast<std::size_t>(l) + 1].r; }
};

// All pair and triple critical radii inside (r_min, r_max), bounds included,
// sorted, entries closer than kGeomEps merged.
inline CriticalRadiusSchedule critical_radius_schedule(const PixelSet& a, double r_min,
                                                       double r_max) {
  if (!(0.0 < r_min && r_min < r_max))
    throw std::invalid_argument("critical_radius_schedule: need 0 < r_min < r_max");
  const int n = a.size();
  std::vector<CriticalRadius> entries;
  entries.push_back({r_min, CriticalKind::bound, {}});
  entries.push_back({r_max, CriticalKind::bound, {}});
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double r = pair_critical_radius(a[i], a[j]);
      if (r_min < r && r < r_max) entries.push_back({r, CriticalKind::pair, {{i, j, -1}}});
    }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        const auto r = triple_circumradius(a[i], a[j], a[k]);
        if (r && r_min < *r && *r < r_max)
          entries.push_back({*r, CriticalKind::triple, {{i, j, k}}});
      }
  std::sort(entries.begin(), entries.end(),
            [](const CriticalRadius& p, const CriticalRadius& q) { return p.r < q.r; });
  CriticalRadiusSchedule out;
  for (auto& e : entries) {
    if (!out.radii.empty() && e.r - out.radii.back().r <= kGeomEps) {
      auto& prev = out.radii.back();
      prev.provenance.insert(prev.provenance.end(), e.provenance.begin(), e.provenance.end());
    } else {
      out.radii.push_back(std::move(e));
    }
  }
  return out;
}

}  // namespace deadleaves

#endif  // DEADLEAVES_GEOMETRY_HPP
