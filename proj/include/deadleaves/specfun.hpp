#ifndef DEADLEAVES_SPECFUN_HPP
#define DEADLEAVES_SPECFUN_HPP

#include <cmath>
#include <limits>
#include <stdexcept>

#include "deadleaves/geometry.hpp"
#include "deadleaves/rng.hpp"

namespace deadleaves {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

namespace detail {
// zeta(2n) for n = 1..32
inline constexpr double kZetaEven[32] = {
    1.6449340668482264,  1.0823232337111381,  1.0173430619844492,  1.0040773561979444,
    1.000994575127818,   1.000246086553308,   1.0000612481350588,  1.0000152822594086,
    1.000003817293265,   1.0000009539620338,  1.0000002384505027,  1.0000000596081891,
    1.0000000149015549,  1.000000003725334,   1.0000000009313275,  1.0000000002328311,
    1.0000000000582077,  1.0000000000145519,  1.000000000003638,   1.0000000000009095,
    1.0000000000002274,  1.0000000000000568,  1.0000000000000142,  1.0000000000000036,
    1.0000000000000009,  1.0000000000000002,  1.0,                 1.0,
    1.0,                 1.0,                 1.0,                 1.0};
}  // namespace detail

// Clausen function of order 2, Cl2(t) = sum_k sin(k t)/k^2. Odd, 2pi-periodic.
// Reduce to (-pi, pi] and evaluate
//   Cl2(t) = t - t log|t| + sum_n zeta(2n)/(n(2n+1)) t^(2n+1) / (2pi)^(2n),
// which converges at worst like 4^-n on the reduced range.
inline double clausen2(double theta) {
  if (!std::isfinite(theta)) throw std::invalid_argument("clausen2: non-finite argument");
  double t = std::remainder(theta, 2.0 * kPi);  // (-pi, pi]
  if (t == 0.0) return 0.0;
  double sign = 1.0;
  if (t < 0.0) {
    t = -t;
    sign = -1.0;
  }
  double sum = t - t * std::log(t);
  const double q = (t / (2.0 * kPi)) * (t / (2.0 * kPi));
  double pw = t * q;  // t^(2n+1) / (2pi)^(2n) at n = 1
  for (int n = 1; n <= 32; ++n) {
    const double term = detail::kZetaEven[n - 1] / (n * (2.0 * n + 1.0)) * pw;
    sum += term;
    if (term < 1e-17 * std::abs(sum) + 1e-300) break;
    pw *= q;
  }
  return sign * sum;
}

// Power-law radius distribution f_X(r) = Z^-1 2 r^-3 on [r_min, r_max] with
// the frame geometry: visible area A = [0,s]^2, positions uniform on
// B = [-r_max, s+r_max]^2.
struct RadiusLaw {
  double r_min = 1.0;
  double r_max = 2.0;
  double s = 0.0;  // visible-area side length

  double inv_sq_span() const { return 1.0 / (r_min * r_min) - 1.0 / (r_max * r_max); }
  double norm_constant() const { return 2.0 / inv_sq_span(); }
  double area_B() const { return (s + 2.0 * r_max) * (s + 2.0 * r_max); }
};

inline void validate_law(const RadiusLaw& law) {
  if (!(0.0 < law.r_min && law.r_min < law.r_max) || !std::isfinite(law.r_max))
    throw std::invalid_argument("radius law: need 0 < r_min < r_max < inf");
  if (!(law.s >= 0.0)) throw std::invalid_argument("radius law: need s >= 0");
}

inline double power_law_pdf(double r, const RadiusLaw& law) {
  if (r < law.r_min || r > law.r_max) return 0.0;
  return law.norm_constant() / (r * r * r);
}

inline double power_law_cdf(double r, const RadiusLaw& law) {
  if (r <= law.r_min) return 0.0;
  if (r >= law.r_max) return 1.0;
  return (1.0 / (law.r_min * law.r_min) - 1.0 / (r * r)) / law.inv_sq_span();
}

// inverse-CDF sample: r = (r_min^-2 - u (r_min^-2 - r_max^-2))^(-1/2)
inline double power_law_sample(const RadiusLaw& law, Rng& rng) {
  const double u = rng.uniform();
  return 1.0 / std::sqrt(1.0 / (law.r_min * law.r_min) - u * law.inv_sq_span());
}

inline double power_law_quantile(const RadiusLaw& law, double u) {
  return 1.0 / std::sqrt(1.0 / (law.r_min * law.r_min) - u * law.inv_sq_span());
}

// Radius antiderivative of 2 r^-3 A(x_{ij+-}; r), where A is the endpoint term
// of the boundary contour integral at the intersection point of the radius-r
// circles around xi and xj. Used only in differences b(r2) - b(r1); the
// additive constant is arbitrary. sign = +1 selects x_{ij+}.
//
// The closed form integrates r^-1 acos(d/2r) through Im Li2(e^{i(2b+pi)}) =
// Cl2(2b + pi). The last summand is (<xi,n(a)>/d)(b - sin(2b)/2): integration
// by substitution gives int 2 sin^2 = theta - sin(2 theta)/2 once, not twice.
inline double antiderivative_b(double r, const Point2& xi, const Point2& xj, int sign) {
  const double d = dist(xi, xj);
  if (!(r > 0.0)) throw std::invalid_argument("antiderivative_b: radius must be positive");
  const double alpha = alpha_angle(xi, xj);
  const double beta = beta_angle(d, r);  // throws past the clamp window
  const double na = dot(xi, unit_normal(alpha));
  const double nq = dot(xi, unit_normal(alpha - 0.5 * kPi));
  double out = alpha * std::log(r);
  out -= sign * (0.5 * clausen2(2.0 * beta + kPi) + beta * std::log(d / r));
  out -= d / (4.0 * r * r) * nq;
  out += sign * (na / d) * (beta - 0.5 * std::sin(2.0 * beta));
  return out;
}

// Endpoint term A(x_{ij+-}; r) itself; the independent check target for
// d/dr b = 2 r^-3 A and the integrand of the quadrature oracle.
inline double boundary_area_term(double r, const Point2& xi, const Point2& xj, int sign) {
  const double d = dist(xi, xj);
  const double alpha = alpha_angle(xi, xj);
  const double beta = beta_angle(d, r);
  const double na = dot(xi, unit_normal(alpha));
  const double nq = dot(xi, unit_normal(alpha - 0.5 * kPi));
  return 0.5 * r * r * (alpha + sign * beta) + 0.25 * d * nq +
         sign * 0.5 * r * std::sin(beta) * na;
}

}  // namespace deadleaves

#endif  // DEADLEAVES_SPECFUN_HPP
