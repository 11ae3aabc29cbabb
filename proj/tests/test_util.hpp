#ifndef DEADLEAVES_TEST_UTIL_HPP
#define DEADLEAVES_TEST_UTIL_HPP

#include <cmath>
#include <functional>

#include "deadleaves/geometry.hpp"
#include "deadleaves/partitions.hpp"

namespace test {

// adaptive Simpson quadrature; independent oracle for antiderivative checks
inline double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double tol,
                                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(a, m, fa, flm, fm);
  const double right = simpson(m, b, fm, frm, fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, 40);
}

inline deadleaves::PixelSet unit_grid(int w, int h) {
  deadleaves::PixelSet a;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) a.points.push_back({double(x), double(y)});
  return a;
}

inline deadleaves::SubsetMask mask_of(std::initializer_list<int> idx) {
  deadleaves::SubsetMask m = 0;
  for (int k : idx) m |= deadleaves::SubsetMask{1} << k;
  return m;
}

// unordered prior computed from a grid-approximated leaf table: residual
// tables fall out of the full-set table by marginalization, the recursion is
// the same top-leaf sum as the analytic path
struct GridPriorOracle {
  std::vector<double> full;  // scaled P(L cap a = m) per mask over the root set

  double prior(const std::vector<deadleaves::SubsetMask>& blocks) const {
    if (blocks.empty()) return 1.0;
    deadleaves::SubsetMask residual = 0;
    for (auto b : blocks) residual |= b;
    double nonempty = 0.0;
    for (std::size_t m = 0; m < full.size(); ++m)
      if (m & residual) nonempty += full[m];
    double total = 0.0;
    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
      double num = 0.0;
      for (std::size_t m = 0; m < full.size(); ++m)
        if ((m & residual) == blocks[bi]) num += full[m];
      if (num <= 0.0) continue;
      std::vector<deadleaves::SubsetMask> rest;
      for (std::size_t k = 0; k < blocks.size(); ++k)
        if (k != bi) rest.push_back(blocks[k]);
      total += num / nonempty * prior(rest);
    }
    return total;
  }
};

}  // namespace test

#endif  // DEADLEAVES_TEST_UTIL_HPP
