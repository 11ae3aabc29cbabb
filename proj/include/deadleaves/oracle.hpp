#ifndef DEADLEAVES_ORACLE_HPP
#define DEADLEAVES_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "deadleaves/partitions.hpp"
#include "deadleaves/prior.hpp"
#include "deadleaves/rng.hpp"
#include "deadleaves/specfun.hpp"

namespace deadleaves {

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;  // 0 for deterministic grid estimates
  std::uint64_t n_samples = 0;
};

// the constant dropped by the unscaled-mass convention; multiply an unscaled
// mass by this to obtain the true (scaled) probability
inline double mass_scale_factor(const RadiusLaw& law) {
  return 1.0 / (law.area_B() * law.inv_sq_span());
}

namespace detail {

struct Frame {
  double lo = 0.0, hi = 0.0;
};

// MC positions are uniform on B = [-r_max, s+r_max]^2 with s covering the
// pixel set; law.s is widened if the pixels stick out.
inline Frame mc_frame(const PixelSet& a, RadiusLaw& law) {
  double extent = law.s;
  for (const Point2& p : a.points) {
    if (p.x < -kGeomEps || p.y < -kGeomEps)
      throw std::invalid_argument("oracle: pixels must lie in the first quadrant");
    extent = std::max({extent, p.x, p.y});
  }
  law.s = extent;
  return {-law.r_max, extent + law.r_max};
}

inline constexpr std::uint64_t kChunk = 1 << 16;

}  // namespace detail

// the law with its frame widened to cover the pixel set, i.e. the exact frame
// the estimators sample positions from; needed when scaling analytic masses
// for comparison
inline RadiusLaw framed_law(const PixelSet& a, RadiusLaw law) {
  detail::mc_frame(a, law);
  return law;
}

// Unconditional estimate of the scaled leaf probability P(L_a = v) by sampling
// (r, p) from f_X x Uniform(B). Chunked rng streams derived from (seed, chunk)
// make the result a function of the seed alone.
inline Estimate mc_leaf_probability(const PixelSet& a, SubsetMask v, RadiusLaw law,
                                    std::uint64_t n, std::uint64_t seed) {
  validate_pixel_set(a);
  validate_law(law);
  if (n < 1) throw std::invalid_argument("mc_leaf_probability: need n >= 1");
  const detail::Frame fr = detail::mc_frame(a, law);
  std::uint64_t hits = 0;
  for (std::uint64_t done = 0, chunk = 0; done < n; ++chunk) {
    const std::uint64_t m = std::min(detail::kChunk, n - done);
    Rng rng(derive_stream(seed, chunk));
    for (std::uint64_t t = 0; t < m; ++t) {
      const double r = power_law_sample(law, rng);
      const Point2 p{rng.uniform(fr.lo, fr.hi), rng.uniform(fr.lo, fr.hi)};
      const double r2 = r * r;
      SubsetMask got = 0;
      for (int k = 0; k < a.size(); ++k)
        if (dist2(p, a[k]) <= r2) got |= SubsetMask{1} << k;
      hits += got == v;
    }
    done += m;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n)), n};
}

// Deterministic Riemann-sum estimate of all scaled leaf probabilities at once:
// positions on a pos_res^2 midpoint grid over B, radii on a geometric grid
// weighted by the exact per-cell integral of f_X (the r^-3 density concentrates
// near r_min, so uniform radius spacing would waste resolution).
struct GridLeafTable {
  int n = 0;
  std::vector<double> probs;  // scaled, indexed by subset mask; [0] = empty
};

inline GridLeafTable grid_leaf_table(const PixelSet& a, RadiusLaw law, int pos_res, int rad_res) {
  validate_pixel_set(a);
  validate_law(law);
  if (pos_res < 2 || rad_res < 2) throw std::invalid_argument("grid oracle: resolutions >= 2");
  const detail::Frame fr = detail::mc_frame(a, law);
  const int n = a.size();
  GridLeafTable out;
  out.n = n;
  out.probs.assign(std::size_t{1} << n, 0.0);

  const double cell = (fr.hi - fr.lo) / pos_res;
  const double cell_frac = cell * cell / law.area_B();
  std::vector<double> dist2_grid(static_cast<std::size_t>(pos_res) * pos_res *
                                 static_cast<std::size_t>(n));
  for (int iy = 0; iy < pos_res; ++iy)
    for (int ix = 0; ix < pos_res; ++ix) {
      const Point2 p{fr.lo + (ix + 0.5) * cell, fr.lo + (iy + 0.5) * cell};
      const std::size_t at = (static_cast<std::size_t>(iy) * pos_res + ix) * n;
      for (int k = 0; k < n; ++k) dist2_grid[at + k] = dist2(p, a[k]);
    }

  const double ratio = std::pow(law.r_max / law.r_min, 1.0 / rad_res);
  std::vector<double> hist(std::size_t{1} << n);
  for (int m = 0; m < rad_res; ++m) {
    const double r_lo = law.r_min * std::pow(ratio, m);
    const double r_hi = law.r_min * std::pow(ratio, m + 1);
    const double w = power_law_cdf(r_hi, law) - power_law_cdf(r_lo, law);
    const double r = std::sqrt(r_lo * r_hi);  // geometric midpoint
    const double r2 = r * r;
    std::fill(hist.begin(), hist.end(), 0.0);
    const std::size_t cells = static_cast<std::size_t>(pos_res) * pos_res;
    for (std::size_t cidx = 0; cidx < cells; ++cidx) {
      const double* d2 = &dist2_grid[cidx * n];
      SubsetMask got = 0;
      for (int k = 0; k < n; ++k)
        if (d2[k] <= r2) got |= SubsetMask{1} << k;
      hist[got] += 1.0;
    }
    for (std::size_t v = 0; v < hist.size(); ++v)
      out.probs[v] += w * hist[v] * cell_frac;
  }
  return out;
}

inline Estimate grid_leaf_probability(const PixelSet& a, SubsetMask v, const RadiusLaw& law,
                                      int pos_res, int rad_res) {
  const GridLeafTable table = grid_leaf_table(a, law, pos_res, rad_res);
  return {table.probs[v], 0.0, static_cast<std::uint64_t>(pos_res) * pos_res * rad_res};
}

// Unordered partition prior estimated by simulating the full leaf process
// restricted to a: each run stacks leaves until every pixel is covered and the
// induced partition (pixels claimed by first covering leaf, empties dropped)
// is compared against the canonical target.
inline Estimate mc_partition_prior(const PixelSet& a, const Partition& m, RadiusLaw law,
                                   std::uint64_t n, std::uint64_t seed) {
  validate_pixel_set(a);
  validate_law(law);
  validate_partition(m, (SubsetMask{1} << a.size()) - 1u);
  if (n < 1) throw std::invalid_argument("mc_partition_prior: need n >= 1");
  const detail::Frame fr = detail::mc_frame(a, law);
  const Partition target = canonicalize(m);
  const SubsetMask full = (SubsetMask{1} << a.size()) - 1u;

  std::uint64_t hits = 0;
  Partition run;
  for (std::uint64_t done = 0, chunk = 0; done < n; ++chunk) {
    const std::uint64_t batch = std::min(detail::kChunk, n - done);
    Rng rng(derive_stream(seed, chunk));
    for (std::uint64_t t = 0; t < batch; ++t) {
      SubsetMask covered = 0;
      run.blocks.clear();
      while (covered != full) {
        const double r = power_law_sample(law, rng);
        const Point2 p{rng.uniform(fr.lo, fr.hi), rng.uniform(fr.lo, fr.hi)};
        const double r2 = r * r;
        SubsetMask blk = 0;
        for (int k = 0; k < a.size(); ++k)
          if (!(covered >> k & 1u) && dist2(p, a[k]) <= r2) blk |= SubsetMask{1} << k;
        if (blk) {
          run.blocks.push_back(blk);
          covered |= blk;
        }
      }
      hits += canonicalize(run).blocks == target.blocks;
    }
    done += batch;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n)), n};
}

// first-order delta-method standard error for the ratio x/y of two estimates
// with independent errors
inline double ratio_std_error(const Estimate& x, const Estimate& y) {
  if (y.value == 0.0) return std::numeric_limits<double>::infinity();
  const double r = x.value / y.value;
  const double rx = x.value != 0.0 ? x.std_error / x.value : 0.0;
  const double ry = y.std_error / y.value;
  return std::abs(r) * std::sqrt(rx * rx + ry * ry);
}

}  // namespace deadleaves

#endif  // DEADLEAVES_ORACLE_HPP
