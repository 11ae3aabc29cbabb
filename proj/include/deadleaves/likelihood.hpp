#ifndef DEADLEAVES_LIKELIHOOD_HPP
#define DEADLEAVES_LIKELIHOOD_HPP

#include <cmath>
#include <stdexcept>
#include <variant>
#include <vector>

#include "deadleaves/geometry.hpp"
#include "deadleaves/partitions.hpp"
#include "deadleaves/specfun.hpp"

namespace deadleaves {

// Discrete uniform color with per-channel texture offsets uniform on integer
// levels [-halfwidth, +halfwidth]; values live on the grid k/(levels-1).
struct UniformDiscreteModel {
  int color_levels = 256;
  int texture_halfwidth = 10;

  int texture_levels() const { return 2 * texture_halfwidth + 1; }
  double step() const { return 1.0 / (color_levels - 1); }
};

// Per-channel Gaussian base color N(mu_c, sigma_c^2) plus independent
// per-pixel texture N(0, sigma_t^2).
struct GaussianModel {
  std::vector<double> mu_c{0.5};
  std::vector<double> sigma_c{0.1};
  std::vector<double> sigma_t{0.05};
};

struct ColorTextureModel {
  std::variant<UniformDiscreteModel, GaussianModel> variant;
  int channels = 3;
};

inline void validate_model(const ColorTextureModel& model) {
  if (model.channels != 1 && model.channels != 3)
    throw std::invalid_argument("color model: channels must be 1 or 3");
  if (const auto* u = std::get_if<UniformDiscreteModel>(&model.variant)) {
    if (u->color_levels < 2 || u->color_levels > 65536)
      throw std::invalid_argument("uniform model: color_levels out of range");
    if (u->texture_halfwidth < 0)
      throw std::invalid_argument("uniform model: texture_halfwidth must be >= 0");
  } else {
    const auto& g = std::get<GaussianModel>(model.variant);
    const std::size_t c = static_cast<std::size_t>(model.channels);
    if (g.mu_c.size() != c || g.sigma_c.size() != c || g.sigma_t.size() != c)
      throw std::invalid_argument("gaussian model: per-channel parameter count mismatch");
    for (std::size_t k = 0; k < c; ++k)
      if (!(g.sigma_c[k] > 0.0) || !(g.sigma_t[k] > 0.0))
        throw std::invalid_argument("gaussian model: sigmas must be positive");
  }
}

// Image values restricted to a pixel set: values[p][c] for pixel index p.
struct ObservationWindow {
  PixelSet pixels;
  std::vector<std::vector<double>> values;
  int channels = 3;
};

inline void validate_window(const ObservationWindow& w) {
  validate_pixel_set(w.pixels);
  if (w.values.size() != w.pixels.points.size())
    throw std::invalid_argument("observation window: one value row per pixel required");
  for (const auto& row : w.values)
    if (static_cast<int>(row.size()) != w.channels)
      throw std::invalid_argument("observation window: channel count mismatch");
}

// Uniform color + uniform texture collapse to a constant: p_t^(|a| channels),
// independent of the partition. Values must sit on the model's level grid.
inline double log_likelihood_uniform(const ObservationWindow& w, const Partition& m,
                                     const UniformDiscreteModel& model) {
  validate_window(w);
  validate_partition(m, (SubsetMask{1} << w.pixels.size()) - 1u);
  const double step = model.step();
  // tolerance absorbs float32 image storage (well below half a level)
  const double tol = 1e-6 / step;
  for (const auto& row : w.values)
    for (double v : row) {
      const double k = v / step;
      if (std::abs(k - std::round(k)) > tol || v < -1e-6 || v > 1.0 + 1e-6)
        throw std::invalid_argument("log_likelihood_uniform: value not on the level grid");
    }
  return -static_cast<double>(w.pixels.size()) * w.channels *
         std::log(static_cast<double>(model.texture_levels()));
}

namespace detail {

// log N(d; 0, sigma_c^2 J + sigma_t^2 I) for one block and channel, via the
// Sherman-Morrison form: O(n) and stable for sigma_t << sigma_c.
inline double gaussian_block_channel(const std::vector<double>& dev, double sigma_c,
                                     double sigma_t) {
  const std::size_t n = dev.size();
  const double st2 = sigma_t * sigma_t, sc2 = sigma_c * sigma_c;
  const double denom = st2 + static_cast<double>(n) * sc2;
  const double log_det = (static_cast<double>(n) - 1.0) * std::log(st2) + std::log(denom);
  double sum = 0.0, sum2 = 0.0;
  for (double d : dev) {
    sum += d;
    sum2 += d * d;
  }
  const double quad = (sum2 - sc2 / denom * sum * sum) / st2;
  return -0.5 * (static_cast<double>(n) * std::log(2.0 * kPi) + log_det + quad);
}

inline double log_sum_exp_accum(double acc, double x) {
  if (acc == kNegInf) return x;
  if (x == kNegInf) return acc;
  const double mx = std::max(acc, x);
  return mx + std::log(std::exp(acc - mx) + std::exp(x - mx));
}

}  // namespace detail

// Per block and channel, pixel values are jointly normal with the
// rank-one-plus-diagonal covariance sigma_c^2 ones + sigma_t^2 I; channels
// independent. Returns the sum of block log-densities.
inline double log_likelihood_gaussian(const ObservationWindow& w, const Partition& m,
                                      const GaussianModel& model) {
  validate_window(w);
  validate_partition(m, (SubsetMask{1} << w.pixels.size()) - 1u);
  if (static_cast<int>(model.mu_c.size()) != w.channels)
    throw std::invalid_argument("log_likelihood_gaussian: channel mismatch");
  double total = 0.0;
  std::vector<double> dev;
  for (SubsetMask b : m.blocks) {
    for (int c = 0; c < w.channels; ++c) {
      dev.clear();
      for (int k = 0; k < w.pixels.size(); ++k)
        if (b >> k & 1u)
          dev.push_back(w.values[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)] -
                        model.mu_c[static_cast<std::size_t>(c)]);
      total += detail::gaussian_block_channel(dev, model.sigma_c[static_cast<std::size_t>(c)],
                                              model.sigma_t[static_cast<std::size_t>(c)]);
    }
  }
  return total;
}

inline double log_likelihood_gaussian_block(const ObservationWindow& w, SubsetMask block,
                                            const GaussianModel& model) {
  double total = 0.0;
  std::vector<double> dev;
  for (int c = 0; c < w.channels; ++c) {
    dev.clear();
    for (int k = 0; k < w.pixels.size(); ++k)
      if (block >> k & 1u)
        dev.push_back(w.values[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)] -
                      model.mu_c[static_cast<std::size_t>(c)]);
    total += detail::gaussian_block_channel(dev, model.sigma_c[static_cast<std::size_t>(c)],
                                            model.sigma_t[static_cast<std::size_t>(c)]);
  }
  return total;
}

// General discrete-color sum sum_c P_c(c) prod_j P_t(s_j - c) with independent
// channels, computed per channel in log space. Exact for up to 2^16 levels;
// the joint 256^3 sum over correlated channels stays out of scope.
inline double log_likelihood_discrete(const ObservationWindow& w, const Partition& m,
                                      const UniformDiscreteModel& model) {
  validate_window(w);
  validate_partition(m, (SubsetMask{1} << w.pixels.size()) - 1u);
  const double step = model.step();
  const double log_pc = -std::log(static_cast<double>(model.color_levels));
  const double log_pt = -std::log(static_cast<double>(model.texture_levels()));
  double total = 0.0;
  for (SubsetMask b : m.blocks) {
    for (int c = 0; c < w.channels; ++c) {
      // observed integer levels of this block/channel
      std::vector<long> lv;
      for (int k = 0; k < w.pixels.size(); ++k)
        if (b >> k & 1u) {
          const double v = w.values[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)];
          const double kk = v / step;
          if (std::abs(kk - std::round(kk)) > 1e-6 / step)
            throw std::invalid_argument("log_likelihood_discrete: value not on the level grid");
          lv.push_back(std::lround(kk));
        }
      double acc = kNegInf;
      for (long color = 0; color < model.color_levels; ++color) {
        bool feasible = true;
        for (long obs : lv)
          if (std::labs(obs - color) > model.texture_halfwidth) {
            feasible = false;
            break;
          }
        if (feasible)
          acc = detail::log_sum_exp_accum(
              acc, log_pc + static_cast<double>(lv.size()) * log_pt);
      }
      if (acc == kNegInf) return kNegInf;
      total += acc;
    }
  }
  return total;
}

inline double log_likelihood(const ObservationWindow& w, const Partition& m,
                             const ColorTextureModel& model) {
  if (const auto* u = std::get_if<UniformDiscreteModel>(&model.variant))
    return log_likelihood_uniform(w, m, *u);
  return log_likelihood_gaussian(w, m, std::get<GaussianModel>(model.variant));
}

}  // namespace deadleaves

#endif  // DEADLEAVES_LIKELIHOOD_HPP
