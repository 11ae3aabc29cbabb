#ifndef DEADLEAVES_PRIOR_HPP
#define DEADLEAVES_PRIOR_HPP

#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "deadleaves/geometry.hpp"
#include "deadleaves/partitions.hpp"
#include "deadleaves/specfun.hpp"

namespace deadleaves {

// Unscaled leaf-probability masses for every non-empty subset of a pixel set,
// indexed by subset mask. "Unscaled" integrates the kernel 2 r^-3 and drops
// both 1/|B| and 1/(r_min^-2 - r_max^-2); only ratios enter the prior, so the
// convention cancels everywhere it is used.
struct LeafProbTable {
  int n = 0;
  std::vector<double> masses;   // size 1 << n, masses[0] = 0
  double nonempty_mass = 0.0;   // sum of all entries

  double mass(SubsetMask v) const { return masses[v]; }
};

namespace detail {

// Reduce a per-interval contribution into [0, period). The raw sum of
// b-differences is exact only up to integer multiples of
// period = 2 pi log(r_{l+1}/r_l) (full-circle angle ambiguity), and the true
// per-interval integral lies in [0, period). A value within rounding error of
// the period is a true zero that slipped negative, not a full disk: the
// full-disk regime never reaches this path (it has no relevant intersection
// points), so snap it down.
inline double reduce_mod_period(double x, double period) {
  double y = x - period * std::floor(x / period);
  if (y >= period) y -= period;
  const double guard = 1e-9 * std::max(1.0, std::abs(x) / period);
  if (period - y <= guard * period) y = 0.0;
  return y;
}

}  // namespace detail

// Builds the full table by iterating intersection points in the outer loop and
// scattering each b-difference into the (up to four) subsets it serves: the
// pixels strictly inside the circle around x_{ij+-} must belong to v, pixels
// strictly outside must not, and x_i, x_j are free. Per-interval sums are
// reduced modulo 2 pi log(r_{l+1}/r_l) before accumulation, and singleton
// subsets additionally receive the closed-form disk term
// 2 pi log(r_i*/r_min) for radii below their first critical radius.
inline LeafProbTable leaf_prob_table(const PixelSet& a, const RadiusLaw& law) {
  validate_pixel_set(a);
  validate_law(law);
  const int n = a.size();
  if (n > 20) throw std::invalid_argument("leaf_prob_table: pixel set too large");

  LeafProbTable table;
  table.n = n;
  table.masses.assign(std::size_t{1} << n, 0.0);

  // disk-only regime of each singleton, up to its first critical radius
  for (int i = 0; i < n; ++i) {
    double r_first = law.r_max;
    for (int j = 0; j < n; ++j)
      if (j != i) r_first = std::min(r_first, pair_critical_radius(a[i], a[j]));
    if (r_first > law.r_min)
      table.masses[SubsetMask{1} << i] += 2.0 * kPi * std::log(r_first / law.r_min);
  }

  const CriticalRadiusSchedule sched = critical_radius_schedule(a, law.r_min, law.r_max);

  std::vector<double> acc(std::size_t{1} << n, 0.0);
  std::vector<SubsetMask> touched;
  for (int l = 0; l < sched.intervals(); ++l) {
    const double r_lo = sched.lo(l), r_hi = sched.hi(l);
    const double r_mid = 0.5 * (r_lo + r_hi);
    const double period = 2.0 * kPi * std::log(r_hi / r_lo);
    touched.clear();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const double d = dist(a[i], a[j]);
        if (d >= 2.0 * r_mid) continue;  // no intersection in this interval
        const double alpha = alpha_angle(a[i], a[j]);
        const double beta_mid = beta_angle(d, r_mid);
        for (int sign : {+1, -1}) {
          const double t = alpha + sign * beta_mid;
          const Point2 ip{a[i].x + r_mid * std::cos(t), a[i].y + r_mid * std::sin(t)};
          SubsetMask base = 0;
          for (int k = 0; k < n; ++k) {
            if (k == i || k == j) continue;
            if (dist(ip, a[k]) < r_mid) base |= SubsetMask{1} << k;
          }
          const double db = antiderivative_b(r_hi, a[i], a[j], sign) -
                            antiderivative_b(r_lo, a[i], a[j], sign);
          for (int ii = 0; ii < 2; ++ii) {
            for (int jj = 0; jj < 2; ++jj) {
              SubsetMask v = base;
              if (ii) v |= SubsetMask{1} << i;
              if (jj) v |= SubsetMask{1} << j;
              if (v == 0) continue;  // empty leaf handled via the subset sum
              const int c = orientation_sign(ii != 0, jj != 0, sign);
              if (acc[v] == 0.0) touched.push_back(v);
              acc[v] += c * db;
            }
          }
        }
      }
    }
    for (SubsetMask v : touched) {
      table.masses[v] += detail::reduce_mod_period(acc[v], period);
      acc[v] = 0.0;
    }
  }

  double total = 0.0;
  for (std::size_t v = 1; v < table.masses.size(); ++v) {
    double& m = table.masses[v];
    if (m < 0.0) {
      if (m < -1e-12) throw std::runtime_error("leaf_prob_table: negative mass");
      m = 0.0;
    }
    total += m;
  }
  table.nonempty_mass = total;
  return table;
}

inline double nonempty_mass_for(const PixelSet& a, const LeafProbTable& table) {
  if ((std::size_t{1} << a.size()) != table.masses.size())
    throw std::invalid_argument("nonempty_mass_for: table does not match pixel set");
  double total = 0.0;
  for (std::size_t v = 1; v < table.masses.size(); ++v) total += table.masses[v];
  return total;
}

struct PriorResult {
  double value = 0.0;
  double log_value = kNegInf;
  bool ordered = false;
};

namespace detail {

struct PartitionKeyHash {
  std::size_t operator()(const std::vector<SubsetMask>& k) const {
    std::size_t h = 0x9e3779b97f4a7c15ull;
    for (SubsetMask b : k) h = (h ^ b) * 0x100000001b3ull;
    return h;
  }
};

inline double log_sum_exp(const std::vector<double>& xs) {
  double mx = kNegInf;
  for (double x : xs) mx = std::max(mx, x);
  if (mx == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - mx);
  return mx + std::log(s);
}

}  // namespace detail

// Memoized prior evaluation over a fixed pixel set and law. Leaf tables are
// cached per residual pixel mask, log-priors per canonical residual partition;
// both caches are shared across a full posterior sweep and are safe for
// concurrent use (insert-if-absent, identical values on race).
class PriorEngine {
 public:
  PriorEngine(PixelSet a, RadiusLaw law) : a_(std::move(a)), law_(law) {
    validate_pixel_set(a_);
    validate_law(law_);
    full_mask_ = (SubsetMask{1} << a_.size()) - 1u;
  }

  const PixelSet& pixels() const { return a_; }
  const RadiusLaw& law() const { return law_; }

  // table over the sub-pixel-set selected by `residual` (root-relative mask);
  // the returned table's masks are local to the popcount(residual) pixels in
  // ascending root order.
  std::shared_ptr<const LeafProbTable> table_for(SubsetMask residual) {
    {
      std::lock_guard<std::mutex> lock(table_mu_);
      auto it = tables_.find(residual);
      if (it != tables_.end()) return it->second;
    }
    PixelSet sub;
    for (int k = 0; k < a_.size(); ++k)
      if (residual >> k & 1u) sub.points.push_back(a_[k]);
    auto table = std::make_shared<const LeafProbTable>(leaf_prob_table(sub, law_));
    std::lock_guard<std::mutex> lock(table_mu_);
    return tables_.emplace(residual, std::move(table)).first->second;
  }

  // P(m) = prod_i P(L_i = v_i) / P(L_i != 0) over depth-ordered layers, each
  // layer's table built on the residual pixel set.
  double log_prior_ordered(const Partition& m) {
    validate_partition(m, full_mask_);
    SubsetMask residual = full_mask_;
    double lp = 0.0;
    for (SubsetMask v : m.blocks) {
      const auto table = table_for(residual);
      const double num = table->mass(to_local(v, residual));
      const double den = table->nonempty_mass;
      if (den <= 0.0) throw std::runtime_error("prior: zero non-empty mass");
      if (num <= 0.0) return kNegInf;
      lp += std::log(num) - std::log(den);
      residual &= ~v;
    }
    return lp;
  }

  // Unordered prior by the top-leaf recursion: sum over blocks v of
  // (P(L = v)/P(L != 0)) P(m \ v), memoized on the canonical residual
  // partition. log-space throughout. The empty partition is the recursion's
  // base case with probability 1.
  double log_prior_unordered(const Partition& m) {
    if (m.blocks.empty()) return 0.0;
    validate_partition(m, full_mask_);
    return log_prior_rec(canonicalize(m).blocks);
  }

  PriorResult prior_ordered(const Partition& m) {
    const double lp = log_prior_ordered(m);
    return {std::exp(lp), lp, true};
  }

  PriorResult prior_unordered(const Partition& m) {
    const double lp = log_prior_unordered(m);
    return {std::exp(lp), lp, false};
  }

 private:
  static SubsetMask to_local(SubsetMask v, SubsetMask residual) {
    SubsetMask local = 0;
    int bit = 0;
    for (SubsetMask m = residual; m != 0; m &= m - 1, ++bit) {
      const SubsetMask low = m & -m;
      if (v & low) local |= SubsetMask{1} << bit;
    }
    return local;
  }

  double log_prior_rec(const std::vector<SubsetMask>& blocks) {
    if (blocks.empty()) return 0.0;
    {
      std::lock_guard<std::mutex> lock(memo_mu_);
      auto it = memo_.find(blocks);
      if (it != memo_.end()) return it->second;
    }
    SubsetMask residual = 0;
    for (SubsetMask b : blocks) residual |= b;
    const auto table = table_for(residual);
    const double log_den = std::log(table->nonempty_mass);
    std::vector<double> terms;
    terms.reserve(blocks.size());
    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
      const double num = table->mass(to_local(blocks[bi], residual));
      if (num <= 0.0) continue;
      std::vector<SubsetMask> rest;
      rest.reserve(blocks.size() - 1);
      for (std::size_t k = 0; k < blocks.size(); ++k)
        if (k != bi) rest.push_back(blocks[k]);
      const double sub = log_prior_rec(rest);
      if (sub == kNegInf) continue;
      terms.push_back(std::log(num) - log_den + sub);
    }
    const double lp = detail::log_sum_exp(terms);
    std::lock_guard<std::mutex> lock(memo_mu_);
    memo_.emplace(blocks, lp);
    return lp;
  }

  PixelSet a_;
  RadiusLaw law_;
  SubsetMask full_mask_ = 0;
  std::mutex table_mu_;
  std::unordered_map<SubsetMask, std::shared_ptr<const LeafProbTable>> tables_;
  std::mutex memo_mu_;
  std::unordered_map<std::vector<SubsetMask>, double, detail::PartitionKeyHash> memo_;
};

// one-off conveniences
inline PriorResult prior_ordered(const PixelSet& a, const Partition& m, const RadiusLaw& law) {
  PriorEngine engine(a, law);
  return engine.prior_ordered(m);
}

inline PriorResult prior_unordered(const PixelSet& a, const Partition& m, const RadiusLaw& law) {
  PriorEngine engine(a, law);
  return engine.prior_unordered(m);
}

}  // namespace deadleaves

#endif  // DEADLEAVES_PRIOR_HPP
