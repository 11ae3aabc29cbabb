#ifndef DEADLEAVES_OBSERVER_HPP
#define DEADLEAVES_OBSERVER_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

#include "deadleaves/likelihood.hpp"
#include "deadleaves/partitions.hpp"
#include "deadleaves/prior.hpp"

namespace deadleaves {

struct PosteriorRecord {
  Partition partition;  // canonical
  double log_prior = kNegInf;
  double log_likelihood = 0.0;
  double log_posterior_unnorm = kNegInf;
  double posterior = 0.0;
  bool tie = false;
};

struct SweepOptions {
  int cap = PartitionEnumerator::kDefaultCap;
  int threads = 1;
  // keep at most this many records in memory (highest posterior first); the
  // normalizer and count always cover the full enumeration
  std::size_t max_records = SIZE_MAX;
};

struct SweepResult {
  std::vector<PosteriorRecord> records;  // sorted by descending posterior
  double log_normalizer = kNegInf;
  std::uint64_t n_partitions = 0;
  bool truncated = false;
};

namespace detail {

// fixed work-chunk decomposition by RGS prefix; results are combined in chunk
// order so numbers do not depend on the worker count
inline std::vector<std::vector<int>> sweep_chunks(int n) {
  const int prefix_len = std::min(n, 4);
  return PartitionEnumerator::prefixes(n, prefix_len);
}

}  // namespace detail

// Exact posterior over every partition of the window's pixel set:
// log posterior = log prior + log likelihood, normalized by log-sum-exp over
// the exhaustive enumeration. Two passes: the first accumulates the
// normalizer, the second emits normalized records (streamed to `sink` when
// given), so memory stays bounded when Bell(n) records would not fit.
inline SweepResult posterior_sweep(
    const ObservationWindow& w, const RadiusLaw& law, const ColorTextureModel& model,
    const SweepOptions& opts = {},
    const std::function<void(const PosteriorRecord&)>& sink = nullptr) {
  validate_window(w);
  validate_model(model);
  const int n = w.pixels.size();
  {
    PartitionEnumerator probe(n, opts.cap);  // throws past the cap, with the projected count
  }

  PriorEngine engine(w.pixels, law);
  const auto chunks = detail::sweep_chunks(n);

  struct ChunkStat {
    double max_lp = kNegInf;
    double sum_exp = 0.0;  // sum of exp(lp - max_lp)
    std::uint64_t count = 0;
  };
  std::vector<ChunkStat> stats(chunks.size());

  const auto eval = [&](const Partition& m, double& prior, double& lik) {
    prior = engine.log_prior_unordered(m);
    lik = log_likelihood(w, m, model);
    double lp = prior + lik;
    if (std::isnan(lp)) lp = kNegInf;
    return lp;
  };

  const auto run_pass1 = [&](std::size_t c) {
    PartitionEnumerator en(n, chunks[c], opts.cap);
    Partition m;
    ChunkStat st;
    std::vector<double> lps;
    while (en.next(m)) {
      double prior, lik;
      const double lp = eval(m, prior, lik);
      ++st.count;
      st.max_lp = std::max(st.max_lp, lp);
      lps.push_back(lp);
    }
    for (double lp : lps)
      if (lp != kNegInf) st.sum_exp += std::exp(lp - st.max_lp);
    stats[c] = st;
  };

  const int workers = std::max(1, opts.threads);
  if (workers == 1) {
    for (std::size_t c = 0; c < chunks.size(); ++c) run_pass1(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t)
      pool.emplace_back([&] {
        for (std::size_t c; (c = next.fetch_add(1)) < chunks.size();) run_pass1(c);
      });
    for (auto& th : pool) th.join();
  }

  SweepResult out;
  double max_lp = kNegInf;
  for (const auto& st : stats) max_lp = std::max(max_lp, st.max_lp);
  double sum = 0.0;
  for (const auto& st : stats) {
    out.n_partitions += st.count;
    if (st.max_lp != kNegInf) sum += st.sum_exp * std::exp(st.max_lp - max_lp);
  }
  out.log_normalizer = max_lp + std::log(sum);

  // pass 2: emit normalized records in enumeration order (priors and tables
  // are memoized now, so this pass is cheap)
  const bool bounded = opts.max_records != SIZE_MAX;
  for (std::size_t c = 0; c < chunks.size(); ++c) {
    PartitionEnumerator en(n, chunks[c], opts.cap);
    Partition m;
    while (en.next(m)) {
      PosteriorRecord rec;
      const double lp = eval(m, rec.log_prior, rec.log_likelihood);
      rec.partition = m;
      rec.log_posterior_unnorm = lp;
      rec.posterior = lp == kNegInf ? 0.0 : std::exp(lp - out.log_normalizer);
      if (sink) sink(rec);
      out.records.push_back(std::move(rec));
      if (bounded && out.records.size() >= 2 * opts.max_records) {
        std::stable_sort(out.records.begin(), out.records.end(),
                         [](const PosteriorRecord& p, const PosteriorRecord& q) {
                           return p.log_posterior_unnorm > q.log_posterior_unnorm;
                         });
        out.records.resize(opts.max_records);
        out.truncated = true;
      }
    }
  }
  if (bounded && out.records.size() > opts.max_records) {
    std::stable_sort(out.records.begin(), out.records.end(),
                     [](const PosteriorRecord& p, const PosteriorRecord& q) {
                       return p.log_posterior_unnorm > q.log_posterior_unnorm;
                     });
    out.records.resize(opts.max_records);
    out.truncated = true;
  }

  std::stable_sort(out.records.begin(), out.records.end(),
                   [](const PosteriorRecord& p, const PosteriorRecord& q) {
                     return p.log_posterior_unnorm > q.log_posterior_unnorm;
                   });
  // flag exact ties with the neighbour; canonical enumeration order wins
  for (std::size_t i = 0; i + 1 < out.records.size(); ++i)
    if (out.records[i].log_posterior_unnorm == out.records[i + 1].log_posterior_unnorm &&
        out.records[i].log_posterior_unnorm != kNegInf) {
      out.records[i].tie = true;
      out.records[i + 1].tie = true;
    }
  return out;
}

inline const PosteriorRecord& map_partition(const SweepResult& result) {
  if (result.records.empty()) throw std::invalid_argument("map_partition: no records");
  return result.records.front();
}

inline std::vector<PosteriorRecord> top_k(const SweepResult& result, std::size_t k) {
  if (k < 1) throw std::invalid_argument("top_k: need k >= 1");
  const std::size_t m = std::min(k, result.records.size());
  return {result.records.begin(), result.records.begin() + static_cast<std::ptrdiff_t>(m)};
}

}  // namespace deadleaves

#endif  // DEADLEAVES_OBSERVER_HPP
