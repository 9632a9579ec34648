#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <span>
#include <stdexcept>
#include <vector>

#include "pbqn/rng.hpp"
#include "pbqn/vector_ops.hpp"

namespace pbqn {

/// The index set S_k of the current batch, the subset S_v used for variance
/// estimates, and the overlap O_k shared with the next sample. Index
/// vectors are kept sorted so reductions over them have a canonical order.
struct BatchSample {
  std::vector<std::size_t> indices;
  std::vector<std::size_t> variance_subset;
  std::vector<std::size_t> overlap;

  std::size_t size() const { return indices.size(); }
};

struct BatchControllerConfig {
  double theta = 0.9;
  std::size_t initial_size = 512;
  std::size_t variance_subset_cap = 1024;
  std::size_t window_length = 10;
  double window_trigger_fraction = 0.01;  // engage the moving window below this |S|/N
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (theta <= 0.0) throw std::invalid_argument("theta must be positive");
    if (initial_size < 2) throw std::invalid_argument("initial batch size must be >= 2");
    if (variance_subset_cap < 2) {
      throw std::invalid_argument("variance subset cap must be >= 2");
    }
    if (window_length < 1) throw std::invalid_argument("window length must be >= 1");
  }
};

/// Sample variance of the inner-product scalars t_i = g_i . (H^2 g_S) about
/// the fixed center |H g_S|^2, with the (n - 1) divisor.
inline double ipqn_variance(std::span<const double> per_sample_scalars,
                            double batch_norm_sq) {
  if (per_sample_scalars.size() < 2) {
    throw std::invalid_argument("ipqn_variance needs at least two samples");
  }
  double sum = 0.0;
  for (double t : per_sample_scalars) {
    const double dev = t - batch_norm_sq;
    sum += dev * dev;
  }
  return sum / static_cast<double>(per_sample_scalars.size() - 1);
}

enum class IpqnOutcome { Pass, Fail, Converged };

/// Inner-product test: the current batch is adequate when
///   variance / |S| <= theta^2 |H g_S|^4.
/// A zero direction norm signals convergence rather than pass/fail.
inline IpqnOutcome ipqn_test(double variance, std::size_t batch_size, double hg_norm,
                             double theta) {
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (hg_norm < 0.0) throw std::invalid_argument("hg_norm must be >= 0");
  if (hg_norm == 0.0) return IpqnOutcome::Converged;
  const double hg2 = hg_norm * hg_norm;
  const double rhs = theta * theta * hg2 * hg2;
  return variance / static_cast<double>(batch_size) <= rhs ? IpqnOutcome::Pass
                                                           : IpqnOutcome::Fail;
}

/// Lower bound on the sample size that would pass the test with the same
/// statistics: ceil(variance / (theta^2 |H g_S|^4)), clamped to
/// [current + 1, population].
inline std::size_t next_batch_size(double variance, double hg_norm, double theta,
                                   std::size_t current_size, std::size_t population) {
  if (hg_norm <= 0.0) {
    throw std::invalid_argument("next_batch_size requires a nonzero direction");
  }
  const double hg2 = hg_norm * hg_norm;
  const double raw = std::ceil(variance / (theta * theta * hg2 * hg2));
  std::size_t target = population;
  if (raw < static_cast<double>(population)) {
    target = static_cast<std::size_t>(std::max(raw, 0.0));
  }
  target = std::max(target, current_size + 1);
  return std::min(target, population);
}

namespace detail {

inline std::vector<std::size_t> complement_of(std::span<const std::size_t> sorted,
                                              std::size_t population) {
  std::vector<std::size_t> out;
  out.reserve(population - sorted.size());
  std::size_t next = 0;
  for (std::size_t i = 0; i < population; ++i) {
    if (next < sorted.size() && sorted[next] == i) {
      ++next;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

}  // namespace detail

/// Uniform sample of `size` distinct indices from {0..population-1}.
inline BatchSample make_initial_sample(std::size_t size, std::size_t population,
                                       Rng& rng) {
  if (size < 1 || size > population) {
    throw std::invalid_argument("make_initial_sample: bad size");
  }
  BatchSample s;
  s.indices = sample_indices(population, size, rng);
  std::sort(s.indices.begin(), s.indices.end());
  return s;
}

/// Grow a sample to `target_size` by drawing uniformly without replacement
/// from the complement; existing indices are all retained. Returns the added
/// indices (sorted). A target at or below the current size is a no-op and
/// consumes no randomness.
inline std::vector<std::size_t> augment_sample(BatchSample& sample,
                                               std::size_t target_size,
                                               std::size_t population, Rng& rng) {
  target_size = std::min(target_size, population);
  if (target_size <= sample.size()) return {};
  auto added = sample_without_replacement(
      detail::complement_of(sample.indices, population), target_size - sample.size(),
      rng);
  std::sort(added.begin(), added.end());
  std::vector<std::size_t> merged;
  merged.reserve(target_size);
  std::merge(sample.indices.begin(), sample.indices.end(), added.begin(), added.end(),
             std::back_inserter(merged));
  sample.indices = std::move(merged);
  return added;
}

/// Construct the next sample with a prescribed overlap: round(fraction * size)
/// indices drawn uniformly from the previous sample (they constitute
/// O_k = S_k ∩ S_{k+1}), the remainder drawn from the complement of the
/// previous sample. O_k is recorded on both samples.
inline BatchSample make_overlap_sample(BatchSample& prev, std::size_t new_size,
                                       double overlap_fraction, std::size_t population,
                                       Rng& rng) {
  if (overlap_fraction <= 0.0 || overlap_fraction >= 1.0) {
    throw std::invalid_argument("overlap fraction must be in (0,1)");
  }
  new_size = std::min(std::max<std::size_t>(new_size, 1), population);
  std::size_t n_overlap = static_cast<std::size_t>(
      std::llround(overlap_fraction * static_cast<double>(new_size)));
  n_overlap = std::max<std::size_t>(n_overlap, 1);
  n_overlap = std::min(n_overlap, prev.size());
  // feasibility: the complement must supply the remainder
  const std::size_t complement_size = population - prev.size();
  if (new_size - n_overlap > complement_size) {
    n_overlap = new_size - complement_size;
  }

  auto overlap = sample_without_replacement(prev.indices, n_overlap, rng);
  std::sort(overlap.begin(), overlap.end());

  BatchSample next;
  if (new_size > n_overlap) {
    auto fresh = sample_without_replacement(
        detail::complement_of(prev.indices, population), new_size - n_overlap, rng);
    std::sort(fresh.begin(), fresh.end());
    next.indices.reserve(new_size);
    std::merge(overlap.begin(), overlap.end(), fresh.begin(), fresh.end(),
               std::back_inserter(next.indices));
  } else {
    next.indices = overlap;
  }
  next.overlap = overlap;
  prev.overlap = std::move(overlap);
  return next;
}

/// Choose S_v: the whole sample when it fits under the cap, otherwise a
/// uniform random subset of exactly cap indices.
inline void select_variance_subset(BatchSample& sample, std::size_t cap, Rng& rng) {
  if (sample.size() <= cap) {
    sample.variance_subset = sample.indices;
    return;
  }
  sample.variance_subset = sample_without_replacement(sample.indices, cap, rng);
  std::sort(sample.variance_subset.begin(), sample.variance_subset.end());
}

/// Ring of the most recent batch gradients; `mean` averages the stored
/// entries. Used as a stand-in gradient estimate inside the adequacy test
/// while batches are a tiny fraction of the data.
class GradientWindow {
 public:
  explicit GradientWindow(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("window capacity must be >= 1");
  }

  void push(const Vector& g) {
    if (entries_.size() == capacity_) entries_.pop_front();
    entries_.push_back(g);
  }

  std::size_t size() const { return entries_.size(); }

  Vector mean() const {
    if (entries_.empty()) throw std::logic_error("empty gradient window");
    Vector out(entries_.front().size(), 0.0);
    for (const Vector& g : entries_) axpy(1.0, g, out);
    scale(out, 1.0 / static_cast<double>(entries_.size()));
    return out;
  }

 private:
  std::size_t capacity_;
  std::deque<Vector> entries_;
};

}  // namespace pbqn
