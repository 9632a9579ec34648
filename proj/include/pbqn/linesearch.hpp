#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>

#include "pbqn/problems.hpp"
#include "pbqn/vector_ops.hpp"

namespace pbqn {

struct LineSearchConfig {
  double c1 = 1e-4;
  int max_halvings = 30;
  double alpha_cap = 1.0;

  void validate() const {
    if (c1 <= 0.0 || c1 >= 1.0) throw std::invalid_argument("c1 must be in (0,1)");
    if (max_halvings < 1) throw std::invalid_argument("max_halvings must be >= 1");
    if (alpha_cap <= 0.0) throw std::invalid_argument("alpha_cap must be positive");
  }
};

struct LineSearchOutcome {
  double alpha = 0.0;
  int halvings = 0;
  std::uint64_t value_evals = 0;  // batch_value calls, including the base point
  bool satisfied = false;
  double f_initial = 0.0;
  double f_trial = 0.0;  // value at the returned point
};

/// Variance-informed first trial steplength:
///   (1 + Var{g_i} / (|S| |g|^2))^-1, always in (0, 1].
inline double initial_steplength(double grad_variance, std::size_t batch_size,
                                 double grad_norm_sq) {
  if (grad_norm_sq <= 0.0) {
    throw std::invalid_argument("initial_steplength requires a nonzero gradient");
  }
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (grad_variance < 0.0) throw std::invalid_argument("variance must be >= 0");
  return 1.0 /
         (1.0 + grad_variance /
                    (static_cast<double>(batch_size) * grad_norm_sq));
}

/// Sample variance of gradients about the batch mean with the (n-1) divisor:
///   (1/(n-1)) sum_i |g_i - g_S|^2.
inline double gradient_variance(std::span<const Vector> per_sample_gradients,
                                const Vector& batch_gradient) {
  if (per_sample_gradients.size() < 2) {
    throw std::invalid_argument("gradient_variance needs at least two samples");
  }
  double sum = 0.0;
  for (const Vector& g : per_sample_gradients) {
    double dev = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double e = g[j] - batch_gradient[j];
      dev += e * e;
    }
    sum += dev;
  }
  return sum / static_cast<double>(per_sample_gradients.size() - 1);
}

/// Backtracking search for the batch Armijo condition
///   F_S(x + a p) <= F_S(x) - c1 a g.(H g)        with g.(H g) = -g.p,
/// halving from alpha0. If no trial within max_halvings satisfies it, the
/// final trial point is returned with satisfied = false. Non-finite trial
/// values count as failed trials. Requires p = -H g.
inline LineSearchOutcome armijo_backtrack(const FiniteSumProblem& problem,
                                          std::span<const std::size_t> batch,
                                          const Vector& x, const Vector& direction,
                                          const Vector& batch_grad, double alpha0,
                                          const LineSearchConfig& config,
                                          EvalCounters& acct) {
  config.validate();
  if (!(alpha0 > 0.0)) throw std::invalid_argument("alpha0 must be positive");
  alpha0 = std::min(alpha0, config.alpha_cap);
  const double decrease = -dot(batch_grad, direction);  // g.(H g) >= 0 for PD H

  LineSearchOutcome out;
  out.f_initial = problem.batch_value(batch, x, acct);
  out.value_evals = 1;

  double alpha = alpha0;
  Vector trial(x.size());
  for (int h = 0; h <= config.max_halvings; ++h) {
    trial = x;
    axpy(alpha, direction, trial);
    const double f = problem.batch_value(batch, trial, acct);
    ++out.value_evals;
    out.alpha = alpha;
    out.halvings = h;
    out.f_trial = f;
    if (std::isfinite(f) && f <= out.f_initial - config.c1 * alpha * decrease) {
      out.satisfied = true;
      return out;
    }
    if (h == config.max_halvings) break;
    alpha *= 0.5;
  }
  out.satisfied = false;
  return out;
}

}  // namespace pbqn
