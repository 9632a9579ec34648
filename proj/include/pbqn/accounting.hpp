#pragma once

#include <cstdint>

namespace pbqn {

/// Per-run evaluation accounting, passed explicitly to every evaluation so
/// that independent runs never share counters. Component-gradient and
/// component-value work are tracked separately: the cost axis of a run is
/// gradient work, while line searches consume only function values.
struct EvalCounters {
  std::uint64_t component_grad_evals = 0;
  std::uint64_t component_value_evals = 0;

  /// Gradient work in units of full passes over an N-component sum.
  double full_gradient_equivalents(std::size_t n) const {
    return static_cast<double>(component_grad_evals) / static_cast<double>(n);
  }
};

}  // namespace pbqn
