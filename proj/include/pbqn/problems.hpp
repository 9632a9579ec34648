#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pbqn/accounting.hpp"
#include "pbqn/data.hpp"
#include "pbqn/rng.hpp"
#include "pbqn/vector_ops.hpp"

namespace pbqn {

inline double sigmoid(double t) {
  if (t >= 0.0) {
    const double e = std::exp(-t);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(t);
  return e / (1.0 + e);
}

/// log(1 + exp(t)), overflow-safe.
inline double softplus(double t) {
  if (t > 0.0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}

/// A finite sum F(x) = (1/N) sum_i F_i(x) with component access. Instances
/// are immutable after construction and safe to share across threads; all
/// evaluation counting goes through the caller-supplied EvalCounters.
class FiniteSumProblem {
 public:
  virtual ~FiniteSumProblem() = default;

  virtual std::size_t num_components() const = 0;
  virtual std::size_t dimension() const = 0;

  virtual double component_value(std::size_t i, const Vector& x) const = 0;
  virtual void component_gradient(std::size_t i, const Vector& x, Vector& out) const = 0;

  Vector component_gradient(std::size_t i, const Vector& x) const {
    Vector out(dimension());
    component_gradient(i, x, out);
    return out;
  }

  /// Mean of component values over a batch; charges |S| component values.
  virtual double batch_value(std::span<const std::size_t> batch, const Vector& x,
                             EvalCounters& acct) const {
    check_batch(batch);
    acct.component_value_evals += batch.size();
    const double sum = detail_sum_values(batch, x);
    return sum / static_cast<double>(batch.size());
  }

  /// Mean of component gradients over a batch; charges |S| component
  /// gradients. Values are accumulated by a fixed pairwise reduction tree
  /// over the (sorted) batch, so the result does not depend on how the work
  /// is scheduled.
  virtual void batch_gradient(std::span<const std::size_t> batch, const Vector& x,
                              Vector& out, EvalCounters& acct) const {
    check_batch(batch);
    acct.component_grad_evals += batch.size();
    out.assign(dimension(), 0.0);
    Vector scratch(dimension());
    sum_gradients(batch, x, out, scratch);
    scale(out, 1.0 / static_cast<double>(batch.size()));
  }

  Vector batch_gradient(std::span<const std::size_t> batch, const Vector& x,
                        EvalCounters& acct) const {
    Vector out;
    batch_gradient(batch, x, out, acct);
    return out;
  }

  /// Gradient of the full mean; charges N component gradients.
  void full_gradient(const Vector& x, Vector& out, EvalCounters& acct) const {
    std::vector<std::size_t> all(num_components());
    std::iota(all.begin(), all.end(), std::size_t{0});
    batch_gradient(all, x, out, acct);
  }

  Vector full_gradient(const Vector& x, EvalCounters& acct) const {
    Vector out;
    full_gradient(x, out, acct);
    return out;
  }

  double full_value(const Vector& x, EvalCounters& acct) const {
    std::vector<std::size_t> all(num_components());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return batch_value(all, x, acct);
  }

 protected:
  void check_batch(std::span<const std::size_t> batch) const {
    if (batch.empty()) throw std::invalid_argument("batch must be nonempty");
    for (std::size_t i : batch) {
      if (i >= num_components()) {
        throw std::out_of_range("component index out of range");
      }
    }
  }

  // Pairwise tree with a small sequential leaf; the tree shape is a function
  // of the index range only.
  void sum_gradients(std::span<const std::size_t> batch, const Vector& x,
                     Vector& sum, Vector& scratch) const {
    constexpr std::size_t kLeaf = 32;
    if (batch.size() <= kLeaf) {
      for (std::size_t i : batch) {
        component_gradient(i, x, scratch);
        axpy(1.0, scratch, sum);
      }
      return;
    }
    const std::size_t half = batch.size() / 2;
    sum_gradients(batch.first(half), x, sum, scratch);
    Vector right(dimension(), 0.0);
    sum_gradients(batch.subspan(half), x, right, scratch);
    axpy(1.0, right, sum);
  }

  double detail_sum_values(std::span<const std::size_t> batch, const Vector& x) const {
    constexpr std::size_t kLeaf = 32;
    if (batch.size() <= kLeaf) {
      double s = 0.0;
      for (std::size_t i : batch) s += component_value(i, x);
      return s;
    }
    const std::size_t half = batch.size() / 2;
    return detail_sum_values(batch.first(half), x) +
           detail_sum_values(batch.subspan(half), x);
  }
};

/// l2-regularized logistic regression over sparse rows:
///   F_i(x) = log(1 + exp(-z_i x.y_i)) + (lambda/2) |x|^2,
/// so the full mean keeps the same regularizer. lambda defaults to 1/N.
class LogisticProblem final : public FiniteSumProblem {
 public:
  explicit LogisticProblem(SparseDataset data,
                           std::optional<double> lambda = std::nullopt,
                           std::optional<std::size_t> dim_override = std::nullopt)
      : data_(std::move(data)),
        dim_(dim_override.value_or(data_.dim)),
        lambda_(lambda.value_or(1.0 / static_cast<double>(data_.size()))) {
    if (data_.rows.empty()) throw std::invalid_argument("empty dataset");
    if (dim_ < data_.dim) throw std::invalid_argument("dim_override too small");
  }

  std::size_t num_components() const override { return data_.size(); }
  std::size_t dimension() const override { return dim_; }
  double lambda() const { return lambda_; }
  const SparseDataset& dataset() const { return data_; }

  double margin(std::size_t i, const Vector& x) const {
    return static_cast<double>(data_.labels[i]) * sparse_dot(data_.rows[i], x);
  }

  double component_value(std::size_t i, const Vector& x) const override {
    return softplus(-margin(i, x)) + 0.5 * lambda_ * norm_sq(x);
  }

  void component_gradient(std::size_t i, const Vector& x, Vector& out) const override {
    out.assign(dim_, 0.0);
    axpy(lambda_, x, out);
    const double coef =
        -sigmoid(-margin(i, x)) * static_cast<double>(data_.labels[i]);
    sparse_axpy(coef, data_.rows[i], out);
  }

  // Sparse specializations: only the loss parts vary per component, so the
  // batch mean is a sparse accumulation plus one shared regularizer term.
  double batch_value(std::span<const std::size_t> batch, const Vector& x,
                     EvalCounters& acct) const override {
    check_batch(batch);
    acct.component_value_evals += batch.size();
    const double loss = sum_losses(batch, x);
    return loss / static_cast<double>(batch.size()) + 0.5 * lambda_ * norm_sq(x);
  }

  void batch_gradient(std::span<const std::size_t> batch, const Vector& x,
                      Vector& out, EvalCounters& acct) const override {
    check_batch(batch);
    acct.component_grad_evals += batch.size();
    out.assign(dim_, 0.0);
    sum_loss_gradients(batch, x, out);
    scale(out, 1.0 / static_cast<double>(batch.size()));
    axpy(lambda_, x, out);
  }

 private:
  double sum_losses(std::span<const std::size_t> batch, const Vector& x) const {
    constexpr std::size_t kLeaf = 32;
    if (batch.size() <= kLeaf) {
      double s = 0.0;
      for (std::size_t i : batch) s += softplus(-margin(i, x));
      return s;
    }
    const std::size_t half = batch.size() / 2;
    return sum_losses(batch.first(half), x) + sum_losses(batch.subspan(half), x);
  }

  void sum_loss_gradients(std::span<const std::size_t> batch, const Vector& x,
                          Vector& sum) const {
    constexpr std::size_t kLeaf = 32;
    if (batch.size() <= kLeaf) {
      for (std::size_t i : batch) {
        const double coef =
            -sigmoid(-margin(i, x)) * static_cast<double>(data_.labels[i]);
        sparse_axpy(coef, data_.rows[i], sum);
      }
      return;
    }
    const std::size_t half = batch.size() / 2;
    sum_loss_gradients(batch.first(half), x, sum);
    Vector right(dim_, 0.0);
    sum_loss_gradients(batch.subspan(half), x, right);
    axpy(1.0, right, sum);
  }

  SparseDataset data_;
  std::size_t dim_;
  double lambda_;
};

/// Strongly convex diagonal quadratic sum:
///   F_i(x) = (1/2) x.diag(d_i).x - b_i.x
/// with mean Hessian spectrum inside [mu, L] and analytically known
/// minimizer. Per-component diagonals stay PSD while their mean is exact.
class QuadraticProblem final : public FiniteSumProblem {
 public:
  QuadraticProblem(std::vector<Vector> diagonals, std::vector<Vector> linears)
      : diagonals_(std::move(diagonals)), linears_(std::move(linears)) {
    if (diagonals_.empty() || diagonals_.size() != linears_.size()) {
      throw std::invalid_argument("quadratic: bad component arrays");
    }
    const std::size_t d = diagonals_[0].size();
    mean_diag_.assign(d, 0.0);
    mean_lin_.assign(d, 0.0);
    for (std::size_t i = 0; i < diagonals_.size(); ++i) {
      if (diagonals_[i].size() != d || linears_[i].size() != d) {
        throw std::invalid_argument("quadratic: inconsistent dimensions");
      }
      for (std::size_t j = 0; j < d; ++j) {
        if (diagonals_[i][j] < 0.0) {
          throw std::invalid_argument("quadratic: component diagonal not PSD");
        }
        mean_diag_[j] += diagonals_[i][j];
        mean_lin_[j] += linears_[i][j];
      }
    }
    const double inv_n = 1.0 / static_cast<double>(diagonals_.size());
    scale(mean_diag_, inv_n);
    scale(mean_lin_, inv_n);
    mu_ = mean_diag_[0];
    smoothness_ = mean_diag_[0];
    for (double v : mean_diag_) {
      mu_ = std::min(mu_, v);
      smoothness_ = std::max(smoothness_, v);
    }
    if (mu_ <= 0.0) throw std::invalid_argument("quadratic: mean Hessian not PD");
    x_star_.resize(d);
    f_star_ = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      x_star_[j] = mean_lin_[j] / mean_diag_[j];
      f_star_ -= 0.5 * mean_lin_[j] * mean_lin_[j] / mean_diag_[j];
    }
  }

  /// N components in R^d whose mean Hessian has spectrum exactly spanning
  /// [mu, L]. `spread` in [0,1) controls per-component variation; paired
  /// perturbations keep the mean exact and every component PSD.
  static QuadraticProblem random_diagonal(std::size_t n, std::size_t d, double mu,
                                          double smoothness, std::uint64_t seed,
                                          double spread = 0.5,
                                          double linear_noise = 0.5) {
    if (n < 1 || d < 1 || mu <= 0.0 || smoothness < mu || spread < 0.0 ||
        spread >= 1.0) {
      throw std::invalid_argument("random_diagonal: bad arguments");
    }
    Rng rng(seed);
    Vector base(d);
    for (std::size_t j = 0; j < d; ++j) {
      base[j] = d == 1 ? smoothness
                       : smoothness + (mu - smoothness) * static_cast<double>(j) /
                             static_cast<double>(d - 1);
    }
    Vector mean_lin(d);
    for (double& v : mean_lin) v = normal_sample(rng);

    std::vector<Vector> diagonals(n, Vector(d));
    std::vector<Vector> linears(n, Vector(d));
    const std::size_t half = n / 2;
    for (std::size_t i = 0; i < half; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        const double f = spread * (2.0 * uniform_double(rng) - 1.0);
        diagonals[i][j] = base[j] * (1.0 + f);
        diagonals[i + half][j] = base[j] * (1.0 - f);
        const double e = linear_noise * normal_sample(rng);
        linears[i][j] = mean_lin[j] + e;
        linears[i + half][j] = mean_lin[j] - e;
      }
    }
    if (n % 2 == 1) {
      diagonals[n - 1] = base;
      linears[n - 1] = mean_lin;
    }
    return QuadraticProblem(std::move(diagonals), std::move(linears));
  }

  std::size_t num_components() const override { return diagonals_.size(); }
  std::size_t dimension() const override { return mean_diag_.size(); }

  double component_value(std::size_t i, const Vector& x) const override {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      s += 0.5 * diagonals_[i][j] * x[j] * x[j] - linears_[i][j] * x[j];
    }
    return s;
  }

  void component_gradient(std::size_t i, const Vector& x, Vector& out) const override {
    out.resize(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
      out[j] = diagonals_[i][j] * x[j] - linears_[i][j];
    }
  }

  const Vector& x_star() const { return x_star_; }
  double f_star() const { return f_star_; }
  double strong_convexity() const { return mu_; }
  double smoothness() const { return smoothness_; }

 private:
  std::vector<Vector> diagonals_;
  std::vector<Vector> linears_;
  Vector mean_diag_;
  Vector mean_lin_;
  Vector x_star_;
  double mu_ = 0.0;
  double smoothness_ = 0.0;
  double f_star_ = 0.0;
};

/// Linearly separable synthetic classification data: two Gaussian clouds on
/// either side of a random unit normal, with a guaranteed margin.
inline SparseDataset make_synthetic_logistic_dataset(std::size_t n, std::size_t d,
                                                     std::uint64_t seed,
                                                     double margin = 1.0) {
  if (n < 2 || d < 1) {
    throw std::invalid_argument("synthetic dataset needs n >= 2, d >= 1");
  }
  Rng rng(seed);
  Vector normal_dir(d);
  for (double& v : normal_dir) v = normal_sample(rng);
  const double nn = norm(normal_dir);
  for (double& v : normal_dir) v /= nn;

  SparseDataset ds;
  ds.name = "synthetic-logistic";
  ds.dim = d;
  ds.rows.resize(n);
  ds.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = i % 2 == 0 ? +1 : -1;
    Vector point(d);
    for (double& v : point) v = normal_sample(rng);
    // project out the normal component, then place the point at a offset of
    // at least `margin` on the label's side
    const double along = dot(point, normal_dir);
    axpy(-along, normal_dir, point);
    const double offset = margin * (1.0 + uniform_double(rng));
    axpy(static_cast<double>(label) * offset, normal_dir, point);

    SparseRow row;
    row.indices.resize(d);
    std::iota(row.indices.begin(), row.indices.end(), std::uint32_t{0});
    row.values = std::move(point);
    ds.rows[i] = std::move(row);
    ds.labels[i] = label;
  }
  return ds;
}

}  // namespace pbqn
