#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "projfree/feasible_sets.hpp"
#include "projfree/numerics.hpp"
#include "projfree/random.hpp"

namespace projfree {

struct TabularDataset {
    Mat x;  ///< n x d features
    Vec y;  ///< n targets

    TabularDataset(Mat features, Vec targets);
    std::size_t n() const noexcept { return x.rows(); }
    std::size_t d() const noexcept { return x.cols(); }
};

struct ObservedEntry {
    std::size_t i;
    std::size_t j;
    double value;
};

/// Partially observed m x n matrix; entries carry distinct (i, j).
struct ObservedMatrix {
    std::size_t m;
    std::size_t n;
    std::vector<ObservedEntry> entries;

    ObservedMatrix(std::size_t rows, std::size_t cols, std::vector<ObservedEntry> obs);
};

enum class LossKind { Logistic, Quadratic, ObservedQuadratic, SquaredSigmoid, BiWeight };

/// How the intercept b enters the model.
///  None:        z_i = w^T x_i
///  Constrained: a constant-1 feature is appended; b is the last coordinate
///               of w and sits inside the constraint set.
///  Profiled:    quadratic loss only. b is minimized out exactly,
///               b = mean(y) - mean(x)^T w, which leaves least squares on
///               centered data over w alone.
enum class BiasMode { None, Constrained, Profiled };

const char* to_string(LossKind k) noexcept;

class Loss {
public:
    static Loss logistic(TabularDataset data, BiasMode bias = BiasMode::None);
    static Loss quadratic(TabularDataset data, BiasMode bias = BiasMode::None);
    static Loss squared_sigmoid(TabularDataset data, BiasMode bias = BiasMode::None);
    static Loss biweight(TabularDataset data, BiasMode bias = BiasMode::None);
    static Loss observed_quadratic(ObservedMatrix obs);

    LossKind kind() const noexcept { return kind_; }
    BiasMode bias() const noexcept { return bias_; }
    /// Length of the parameter vector (m*n for the matrix loss).
    std::size_t dim() const noexcept;
    /// N: data rows, or observed entries for the matrix loss.
    std::size_t num_samples() const noexcept;

    double eval(std::span<const double> w) const;
    Vec grad(std::span<const double> w) const;
    /// (N / |indices|) * sum of per-sample gradients. Indices are 0-based.
    Vec stochastic_grad(std::span<const double> w, std::span<const std::size_t> indices) const;

    /// Intercept implied by w (0 without a bias, w.back() when constrained).
    double intercept(std::span<const double> w) const;

    /// Quadratic: exact 2 * lambda_max(X^T X). Others: 1.5 times the largest
    /// observed gradient-difference ratio over random feasible pairs.
    double estimate_smoothness(const FeasibleSet& set, std::size_t trials, Rng& rng) const;

    /// Multiply-adds of one full gradient, for cost accounting.
    double grad_cost() const noexcept;

    /// Model matrix as seen by the loss (bias column appended or data centered).
    const TabularDataset* tabular() const noexcept { return tab_.get(); }
    const ObservedMatrix* observed() const noexcept { return obs_.get(); }

private:
    Loss(LossKind kind, BiasMode bias) : kind_(kind), bias_(bias) {}
    static Loss make_tabular(LossKind kind, TabularDataset data, BiasMode bias);
    void check(std::span<const double> w) const;
    // Adds scale * grad of sample i at margin z_i into g.
    void add_sample_grad(std::size_t i, double z, double scale, std::span<double> g) const;
    double sample_loss(std::size_t i, double z) const;

    LossKind kind_;
    BiasMode bias_;
    std::shared_ptr<const TabularDataset> tab_;
    std::shared_ptr<const ObservedMatrix> obs_;
    Vec x_mean_;  // Profiled only
    double y_mean_ = 0.0;
};

}  // namespace projfree
