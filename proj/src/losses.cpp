#include "projfree/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace projfree {

namespace {

// log(1 + e^x) without overflow.
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

TabularDataset::TabularDataset(Mat features, Vec targets) : x(std::move(features)), y(std::move(targets)) {
    if (y.size() != x.rows())
        fail(ErrorKind::ShapeMismatch, "dataset has " + std::to_string(x.rows()) + " feature rows but " +
                                           std::to_string(y.size()) + " targets");
    require_finite(x.flat(), "dataset features");
    require_finite(y, "dataset targets");
}

ObservedMatrix::ObservedMatrix(std::size_t rows, std::size_t cols, std::vector<ObservedEntry> obs)
    : m(rows), n(cols), entries(std::move(obs)) {
    if (m == 0 || n == 0) fail(ErrorKind::ShapeMismatch, "observed matrix shape must be positive");
    if (entries.empty()) fail(ErrorKind::InvalidArgument, "observed matrix has no entries");
    std::vector<bool> seen(m * n, false);
    for (const auto& e : entries) {
        if (e.i >= m || e.j >= n)
            fail(ErrorKind::ShapeMismatch, "observed entry (" + std::to_string(e.i) + ", " + std::to_string(e.j) +
                                               ") outside " + std::to_string(m) + "x" + std::to_string(n));
        if (!std::isfinite(e.value)) fail(ErrorKind::NonFinite, "observed entry is not finite");
        if (seen[e.i * n + e.j]) fail(ErrorKind::InvalidArgument, "duplicate observed entry");
        seen[e.i * n + e.j] = true;
    }
}

const char* to_string(LossKind k) noexcept {
    switch (k) {
    case LossKind::Logistic: return "logistic";
    case LossKind::Quadratic: return "quadratic";
    case LossKind::ObservedQuadratic: return "observed_quadratic";
    case LossKind::SquaredSigmoid: return "squared_sigmoid";
    case LossKind::BiWeight: return "biweight";
    }
    return "unknown";
}

Loss Loss::make_tabular(LossKind kind, TabularDataset data, BiasMode bias) {
    Loss l(kind, bias);
    if (bias == BiasMode::Profiled && kind != LossKind::Quadratic)
        fail(ErrorKind::Unsupported, "profiled intercept is only available for the quadratic loss");
    const std::size_t n = data.n(), d = data.d();
    if (bias == BiasMode::Constrained) {
        Mat x(n, d + 1);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < d; ++j) x(i, j) = data.x(i, j);
            x(i, d) = 1.0;
        }
        data = TabularDataset(std::move(x), std::move(data.y));
    } else if (bias == BiasMode::Profiled) {
        l.x_mean_.assign(d, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d; ++j) l.x_mean_[j] += data.x(i, j);
        for (double& m : l.x_mean_) m /= static_cast<double>(n);
        l.y_mean_ = std::accumulate(data.y.begin(), data.y.end(), 0.0) / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < d; ++j) data.x(i, j) -= l.x_mean_[j];
            data.y[i] -= l.y_mean_;
        }
    }
    l.tab_ = std::make_shared<const TabularDataset>(std::move(data));
    return l;
}

Loss Loss::logistic(TabularDataset data, BiasMode bias) {
    for (double y : data.y)
        if (y != 1.0 && y != -1.0) fail(ErrorKind::InvalidArgument, "logistic labels must be -1 or +1");
    return make_tabular(LossKind::Logistic, std::move(data), bias);
}

Loss Loss::quadratic(TabularDataset data, BiasMode bias) {
    return make_tabular(LossKind::Quadratic, std::move(data), bias);
}

Loss Loss::squared_sigmoid(TabularDataset data, BiasMode bias) {
    // The sigmoid lives in (0, 1); -1 labels are read as 0.
    for (double& y : data.y) {
        if (y == -1.0) y = 0.0;
        else if (y != 0.0 && y != 1.0) fail(ErrorKind::InvalidArgument, "squared-sigmoid labels must be 0/1 or -1/+1");
    }
    return make_tabular(LossKind::SquaredSigmoid, std::move(data), bias);
}

Loss Loss::biweight(TabularDataset data, BiasMode bias) {
    return make_tabular(LossKind::BiWeight, std::move(data), bias);
}

Loss Loss::observed_quadratic(ObservedMatrix obs) {
    Loss l(LossKind::ObservedQuadratic, BiasMode::None);
    l.obs_ = std::make_shared<const ObservedMatrix>(std::move(obs));
    return l;
}

std::size_t Loss::dim() const noexcept { return tab_ ? tab_->d() : obs_->m * obs_->n; }

std::size_t Loss::num_samples() const noexcept { return tab_ ? tab_->n() : obs_->entries.size(); }

void Loss::check(std::span<const double> w) const {
    if (w.size() != dim())
        fail(ErrorKind::ShapeMismatch, std::string(to_string(kind_)) + " loss expects " + std::to_string(dim()) +
                                           " parameters, got " + std::to_string(w.size()));
    require_finite(w, "loss parameters");
}

double Loss::sample_loss(std::size_t i, double z) const {
    const double y = tab_->y[i];
    switch (kind_) {
    case LossKind::Logistic: return softplus(-y * z);
    case LossKind::Quadratic: return (z - y) * (z - y);
    case LossKind::SquaredSigmoid: {
        const double e = sigmoid(z) - y;
        return e * e / static_cast<double>(tab_->n());
    }
    case LossKind::BiWeight: {
        const double r2 = (z - y) * (z - y);
        return r2 / (1.0 + r2);
    }
    case LossKind::ObservedQuadratic: break;
    }
    return 0.0;
}

void Loss::add_sample_grad(std::size_t i, double z, double scale, std::span<double> g) const {
    const double y = tab_->y[i];
    double dz = 0.0;
    switch (kind_) {
    case LossKind::Logistic: dz = -y * sigmoid(-y * z); break;
    case LossKind::Quadratic: dz = 2.0 * (z - y); break;
    case LossKind::SquaredSigmoid: {
        const double s = sigmoid(z);
        dz = 2.0 * (s - y) * s * (1.0 - s) / static_cast<double>(tab_->n());
        break;
    }
    case LossKind::BiWeight: {
        const double r = z - y;
        const double den = 1.0 + r * r;
        dz = 2.0 * r / (den * den);
        break;
    }
    case LossKind::ObservedQuadratic: break;
    }
    axpy(scale * dz, tab_->x.row(i), g);
}

double Loss::eval(std::span<const double> w) const {
    check(w);
    double total = 0.0;
    if (obs_) {
        for (const auto& e : obs_->entries) {
            const double r = w[e.i * obs_->n + e.j] - e.value;
            total += r * r;
        }
        return total;
    }
    for (std::size_t i = 0; i < tab_->n(); ++i) total += sample_loss(i, dot(tab_->x.row(i), w));
    return total;
}

Vec Loss::grad(std::span<const double> w) const {
    check(w);
    Vec g(dim(), 0.0);
    if (obs_) {
        for (const auto& e : obs_->entries) {
            const std::size_t k = e.i * obs_->n + e.j;
            g[k] = 2.0 * (w[k] - e.value);
        }
        return g;
    }
    for (std::size_t i = 0; i < tab_->n(); ++i) add_sample_grad(i, dot(tab_->x.row(i), w), 1.0, g);
    return g;
}

Vec Loss::stochastic_grad(std::span<const double> w, std::span<const std::size_t> indices) const {
    check(w);
    const std::size_t n = num_samples();
    if (indices.empty()) fail(ErrorKind::InvalidArgument, "stochastic gradient needs at least one index");
    for (std::size_t i : indices)
        if (i >= n) fail(ErrorKind::InvalidArgument, "sample index " + std::to_string(i) + " out of range");
    const double scale = static_cast<double>(n) / static_cast<double>(indices.size());
    Vec g(dim(), 0.0);
    if (obs_) {
        for (std::size_t i : indices) {
            const auto& e = obs_->entries[i];
            const std::size_t k = e.i * obs_->n + e.j;
            g[k] += scale * 2.0 * (w[k] - e.value);
        }
        return g;
    }
    for (std::size_t i : indices) add_sample_grad(i, dot(tab_->x.row(i), w), scale, g);
    return g;
}

double Loss::intercept(std::span<const double> w) const {
    check(w);
    switch (bias_) {
    case BiasMode::None: return 0.0;
    case BiasMode::Constrained: return w.back();
    case BiasMode::Profiled: return y_mean_ - dot(x_mean_, w);
    }
    return 0.0;
}

double Loss::estimate_smoothness(const FeasibleSet& set, std::size_t trials, Rng& rng) const {
    if (trials == 0) fail(ErrorKind::InvalidArgument, "smoothness estimate needs at least one trial");
    if (set.dim() != dim())
        fail(ErrorKind::ShapeMismatch, "smoothness estimate: set dimension " + std::to_string(set.dim()) +
                                           " differs from loss dimension " + std::to_string(dim()));
    if (kind_ == LossKind::Quadratic) return 2.0 * power_iteration_max_eig(gram(tab_->x), 1e-8);

    auto random_point = [&] {
        Vec v = set.lmo(gaussian_vec(dim(), rng));
        return scaled(v, uniform01(rng));
    };
    double best = 0.0;
    for (std::size_t k = 0; k < trials; ++k) {
        const Vec u = random_point();
        // Pair partners at log-uniform distances pick up local curvature too.
        const double lam = std::pow(10.0, -4.0 * uniform01(rng));
        const Vec v = lerp(u, random_point(), lam);
        const double du = norm2(sub(u, v));
        if (du == 0.0) continue;
        best = std::max(best, norm2(sub(grad(u), grad(v))) / du);
    }
    if (!(best > 0.0)) fail(ErrorKind::NumericFailure, "smoothness estimate is zero; set or loss is degenerate");
    return 1.5 * best;
}

double Loss::grad_cost() const noexcept {
    if (obs_) return 2.0 * static_cast<double>(obs_->entries.size());
    return 2.0 * static_cast<double>(tab_->n() * tab_->d());
}

}  // namespace projfree
