#include "projfree/perturbation.hpp"

#include <numbers>

namespace projfree {

Vec sample_unit_sphere(std::size_t d, Rng& rng) {
    if (d == 0) fail(ErrorKind::InvalidArgument, "sphere dimension must be positive");
    for (;;) {
        Vec g = gaussian_vec(d, rng);
        const double n = norm2(g);
        if (!(n > 0.0)) continue;
        for (double& v : g) v /= n;
        return g;
    }
}

PerturbedLoss::PerturbedLoss(Loss base, double theta, Vec xi, double delta)
    : base_(std::move(base)), theta_(theta), xi_(std::move(xi)), delta_(delta) {
    if (!(theta_ > 0.0) || !std::isfinite(theta_)) fail(ErrorKind::InvalidArgument, "perturbation theta must be positive");
    if (!(delta_ > 0.0 && delta_ < 1.0)) fail(ErrorKind::InvalidArgument, "perturbation delta must lie in (0, 1)");
    if (xi_.size() != base_.dim())
        fail(ErrorKind::ShapeMismatch, "perturbation direction has " + std::to_string(xi_.size()) +
                                           " entries, loss has " + std::to_string(base_.dim()));
    if (std::fabs(norm2(xi_) - 1.0) > 1e-10) fail(ErrorKind::InvalidArgument, "perturbation direction must be a unit vector");
}

double PerturbedLoss::eval(std::span<const double> w) const { return base_.eval(w) + theta_ * dot(xi_, w); }

Vec PerturbedLoss::grad(std::span<const double> w) const {
    Vec g = base_.grad(w);
    axpy(theta_, xi_, g);
    return g;
}

Vec PerturbedLoss::stochastic_grad(std::span<const double> w, std::span<const std::size_t> indices) const {
    Vec g = base_.stochastic_grad(w, indices);
    axpy(theta_, xi_, g);
    return g;
}

PerturbedLoss make_perturbed(Loss base, double epsilon, double diameter, double delta, Rng& rng) {
    if (!(epsilon > 0.0)) fail(ErrorKind::InvalidArgument, "perturbation epsilon must be positive");
    if (!(diameter > 0.0)) fail(ErrorKind::InvalidArgument, "perturbation diameter must be positive");
    if (!(delta > 0.0 && delta < 1.0)) fail(ErrorKind::InvalidArgument, "perturbation delta must lie in (0, 1)");
    Vec xi = sample_unit_sphere(base.dim(), rng);
    return PerturbedLoss(std::move(base), epsilon / (4.0 * diameter), std::move(xi), delta);
}

double gradient_norm_floor(double delta, std::size_t d) {
    if (!(delta >= 0.0 && delta <= 1.0)) fail(ErrorKind::InvalidArgument, "delta must lie in [0, 1]");
    if (d == 0) fail(ErrorKind::InvalidArgument, "dimension must be positive");
    return delta * std::sqrt(std::numbers::pi) / std::sqrt(2.0 * static_cast<double>(d));
}

}  // namespace projfree
