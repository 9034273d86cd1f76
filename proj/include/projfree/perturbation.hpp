#pragma once

#include "projfree/losses.hpp"
#include "projfree/random.hpp"

namespace projfree {

/// Uniform draw from the unit sphere in R^d (normalized Gaussian).
Vec sample_unit_sphere(std::size_t d, Rng& rng);

/// h(w) = f(w) + theta * <xi, w>, with ||xi||_2 = 1.
class PerturbedLoss {
public:
    PerturbedLoss(Loss base, double theta, Vec xi, double delta);

    const Loss& base() const noexcept { return base_; }
    double theta() const noexcept { return theta_; }
    const Vec& xi() const noexcept { return xi_; }
    double delta() const noexcept { return delta_; }

    double eval(std::span<const double> w) const;
    Vec grad(std::span<const double> w) const;
    Vec stochastic_grad(std::span<const double> w, std::span<const std::size_t> indices) const;

private:
    Loss base_;
    double theta_;
    Vec xi_;
    double delta_;
};

/// theta = epsilon / (4 D) with a fresh xi.
PerturbedLoss make_perturbed(Loss base, double epsilon, double diameter, double delta, Rng& rng);

/// delta sqrt(pi) / sqrt(2 d): with probability at least 1 - delta the
/// perturbed gradient is at least this long (for theta = 1).
double gradient_norm_floor(double delta, std::size_t d);

}  // namespace projfree
