#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "projfree/feasible_sets.hpp"
#include "projfree/losses.hpp"
#include "projfree/optimizers.hpp"

namespace projfree {

/// k = <w - lmo(grad), grad> = max over the set of <v - w, -grad>.
double fw_gap(const FeasibleSet& set, std::span<const double> w, std::span<const double> grad);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t burn_in = 0;
    double t_first = 0.0;  ///< window, inclusive
    double t_last = 0.0;
    std::size_t points = 0;
    bool clipped = false;  ///< some values were raised to kSlopeFloor
};

inline constexpr double kSlopeFloor = 1e-14;
inline constexpr std::size_t kDefaultBurnIn = 10;
inline constexpr std::size_t kMinSlopePoints = 10;

/// OLS of log(value) on log(t) over points with t > burn_in.
SlopeFit loglog_slope(std::span<const std::pair<double, double>> series, std::size_t burn_in = kDefaultBurnIn);

struct ConvergencePoint {
    bool converged = false;
    std::size_t t = 0;
    double loss = 0.0;
    std::optional<double> wall_ms;  ///< summed step times, when recorded
};

/// First record (from the second on) within rel_tol of both its predecessor
/// and f_star, judged on the unperturbed loss.
ConvergencePoint detect_convergence(const Trace& trace, double f_star, double rel_tol = 0.02);

double quasi_convex_budget(double epsilon, double kappa, double L, double theta_floor, double f_gap0);

/// C' = alpha delta sqrt(pi) / (8 L sqrt(2 d))
double nonconvex_constant(double alpha, double L, double delta, std::size_t d);
/// ell_1 / (t min(1/2, C'))
double nonconvex_rate_bound(double ell_1, double alpha, double L, double delta, std::size_t d, std::size_t t);

/// Running minimum.
std::vector<double> min_so_far(std::span<const double> values);

/// (t, loss_f - f_star) for every record.
std::vector<std::pair<double, double>> suboptimality_series(const Trace& trace, double f_star);
/// (t, min-so-far fw_gap) for every record carrying a gap.
std::vector<std::pair<double, double>> min_gap_series(const Trace& trace);

struct ConstrainedOptimum {
    Vec w;
    double value;
    bool on_boundary;
};

/// Exact minimizer of a quadratic loss over an l_2 ball, from the
/// eigendecomposition of X^T X and a scalar solve of ||w(lambda)|| = r.
ConstrainedOptimum l2_least_squares_optimum(const Loss& quadratic, double r);

}  // namespace projfree
