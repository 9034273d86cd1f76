#include "projfree/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace projfree {

double fw_gap(const FeasibleSet& set, std::span<const double> w, std::span<const double> grad) {
    if (!set.contains(w, 1e-8)) fail(ErrorKind::InvalidArgument, "fw_gap: point lies outside " + set.describe());
    const Vec v = set.lmo(grad);
    return dot(sub(w, v), grad);
}

SlopeFit loglog_slope(std::span<const std::pair<double, double>> series, std::size_t burn_in) {
    SlopeFit fit;
    fit.burn_in = burn_in;
    std::vector<double> lx, ly;
    for (const auto& [t, value] : series) {
        if (!(t > static_cast<double>(burn_in))) continue;
        if (!std::isfinite(value)) fail(ErrorKind::NonFinite, "slope series contains a non-finite value");
        double v = value;
        if (v < kSlopeFloor) {
            v = kSlopeFloor;
            fit.clipped = true;
        }
        if (lx.empty()) fit.t_first = t;
        fit.t_last = t;
        lx.push_back(std::log(t));
        ly.push_back(std::log(v));
    }
    fit.points = lx.size();
    if (fit.points < kMinSlopePoints)
        fail(ErrorKind::InvalidArgument, "slope fit needs at least " + std::to_string(kMinSlopePoints) +
                                             " points after burn-in, got " + std::to_string(fit.points));
    const double n = static_cast<double>(fit.points);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double dx = lx[i] - mx, dy = ly[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) fail(ErrorKind::InvalidArgument, "slope fit needs distinct iteration indices");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy == 0.0 ? 1.0 : std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
    return fit;
}

ConvergencePoint detect_convergence(const Trace& trace, double f_star, double rel_tol) {
    if (trace.records.empty()) fail(ErrorKind::InvalidArgument, "convergence detection on an empty trace");
    if (!std::isfinite(f_star)) fail(ErrorKind::InvalidArgument, "f_star must be finite");
    ConvergencePoint cp;
    double wall = 0.0;
    bool timed = trace.records.front().step_ms.has_value();
    if (timed) wall += *trace.records.front().step_ms;
    for (std::size_t k = 1; k < trace.records.size(); ++k) {
        const auto& prev = trace.records[k - 1];
        const auto& cur = trace.records[k];
        if (timed && cur.step_ms) wall += *cur.step_ms;
        const bool settled = std::fabs(cur.loss_f - prev.loss_f) <= rel_tol * std::fabs(prev.loss_f);
        const bool optimal = std::fabs(cur.loss_f - f_star) <= rel_tol * std::fabs(f_star);
        if (settled && optimal) {
            cp.converged = true;
            cp.t = cur.t;
            cp.loss = cur.loss_f;
            if (timed) cp.wall_ms = wall;
            return cp;
        }
    }
    return cp;
}

double quasi_convex_budget(double epsilon, double kappa, double L, double theta_floor, double f_gap0) {
    for (double a : {epsilon, kappa, L, theta_floor, f_gap0})
        if (!(a > 0.0)) fail(ErrorKind::InvalidArgument, "quasi-convex budget arguments must be positive");
    const double e2 = epsilon * epsilon;
    return std::max(2.0 * kappa * f_gap0 / (theta_floor * e2), 8.0 * L * kappa * f_gap0 / (theta_floor * e2 * epsilon));
}

double nonconvex_constant(double alpha, double L, double delta, std::size_t d) {
    if (!(alpha > 0.0 && L > 0.0 && d > 0)) fail(ErrorKind::InvalidArgument, "C' needs positive alpha, L, d");
    if (!(delta > 0.0 && delta < 1.0)) fail(ErrorKind::InvalidArgument, "C' needs delta in (0, 1)");
    return alpha * delta * std::sqrt(std::numbers::pi) / (8.0 * L * std::sqrt(2.0 * static_cast<double>(d)));
}

double nonconvex_rate_bound(double ell_1, double alpha, double L, double delta, std::size_t d, std::size_t t) {
    if (t == 0) fail(ErrorKind::InvalidArgument, "rate bound needs t >= 1");
    const double c = nonconvex_constant(alpha, L, delta, d);
    return ell_1 / (static_cast<double>(t) * std::min(0.5, c));
}

std::vector<double> min_so_far(std::span<const double> values) {
    std::vector<double> out(values.size());
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = m = std::min(m, values[i]);
    return out;
}

std::vector<std::pair<double, double>> suboptimality_series(const Trace& trace, double f_star) {
    std::vector<std::pair<double, double>> out;
    out.reserve(trace.records.size());
    for (const auto& r : trace.records) out.emplace_back(static_cast<double>(r.t), r.loss_f - f_star);
    return out;
}

std::vector<std::pair<double, double>> min_gap_series(const Trace& trace) {
    std::vector<std::pair<double, double>> out;
    double m = std::numeric_limits<double>::infinity();
    for (const auto& r : trace.records) {
        if (!r.fw_gap) continue;
        m = std::min(m, *r.fw_gap);
        out.emplace_back(static_cast<double>(r.t), m);
    }
    return out;
}

ConstrainedOptimum l2_least_squares_optimum(const Loss& quadratic, double r) {
    if (quadratic.kind() != LossKind::Quadratic || !quadratic.tabular())
        fail(ErrorKind::Unsupported, "closed-form optimum needs a quadratic loss");
    if (!(r > 0.0)) fail(ErrorKind::InvalidArgument, "ball radius must be positive");
    const TabularDataset& data = *quadratic.tabular();
    const std::size_t d = data.d();
    if (d > kSvdMaxDim) fail(ErrorKind::SizeLimit, "closed-form optimum limited to dimension 512");
    const SymmetricEigen eig = symmetric_eigen(gram(data.x));
    const Vec b = matvec_t(data.x, data.y);
    Vec c(d);
    for (std::size_t k = 0; k < d; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) s += eig.vectors(i, k) * b[i];
        c[k] = s;
    }
    const double lam_max = std::max(eig.values.front(), 0.0);
    auto coeffs = [&](double lambda) {
        Vec a(d, 0.0);
        for (std::size_t k = 0; k < d; ++k) {
            const double den = std::max(eig.values[k], 0.0) + lambda;
            a[k] = den > 1e-14 * (lam_max + lambda) ? c[k] / den : 0.0;
        }
        return a;
    };
    auto compose = [&](const Vec& a) {
        Vec w(d, 0.0);
        for (std::size_t k = 0; k < d; ++k)
            for (std::size_t i = 0; i < d; ++i) w[i] += eig.vectors(i, k) * a[k];
        return w;
    };

    ConstrainedOptimum out{compose(coeffs(0.0)), 0.0, false};
    if (norm2(out.w) > r) {
        // ||w(lambda)|| decreases in lambda; bracket then bisect.
        auto too_long = [&](double lambda) { return norm2(coeffs(lambda)) > r; };
        double lo = 0.0, hi = std::max(1.0, lam_max);
        while (too_long(hi)) hi *= 2.0;
        for (int it = 0; it < 200 && hi - lo > 4e-16 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (too_long(mid) ? lo : hi) = mid;
        }
        Vec w = compose(coeffs(hi));
        w = scaled(w, r / norm2(w));
        out.w = std::move(w);
        out.on_boundary = true;
    }
    out.value = quadratic.eval(out.w);
    return out;
}

}  // namespace projfree
