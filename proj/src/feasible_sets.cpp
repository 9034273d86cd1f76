#include "projfree/feasible_sets.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace projfree {

namespace {

std::string exponent_str(Exponent p) {
    if (p.is_inf()) return "inf";
    std::ostringstream os;
    os << p.value();
    return os.str();
}

double shape_factor(std::size_t k, Exponent p) {
    const double inv_p = p.is_inf() ? 0.0 : 1.0 / p.value();
    return std::pow(static_cast<double>(k), std::max(0.0, 0.5 - inv_p));
}

Vec unit_e1(std::size_t n, double r) {
    Vec v(n, 0.0);
    v[0] = r;
    return v;
}

// Brackets the root of a monotone function on (0, inf). `below(x)` is true
// while x lies below the root. Returns [lo, hi] with below(lo) (or lo = 0)
// and !below(hi).
std::pair<double, double> bracket_positive(const std::function<bool(double)>& below, const char* what) {
    double hi = 1.0;
    if (below(hi)) {
        for (int i = 0; below(hi); ++i) {
            if (i > 2100) fail(ErrorKind::NumericFailure, std::string(what) + ": could not bracket multiplier");
            hi *= 2.0;
        }
        return {hi / 2.0, hi};
    }
    for (int i = 0; i < 2100; ++i) {
        const double half = hi / 2.0;
        if (half == 0.0) return {0.0, hi};
        if (below(half)) return {half, hi};
        hi = half;
    }
    return {0.0, hi};
}

// Bisection on a bracket produced by bracket_positive; returns the upper end.
double bisect(std::pair<double, double> br, const std::function<bool(double)>& below, const char* what) {
    auto [lo, hi] = br;
    constexpr int kMaxIter = 200;
    for (int it = 0; it < kMaxIter; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi || hi - lo <= 4e-16 * hi) return hi;
        (below(mid) ? lo : hi) = mid;
    }
    fail(ErrorKind::NumericFailure, std::string(what) + ": bisection did not converge within 200 iterations");
}

// Solves u + mu * u^(p-1) = a for u in [0, a], with a > 0, mu >= 0, p > 1.
double solve_coordinate(double a, double mu, double p) {
    if (a == 0.0) return 0.0;
    if (mu == 0.0) return a;
    if (p == 2.0) return a / (1.0 + mu);
    double lo = 0.0;
    double hi = std::min(a, std::pow(a / mu, 1.0 / (p - 1.0)));
    double u = 0.5 * hi;
    for (int it = 0; it < 200; ++it) {
        const double h = u + mu * std::pow(u, p - 1.0) - a;
        if (h == 0.0) return u;
        (h < 0.0 ? lo : hi) = u;
        const double dh = 1.0 + mu * (p - 1.0) * std::pow(u, p - 2.0);
        double next = u - h / dh;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::fabs(next - u) <= 1e-16 * hi || hi - lo <= 1e-16 * hi) return next;
        u = next;
    }
    return u;
}

// y_j = sgn(x_j) u_j(mu) with u solving the per-coordinate stationarity
// equation of 0.5||y - x||^2 + (mu/p) sum |y_j|^p.
Vec shrink(std::span<const double> x, double mu, double p) {
    Vec y(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) y[j] = sign(x[j]) * solve_coordinate(std::fabs(x[j]), mu, p);
    return y;
}

Vec rescale_to(Vec y, std::span<const double> norm_input, double current, double r) {
    (void)norm_input;
    if (current > 0.0 && current > r) {
        const double s = r / current;
        for (double& e : y) e *= s;
    }
    return y;
}

Mat as_mat(std::span<const double> x, std::size_t m, std::size_t n) {
    return Mat(m, n, Vec(x.begin(), x.end()));
}

Vec row_norms(const Mat& c, Exponent p) {
    Vec out(c.rows());
    for (std::size_t i = 0; i < c.rows(); ++i) out[i] = lp_norm(c.row(i), p);
    return out;
}

double group_norm(std::span<const double> x, const GroupBall& g) {
    return lp_norm(row_norms(as_mat(x, g.m, g.n), g.p), g.q);
}

// Projection onto the group ball for finite p, q > 1 via the multiplier
// lambda of sum_i ||y_i||_p^q <= r^q. For fixed lambda each row solves
// min 0.5||y_i - x_i||^2 + lambda ||y_i||_p^q, whose solution is a
// coordinatewise shrink with multiplier mu_i = lambda q ||y_i||_p^(q-p).
Vec group_project(std::span<const double> x, const GroupBall& g) {
    const double scale = max_abs(x);
    const double p = g.p.value(), q = g.q.value();
    const double r = g.r / scale;
    const Mat xs = as_mat(scaled(x, 1.0 / scale), g.m, g.n);

    auto row_solution = [&](std::size_t i, double lambda, double* a_out) {
        const auto xi = xs.row(i);
        if (max_abs(xi) == 0.0 || lambda == 0.0) {
            *a_out = lp_norm(xi, g.p);
            return Vec(xi.begin(), xi.end());
        }
        auto norm_at = [&](double mu) { return lp_norm(shrink(xi, mu, p), g.p); };
        // Lambda(mu) = mu * a(mu)^(p-q) / q is increasing in mu.
        auto below = [&](double mu) { return mu * std::pow(norm_at(mu), p - q) / q < lambda; };
        const double mu = bisect(bracket_positive(below, "group projection"), below, "group projection");
        Vec y = shrink(xi, mu, p);
        *a_out = lp_norm(y, g.p);
        return y;
    };
    auto total = [&](double lambda) {
        double s = 0.0;
        for (std::size_t i = 0; i < g.m; ++i) {
            double a = 0.0;
            row_solution(i, lambda, &a);
            s += std::pow(a, q);
        }
        return s;
    };
    const double target = std::pow(r, q);
    auto below = [&](double lambda) { return total(lambda) > target; };
    const double lambda = bisect(bracket_positive(below, "group projection"), below, "group projection");

    Vec y(g.m * g.n);
    for (std::size_t i = 0; i < g.m; ++i) {
        double a = 0.0;
        Vec yi = row_solution(i, lambda, &a);
        std::copy(yi.begin(), yi.end(), y.begin() + static_cast<std::ptrdiff_t>(i * g.n));
    }
    const double nrm = group_norm(y, g);
    y = rescale_to(std::move(y), x, nrm, r);
    for (double& e : y) e *= scale;
    return y;
}

}  // namespace

namespace detail {

Vec lp_lmo(std::span<const double> c, Exponent p, double r) {
    const std::size_t n = c.size();
    if (max_abs(c) == 0.0) return unit_e1(n, r);
    Vec v(n, 0.0);
    if (p.is_inf()) {
        for (std::size_t i = 0; i < n; ++i) v[i] = -r * sign(c[i]);
        return v;
    }
    const double pv = p.value();
    if (pv == 1.0) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (std::fabs(c[i]) > std::fabs(c[best])) best = i;
        v[best] = -r * sign(c[best]);
        return v;
    }
    if (pv == 2.0) {
        const double nc = norm2(c);
        for (std::size_t i = 0; i < n; ++i) v[i] = -r * c[i] / nc;
        return v;
    }
    const Exponent q = dual_exponent(p);
    const double qv = q.value();
    const double nq = lp_norm(c, q);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = -r * sign(c[i]) * std::pow(std::fabs(c[i]) / nq, qv - 1.0);
    return v;
}

Vec l1_project(std::span<const double> x, double r) {
    Vec mag(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) mag[i] = std::fabs(x[i]);
    Vec sorted = mag;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumsum = 0.0, tau = 0.0;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        cumsum += sorted[k];
        const double cand = (cumsum - r) / static_cast<double>(k + 1);
        if (sorted[k] > cand) tau = cand;
        else break;
    }
    Vec y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = sign(x[i]) * std::max(mag[i] - tau, 0.0);
    return y;
}

Vec lp_project(std::span<const double> x, Exponent p, double r) {
    const double nx = lp_norm(x, p);
    if (nx <= r * (1.0 + 1e-14)) return Vec(x.begin(), x.end());
    if (p.is_inf()) {
        Vec y(x.begin(), x.end());
        for (double& e : y) e = std::clamp(e, -r, r);
        return y;
    }
    const double pv = p.value();
    if (pv == 2.0) return scaled(x, r / nx);
    if (pv == 1.0) return l1_project(x, r);

    // Work on x / max|x| so the multiplier lives on a sane scale.
    const double scale = max_abs(x);
    const Vec xs = scaled(x, 1.0 / scale);
    const double rs = r / scale;
    const double target = std::pow(rs, pv);
    auto below = [&](double mu) {
        double s = 0.0;
        for (double e : xs) s += std::pow(solve_coordinate(std::fabs(e), mu, pv), pv);
        return s > target;
    };
    const double mu = bisect(bracket_positive(below, "lp projection"), below, "lp projection");
    Vec y = shrink(xs, mu, pv);
    y = rescale_to(std::move(y), xs, lp_norm(y, p), rs);
    for (double& e : y) e *= scale;
    return y;
}

}  // namespace detail

FeasibleSet::FeasibleSet(Variant v) : v_(std::move(v)) {
    std::visit(
        [](const auto& s) {
            if (!(s.r > 0.0) || !std::isfinite(s.r))
                fail(ErrorKind::InvalidArgument, "feasible set radius must be positive and finite");
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, LpBall>) {
                if (s.d == 0) fail(ErrorKind::ShapeMismatch, "lp ball dimension must be positive");
            } else {
                if (s.m == 0 || s.n == 0) fail(ErrorKind::ShapeMismatch, "matrix ball shape must be positive");
            }
        },
        v_);
}

std::size_t FeasibleSet::dim() const noexcept {
    return std::visit(
        [](const auto& s) -> std::size_t {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, LpBall>) return s.d;
            else return s.m * s.n;
        },
        v_);
}

double FeasibleSet::radius() const noexcept {
    return std::visit([](const auto& s) { return s.r; }, v_);
}

std::string FeasibleSet::describe() const {
    std::ostringstream os;
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, LpBall>)
                os << "l_" << exponent_str(s.p) << " ball (r=" << s.r << ", d=" << s.d << ")";
            else if constexpr (std::is_same_v<T, SchattenBall>)
                os << "Schatten-" << exponent_str(s.p) << " ball (r=" << s.r << ", " << s.m << "x" << s.n << ")";
            else
                os << "group l_{" << exponent_str(s.p) << "," << exponent_str(s.q) << "} ball (r=" << s.r << ", "
                   << s.m << "x" << s.n << ")";
        },
        v_);
    return os.str();
}

void FeasibleSet::check_shape(std::size_t n) const {
    if (n != dim())
        fail(ErrorKind::ShapeMismatch,
             "point has " + std::to_string(n) + " entries but " + describe() + " needs " + std::to_string(dim()));
}

double FeasibleSet::norm(std::span<const double> x) const {
    check_shape(x.size());
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, LpBall>) return lp_norm(x, s.p);
            else if constexpr (std::is_same_v<T, SchattenBall>) return lp_norm(svd(as_mat(x, s.m, s.n)).s, s.p);
            else return group_norm(x, s);
        },
        v_);
}

double FeasibleSet::dual_norm(std::span<const double> c) const {
    check_shape(c.size());
    auto dual = [](Exponent p) { return p.value() == 1.0 ? Exponent::infinity() : dual_exponent(p); };
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, LpBall>) return lp_norm(c, dual(s.p));
            else if constexpr (std::is_same_v<T, SchattenBall>) return lp_norm(svd(as_mat(c, s.m, s.n)).s, dual(s.p));
            else return lp_norm(row_norms(as_mat(c, s.m, s.n), dual(s.p)), dual(s.q));
        },
        v_);
}

Vec FeasibleSet::lmo(std::span<const double> c) const {
    check_shape(c.size());
    require_finite(c, "lmo direction");
    if (max_abs(c) == 0.0) return unit_e1(dim(), radius());
    return std::visit(
        [&](const auto& s) -> Vec {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, LpBall>) {
                return detail::lp_lmo(c, s.p, s.r);
            } else if constexpr (std::is_same_v<T, SchattenBall>) {
                SvdResult d = svd(as_mat(c, s.m, s.n));
                d.s = detail::lp_lmo(d.s, s.p, s.r);
                return d.reconstruct().flat();
            } else {
                const Mat cm = as_mat(c, s.m, s.n);
                const Exponent pd = s.p.value() == 1.0 ? Exponent::infinity() : dual_exponent(s.p);
                const Vec nrm = row_norms(cm, pd);
                // Radius allocation across rows maximizes sum a_i ||c_i||_*.
                const Vec alloc = detail::lp_lmo(scaled(nrm, -1.0), s.q, s.r);
                Vec v(c.size(), 0.0);
                for (std::size_t i = 0; i < s.m; ++i) {
                    if (nrm[i] == 0.0 || alloc[i] == 0.0) continue;
                    const Vec dir = detail::lp_lmo(cm.row(i), s.p, 1.0);
                    for (std::size_t j = 0; j < s.n; ++j) v[i * s.n + j] = alloc[i] * dir[j];
                }
                return v;
            }
        },
        v_);
}

Mat FeasibleSet::lmo(const Mat& c) const {
    return Mat(c.rows(), c.cols(), lmo(std::span<const double>(c.flat())));
}

Vec FeasibleSet::project(std::span<const double> x) const {
    check_shape(x.size());
    require_finite(x, "projection input");
    return std::visit(
        [&](const auto& s) -> Vec {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, LpBall>) {
                return detail::lp_project(x, s.p, s.r);
            } else if constexpr (std::is_same_v<T, SchattenBall>) {
                SvdResult d = svd(as_mat(x, s.m, s.n));
                if (lp_norm(d.s, s.p) <= s.r * (1.0 + 1e-14)) return Vec(x.begin(), x.end());
                d.s = detail::lp_project(d.s, s.p, s.r);
                return d.reconstruct().flat();
            } else {
                if (group_norm(x, s) <= s.r * (1.0 + 1e-14)) return Vec(x.begin(), x.end());
                if (s.p == s.q) return detail::lp_project(x, s.p, s.r);
                if (s.p.is_inf() || s.q.is_inf() || s.p.value() == 1.0 || s.q.value() == 1.0)
                    fail(ErrorKind::Unsupported, "group projection needs finite exponents > 1 (or p == q)");
                return group_project(x, s);
            }
        },
        v_);
}

Mat FeasibleSet::project(const Mat& x) const {
    return Mat(x.rows(), x.cols(), project(std::span<const double>(x.flat())));
}

double FeasibleSet::strong_convexity() const {
    auto check = [this](Exponent p) {
        if (p.is_inf() || !(p.value() > 1.0 && p.value() <= 2.0))
            fail(ErrorKind::NotStronglyConvex, describe() + " is not strongly convex (exponent outside (1, 2])");
        return p.value();
    };
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, GroupBall>) {
                const double a = (check(s.p) - 1.0) / s.r;
                const double b = (check(s.q) - 1.0) / s.r;
                return std::min(a, b);
            } else {
                return (check(s.p) - 1.0) / s.r;
            }
        },
        v_);
}

double FeasibleSet::euclidean_diameter() const {
    return std::visit(
        [](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, LpBall>) return 2.0 * s.r * shape_factor(s.d, s.p);
            else if constexpr (std::is_same_v<T, SchattenBall>) return 2.0 * s.r * shape_factor(std::min(s.m, s.n), s.p);
            else return 2.0 * s.r * shape_factor(s.n, s.p) * shape_factor(s.m, s.q);
        },
        v_);
}

bool FeasibleSet::contains(std::span<const double> x, double tol) const {
    if (tol < 0.0) fail(ErrorKind::InvalidArgument, "contains: tolerance must be nonnegative");
    return norm(x) <= radius() * (1.0 + tol);
}

double FeasibleSet::lmo_cost() const noexcept {
    return std::visit(
        [](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, LpBall>) return 3.0 * static_cast<double>(s.d);
            else if constexpr (std::is_same_v<T, SchattenBall>) {
                const double k = static_cast<double>(std::min(s.m, s.n));
                return 10.0 * static_cast<double>(s.m * s.n) * k;
            } else return 4.0 * static_cast<double>(s.m * s.n);
        },
        v_);
}

}  // namespace projfree
