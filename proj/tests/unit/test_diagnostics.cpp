#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gen.hpp"
#include "projfree/datasets.hpp"
#include "projfree/diagnostics.hpp"
#include "projfree/error.hpp"

using namespace projfree;

namespace {

std::vector<std::pair<double, double>> power_law(double k, double c, std::size_t n) {
    std::vector<std::pair<double, double>> s;
    for (std::size_t t = 1; t <= n; ++t) s.emplace_back(t, c * std::pow(static_cast<double>(t), k));
    return s;
}

Trace trace_of(const std::vector<double>& losses) {
    Trace tr;
    tr.initial_loss_f = losses.front();
    for (std::size_t t = 1; t < losses.size(); ++t) {
        TraceRecord r;
        r.t = t;
        r.loss_f = losses[t];
        tr.records.push_back(r);
    }
    return tr;
}

}  // namespace

TEST_CASE("fw gap examples") {
    const FeasibleSet ball = FeasibleSet::lp(Exponent(2.0), 1.0, 2);
    CHECK(fw_gap(ball, Vec{0, 0}, Vec{1, 0}) == doctest::Approx(1.0));
    CHECK(fw_gap(ball, Vec{-1, 0}, Vec{1, 0}) == doctest::Approx(0.0));
    CHECK(fw_gap(ball, Vec{0.3, 0.1}, Vec{0, 0}) == 0.0);
    CHECK_THROWS_AS(fw_gap(ball, Vec{2, 0}, Vec{1, 0}), Error);
}

TEST_CASE("property: fw gap is nonnegative and scales with the gradient") {
    Rng rng(3);
    for (const auto& set : gen::families()) {
        for (int k = 0; k < 20; ++k) {
            const Vec w = gen::feasible(rng, set);
            const Vec g = gen::vec(rng, set.dim());
            const double a = gen::uniform(rng, 0.1, 10.0);
            const double k1 = fw_gap(set, w, g);
            CHECK(k1 >= -1e-12);
            CHECK(fw_gap(set, w, scaled(g, a)) == doctest::Approx(a * k1).epsilon(1e-9));
        }
    }
}

TEST_CASE("loglog slope on power laws") {
    SlopeFit f = loglog_slope(power_law(-2, 1, 200), 10);
    CHECK(std::fabs(f.slope + 2) <= 1e-9);
    CHECK(f.r_squared == doctest::Approx(1.0));
    CHECK(f.t_first == 11);
    CHECK(f.t_last == 200);
    f = loglog_slope(power_law(-1, 5, 200), 10);
    CHECK(std::fabs(f.slope + 1) <= 1e-9);
    std::vector<std::pair<double, double>> wobble;
    for (int t = 1; t <= 2000; ++t) wobble.emplace_back(t, std::pow(t, -1.5) * (1 + 0.01 * std::sin(t)));
    f = loglog_slope(wobble, 10);
    CHECK(f.slope >= -1.52);
    CHECK(f.slope <= -1.48);
    Rng rng(4);
    for (int k = 0; k < 20; ++k) {
        const double e = gen::uniform(rng, -3, 0);
        CHECK(std::fabs(loglog_slope(power_law(e, gen::uniform(rng, 0.1, 10), 300), 5).slope - e) <= 1e-9);
    }
}

TEST_CASE("loglog slope errors and clipping") {
    CHECK_THROWS_AS(loglog_slope(power_law(-2, 1, 5), 0), Error);
    CHECK_THROWS_AS(loglog_slope(power_law(-2, 1, 50), 100), Error);
    auto s = power_law(-2, 1, 50);
    s.back().second = 0.0;
    const SlopeFit f = loglog_slope(s, 10);
    CHECK(f.clipped);
}

TEST_CASE("convergence detection") {
    CHECK(detect_convergence(trace_of(std::vector<double>(10, 3.0)), 3.0).t == 2);
    std::vector<double> halving;
    for (int t = 0; t < 30; ++t) halving.push_back(std::pow(0.5, t));
    CHECK_FALSE(detect_convergence(trace_of(halving), 0.0).converged);
    // loss_t = 1 + 0.5 * 0.9^t: change relative to the predecessor is about
    // 0.05 * 0.9^t and the gap to f* is 0.5 * 0.9^t. Both fall to 2% first at
    // t = 31 (0.5 * 0.9^31 = 0.0191).
    std::vector<double> geo;
    for (int t = 0; t <= 100; ++t) geo.push_back(1 + 0.5 * std::pow(0.9, t));
    const ConvergencePoint c = detect_convergence(trace_of(geo), 1.0);
    CHECK(c.converged);
    CHECK(c.t == 31);
    // Independent scan of the same rule.
    std::size_t expect = 0;
    for (std::size_t t = 2; t < geo.size(); ++t)
        if (std::fabs(geo[t] - geo[t - 1]) <= 0.02 * std::fabs(geo[t - 1]) && std::fabs(geo[t] - 1.0) <= 0.02) {
            expect = t;
            break;
        }
    CHECK(c.t == expect);
}

TEST_CASE("quasi-convex budget") {
    CHECK(quasi_convex_budget(1, 1, 1, 1, 1) == doctest::Approx(8.0));
    CHECK(quasi_convex_budget(0.5, 1, 1, 1, 1) == doctest::Approx(64.0));
    CHECK(quasi_convex_budget(0.5, 1, 1, 1, 2) == doctest::Approx(128.0));
}

TEST_CASE("non-convex constants") {
    CHECK(std::fabs(nonconvex_constant(1, 1, 0.5, 2) - 0.5 * std::sqrt(std::numbers::pi) / 16) <= 1e-12);
    CHECK(std::fabs(nonconvex_constant(1, 1, 0.5, 2) - 0.0553885) <= 1e-5);
    CHECK(nonconvex_rate_bound(1, 1e9, 1, 0.5, 2, 10) == doctest::Approx(0.2));
    // Choose alpha so that C' = 0.1.
    const double alpha = 0.1 / nonconvex_constant(1, 1, 0.5, 2);
    CHECK(nonconvex_rate_bound(1, alpha, 1, 0.5, 2, 100) == doctest::Approx(0.1));
}

TEST_CASE("min so far and gap series") {
    const std::vector<double> v{3, 1, 2, 0.5, 4};
    CHECK(min_so_far(v) == std::vector<double>{3, 1, 1, 0.5, 0.5});
    Rng rng(5);
    Trace tr;
    tr.initial_fw_gap = 10.0;
    for (std::size_t t = 1; t <= 100; ++t) {
        TraceRecord r;
        r.t = t;
        r.fw_gap = gen::uniform(rng, 0, 5);
        tr.records.push_back(r);
    }
    const auto s = min_gap_series(tr);
    for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i].second <= s[i - 1].second);
}

TEST_CASE("least-squares optimum over an l2 ball") {
    // noise = 0, d = 1, w_true = 2, radius 1 -> boundary optimum at w = 1.
    SyntheticSpec s;
    s.n = 30;
    s.d = 1;
    s.w_true = {2.0};
    s.seed = 1;
    const Loss loss = Loss::quadratic(gen_regression(s).data);
    ConstrainedOptimum opt = l2_least_squares_optimum(loss, 1.0);
    CHECK(opt.w[0] == doctest::Approx(1.0));
    CHECK(opt.on_boundary);
    opt = l2_least_squares_optimum(loss, 5.0);
    CHECK(opt.w[0] == doctest::Approx(2.0));
    CHECK(opt.value == doctest::Approx(0.0));
    CHECK_FALSE(opt.on_boundary);

    // Against a dense sampled oracle on a 2-D instance.
    s.d = 2;
    s.w_true = {};
    s.w_norm = 3.0;
    s.noise = 0.2;
    const Loss l2 = Loss::quadratic(gen_regression(s).data);
    opt = l2_least_squares_optimum(l2, 1.0);
    double best = 1e300;
    for (int k = 0; k < 100000; ++k) {
        const double a = 2 * std::numbers::pi * k / 100000.0;
        best = std::min(best, l2.eval(Vec{std::cos(a), std::sin(a)}));
    }
    CHECK(opt.value <= best + 1e-9);
    CHECK(opt.value >= best - 1e-3 * std::fabs(best));
}
