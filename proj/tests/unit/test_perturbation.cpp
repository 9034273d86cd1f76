#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gen.hpp"
#include "projfree/datasets.hpp"
#include "projfree/error.hpp"
#include "projfree/perturbation.hpp"

using namespace projfree;

namespace {
Loss zero_loss(std::size_t d) { return Loss::quadratic(TabularDataset(Mat(1, d), Vec{0.0})); }
}  // namespace

TEST_CASE("unit sphere samples") {
    Rng rng(1);
    for (int k = 0; k < 50; ++k) {
        const Vec x = sample_unit_sphere(1, rng);
        CHECK(std::fabs(x[0]) == 1.0);
    }
    for (std::size_t d : {2u, 5u, 40u})
        for (int k = 0; k < 50; ++k) CHECK(norm2(sample_unit_sphere(d, rng)) == doctest::Approx(1.0).epsilon(1e-15));
    double m2 = 0.0;
    for (int k = 0; k < 100000; ++k) {
        const double v = sample_unit_sphere(10, rng)[0];
        m2 += v * v / 100000.0;
    }
    CHECK(std::fabs(m2 - 0.1) <= 3e-3);
}

TEST_CASE("theta from epsilon and diameter") {
    Rng rng(2);
    const PerturbedLoss h = make_perturbed(zero_loss(3), 0.4, 2.0, 0.1, rng);
    CHECK(h.theta() == doctest::Approx(0.05));
    CHECK_THROWS_AS(make_perturbed(zero_loss(3), -1.0, 2.0, 0.1, rng), Error);
    CHECK_THROWS_AS(make_perturbed(zero_loss(3), 0.4, 2.0, 1.5, rng), Error);
}

TEST_CASE("perturbation offsets") {
    Rng rng(3);
    SyntheticSpec s;
    s.n = 20;
    s.d = 4;
    s.noise = 0.5;
    s.seed = 3;
    const Loss f = Loss::quadratic(gen_regression(s).data);
    const PerturbedLoss h = make_perturbed(f, 0.3, 1.0, 0.1, rng);
    for (int k = 0; k < 100; ++k) {
        const Vec w = gen::vec(rng, 4, 2.0);
        CHECK(norm2(sub(h.grad(w), f.grad(w))) == doctest::Approx(h.theta()).epsilon(1e-9));
        CHECK(std::fabs(h.eval(w) - f.eval(w)) <= h.theta() * norm2(w) + 1e-12);
    }
}

TEST_CASE("linear objective minimized at -xi") {
    Rng rng(4);
    const PerturbedLoss h(zero_loss(3), 1.0, sample_unit_sphere(3, rng), 0.1);
    const Vec v = FeasibleSet::lp(Exponent(2.0), 1.0, 3).lmo(h.grad(Vec(3, 0.0)));
    for (std::size_t i = 0; i < 3; ++i) CHECK(v[i] == doctest::Approx(-h.xi()[i]));
}

TEST_CASE("gradient norm floor") {
    CHECK(std::fabs(gradient_norm_floor(0.5, 2) - 0.44311) <= 1e-5);
    CHECK(std::fabs(gradient_norm_floor(0.2, 1) - 0.25066) <= 1e-5);
    CHECK(gradient_norm_floor(1e-300, 5) < 1e-299);
    CHECK(gradient_norm_floor(0.3, 10) == doctest::Approx(0.3 * std::sqrt(std::numbers::pi) / std::sqrt(20.0)));
}

TEST_CASE("empirical floor rate") {
    Rng rng(5);
    const Loss f = zero_loss(10);
    for (double delta : {0.1, 0.3}) {
        const double floor = gradient_norm_floor(delta, 10);
        int below = 0, below_coord = 0;
        for (int k = 0; k < 10000; ++k) {
            const PerturbedLoss h(f, 1.0, sample_unit_sphere(10, rng), delta);
            const Vec g = h.grad(Vec(10, 0.0));
            below += norm2(g) < floor;
            below_coord += std::fabs(g[0]) < floor;
        }
        CHECK(below / 1e4 <= delta + 0.02);
        CHECK(below_coord / 1e4 <= delta + 0.02);
    }
}

TEST_CASE("suboptimality transfers from h to f") {
    // f(w) = ||w - c||^2 on the unit l2 ball with c outside: f* at c/||c||.
    const Vec c{2.0, 1.0};
    const TabularDataset data(Mat::identity(2), c);
    const Loss f = Loss::quadratic(data);
    const FeasibleSet ball = FeasibleSet::lp(Exponent(2.0), 1.0, 2);
    const double eps = 0.05;
    Rng rng(6);
    const PerturbedLoss h = make_perturbed(f, eps, ball.diameter(), 0.1, rng);
    const Vec w_star = scaled(c, 1.0 / norm2(c));
    const double f_star = f.eval(w_star);
    // h* by a dense sweep of the boundary (h's minimizer is on the boundary
    // here because the perturbation is tiny).
    double h_star = 1e300;
    for (int k = 0; k < 200000; ++k) {
        const double a = 2 * std::numbers::pi * k / 200000.0;
        h_star = std::min(h_star, h.eval(Vec{std::cos(a), std::sin(a)}));
    }
    int hits = 0;
    for (int k = 0; k < 20000; ++k) {
        const Vec w = lerp(w_star, gen::feasible(rng, ball), gen::uniform(rng, 0.0, 0.3));
        if (h.eval(w) - h_star > eps / 2) continue;
        ++hits;
        CHECK(f.eval(w) - f_star <= 1.5 * eps);
    }
    CHECK(hits > 100);
}
