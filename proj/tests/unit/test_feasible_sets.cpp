#include <doctest.h>

#include <cmath>

#include "gen.hpp"
#include "projfree/error.hpp"
#include "projfree/feasible_sets.hpp"

using namespace projfree;

namespace {
void check_vec(const Vec& got, const Vec& want, double tol) {
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::fabs(got[i] - want[i]) <= tol);
}
}  // namespace

TEST_CASE("lmo examples") {
    check_vec(FeasibleSet::lp(Exponent(2.0), 1.0, 2).lmo(Vec{3, 4}), {-0.6, -0.8}, 1e-15);
    const Vec v = FeasibleSet::lp(Exponent(1.5), 1.0, 2).lmo(Vec{1, 2});
    check_vec(v, {-0.23112, -0.92449}, 1e-4);
    CHECK(std::fabs(dot(v, Vec{1, 2}) + 2.08008) < 1e-4);
    CHECK(dot(v, Vec{1, 2}) == doctest::Approx(-lp_norm(Vec{1, 2}, Exponent(3.0))).epsilon(1e-12));
    check_vec(FeasibleSet::lp(Exponent::infinity(), 2.0, 3).lmo(Vec{1, -3, 0}), {-2, 2, 0}, 0.0);
    check_vec(FeasibleSet::lp(Exponent(1.0), 1.0, 3).lmo(Vec{1, -3, 3}), {0, 1, 0}, 0.0);
}

TEST_CASE("lmo of a zero direction is feasible") {
    for (const auto& set : gen::families()) {
        const Vec v = set.lmo(Vec(set.dim(), 0.0));
        CHECK(set.contains(v, 1e-12));
    }
}

TEST_CASE("projection examples") {
    check_vec(FeasibleSet::lp(Exponent(2.0), 1.0, 2).project(Vec{3, 4}), {0.6, 0.8}, 1e-15);
    check_vec(FeasibleSet::lp(Exponent(1.0), 1.0, 2).project(Vec{1, 1}), {0.5, 0.5}, 1e-15);
    check_vec(FeasibleSet::lp(Exponent::infinity(), 1.0, 2).project(Vec{3, -0.5}), {1, -0.5}, 0.0);
    const Vec inside{0.1, -0.2};
    CHECK(FeasibleSet::lp(Exponent(1.5), 1.0, 2).project(inside) == inside);
}

TEST_CASE("l1.5 projection against a sampled oracle") {
    const FeasibleSet set = FeasibleSet::lp(Exponent(1.5), 1.0, 2);
    const Vec x{1, 2};
    const Vec px = set.project(x);
    CHECK(set.contains(px, 1e-12));
    Rng rng(3);
    double best = 1e300;
    for (int k = 0; k < 1000000; ++k) best = std::min(best, norm2(sub(x, gen::feasible(rng, set))));
    CHECK(norm2(sub(x, px)) <= best + 1e-12);
    CHECK(norm2(sub(x, px)) >= best - 1e-3);
}

TEST_CASE("strong convexity constants") {
    CHECK(FeasibleSet::lp(Exponent(2.0), 1.0, 3).strong_convexity() == doctest::Approx(1.0));
    CHECK(FeasibleSet::schatten(Exponent(2.0), 12000.0, 2, 2).strong_convexity() ==
          doctest::Approx(1.0 / 12000.0));
    CHECK(FeasibleSet::lp(Exponent(1.5), 2.0, 3).strong_convexity() == doctest::Approx(0.25));
    CHECK_THROWS_AS(FeasibleSet::lp(Exponent(1.0), 1.0, 3).strong_convexity(), Error);
    CHECK_THROWS_AS(FeasibleSet::lp(Exponent(3.0), 1.0, 3).strong_convexity(), Error);
}

TEST_CASE("diameter and contains") {
    CHECK(FeasibleSet::lp(Exponent(2.0), 1.0, 3).diameter() == 2.0);
    CHECK(FeasibleSet::lp(Exponent(2.0), 3.0, 3).diameter() == 6.0);
    CHECK(FeasibleSet::lp(Exponent(1.5), 1.0, 4).diameter() == 2.0);
    const FeasibleSet l2 = FeasibleSet::lp(Exponent(2.0), 1.0, 2);
    CHECK(l2.contains(Vec{0.6, 0.8}));
    CHECK_FALSE(l2.contains(Vec{1.1, 0}));
    CHECK(FeasibleSet::lp(Exponent(1.0), 1.0, 2).contains(Vec{0.5, 0.5001}, 1e-3));
    CHECK_FALSE(FeasibleSet::lp(Exponent(1.0), 1.0, 2).contains(Vec{0.5, 0.51}, 1e-3));
}

TEST_CASE("shape and radius validation") {
    CHECK_THROWS_AS(FeasibleSet::lp(Exponent(2.0), -1.0, 3), Error);
    CHECK_THROWS_AS(FeasibleSet::lp(Exponent(2.0), 1.0, 0), Error);
    CHECK_THROWS_AS(FeasibleSet::lp(Exponent(2.0), 1.0, 3).lmo(Vec{1, 2}), Error);
}

TEST_CASE("property: lmo optimality, duality and feasibility") {
    Rng rng(21);
    for (const auto& set : gen::families()) {
        CAPTURE(set.describe());
        std::vector<Vec> zs;
        for (int k = 0; k < 5000; ++k) zs.push_back(gen::feasible(rng, set));
        for (int j = 0; j < 100; ++j) {
            const Vec c = gen::vec(rng, set.dim());
            const Vec v = set.lmo(c);
            const double val = dot(v, c);
            CHECK(set.contains(v, 1e-9));
            CHECK(val == doctest::Approx(-set.radius() * set.dual_norm(c)).epsilon(1e-8));
            double worst = -1e300;
            for (const Vec& z : zs) worst = std::max(worst, val - dot(z, c));
            CHECK(worst <= 1e-9);
        }
    }
}

TEST_CASE("property: lmo argmin is positively homogeneous") {
    Rng rng(22);
    for (const auto& set : gen::families()) {
        for (int j = 0; j < 20; ++j) {
            const Vec c = gen::vec(rng, set.dim());
            const Vec a = set.lmo(c), b = set.lmo(scaled(c, gen::uniform(rng, 0.1, 10.0)));
            for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-9));
        }
    }
}

TEST_CASE("property: convex combinations of oracle outputs stay feasible") {
    Rng rng(23);
    for (const auto& set : gen::families()) {
        for (int j = 0; j < 50; ++j) {
            const Vec a = set.lmo(gen::vec(rng, set.dim())), b = set.lmo(gen::vec(rng, set.dim()));
            CHECK(set.contains(lerp(a, b, gen::uniform(rng, 0.0, 1.0)), 1e-9));
        }
    }
}

TEST_CASE("property: projection variational inequality and idempotence") {
    Rng rng(24);
    for (const auto& set : gen::families()) {
        CAPTURE(set.describe());
        std::vector<Vec> zs;
        for (int k = 0; k < 1000; ++k) zs.push_back(gen::feasible(rng, set));
        for (int j = 0; j < 20; ++j) {
            const Vec x = gen::vec(rng, set.dim(), 3.0);
            const Vec px = set.project(x);
            CHECK(set.contains(px, 1e-9));
            const Vec ppx = set.project(px);
            for (std::size_t i = 0; i < px.size(); ++i) CHECK(std::fabs(ppx[i] - px[i]) <= 1e-10);
            const Vec res = sub(x, px);
            for (const Vec& z : zs) CHECK(dot(res, sub(z, px)) <= 1e-8);
        }
    }
}

TEST_CASE("oracle Lipschitz bound with the factor from the proof") {
    // The normalized-direction argument gives
    // ||lmo(p) - lmo(q)|| <= 2 ||p - q|| / (alpha (||p|| + ||q||)).
    Rng rng(25);
    for (const auto& set : {FeasibleSet::lp(Exponent(2.0), 1.0, 5), FeasibleSet::lp(Exponent(1.5), 1.0, 5)}) {
        const double alpha = set.strong_convexity();
        for (int k = 0; k < 10000; ++k) {
            const Vec p = gen::vec(rng, 5, std::exp(gen::uniform(rng, -2, 2)));
            const Vec q = gen::vec(rng, 5, std::exp(gen::uniform(rng, -2, 2)));
            const double lhs = norm2(sub(set.lmo(p), set.lmo(q)));
            CHECK(lhs <= 2.0 * norm2(sub(p, q)) / (alpha * (norm2(p) + norm2(q))) + 1e-9);
        }
    }
}

TEST_CASE("group projection for unsupported exponents") {
    const FeasibleSet g = FeasibleSet::group(Exponent(1.0), Exponent(2.0), 1.0, 2, 2);
    CHECK_THROWS_AS(g.project(Vec{3, 3, 3, 3}), Error);
    CHECK(g.project(Vec{0.1, 0, 0, 0.1}) == Vec{0.1, 0, 0, 0.1});
}
