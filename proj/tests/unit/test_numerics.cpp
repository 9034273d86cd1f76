#include <doctest.h>

#include <cmath>

#include "gen.hpp"
#include "projfree/error.hpp"
#include "projfree/numerics.hpp"

using namespace projfree;

TEST_CASE("lp_norm examples") {
    CHECK(lp_norm(Vec{3, 4}, Exponent(2.0)) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(lp_norm(Vec{1, 1, 1}, Exponent(1.0)) == 3.0);
    CHECK(lp_norm(Vec{1, 2}, Exponent(1.5)) == doctest::Approx(std::pow(1.0 + std::pow(2.0, 1.5), 2.0 / 3.0)));
    // High-precision evaluation of (1 + 2^1.5)^(2/3).
    CHECK(std::fabs(lp_norm(Vec{1, 2}, Exponent(1.5)) - 2.4472608147714755) < 1e-12);
    CHECK(lp_norm(Vec{1, -7, 2}, Exponent::infinity()) == 7.0);
}

TEST_CASE("exponents below one are rejected") {
    CHECK_THROWS_AS(Exponent(0.5), Error);
    CHECK_THROWS_AS(dual_exponent(Exponent(1.0)), Error);
    try {
        Exponent(0.9);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidExponent);
    }
}

TEST_CASE("dual exponent") {
    CHECK(dual_exponent(Exponent(2.0)).value() == 2.0);
    CHECK(dual_exponent(Exponent(1.5)).value() == doctest::Approx(3.0));
    CHECK(dual_exponent(Exponent::infinity()).value() == 1.0);
}

TEST_CASE("norm homogeneity and triangle inequality") {
    Rng rng(1);
    for (int k = 0; k < 100; ++k) {
        const Exponent p = gen::exponent(rng);
        const Vec x = gen::vec(rng, 6);
        const Vec y = gen::vec(rng, 6);
        const double a = gen::uniform(rng, -5.0, 5.0);
        const double nx = lp_norm(x, p);
        CHECK(lp_norm(scaled(x, a), p) == doctest::Approx(std::fabs(a) * nx).epsilon(1e-12));
        Vec s = x;
        axpy(1.0, y, s);
        CHECK(lp_norm(s, p) <= nx + lp_norm(y, p) + 1e-12);
    }
}

TEST_CASE("svd examples") {
    SvdResult d = svd(Mat(2, 2, Vec{3, 0, 0, 1}));
    CHECK(d.s[0] == doctest::Approx(3.0));
    CHECK(d.s[1] == doctest::Approx(1.0));
    d = svd(Mat(2, 2, Vec{0, 2, 1, 0}));
    CHECK(d.s[0] == doctest::Approx(2.0));
    CHECK(d.s[1] == doctest::Approx(1.0));

    Rng rng(7);
    const Mat m(8, 5, gen::vec(rng, 40));
    const SvdResult r = svd(m);
    const Mat back = r.reconstruct();
    double err = 0.0;
    for (std::size_t i = 0; i < 40; ++i) err = std::max(err, std::fabs(back.flat()[i] - m.flat()[i]));
    CHECK(err <= 1e-8);
    for (std::size_t j = 1; j < r.s.size(); ++j) CHECK(r.s[j - 1] >= r.s[j]);
}

TEST_CASE("svd of wide matrices") {
    Rng rng(3);
    const Mat m(3, 6, gen::vec(rng, 18));
    const Mat back = svd(m).reconstruct();
    for (std::size_t i = 0; i < 18; ++i) CHECK(back.flat()[i] == doctest::Approx(m.flat()[i]).epsilon(1e-10));
}

TEST_CASE("singular values are square roots of the Gram eigenvalues") {
    Rng rng(11);
    for (int k = 0; k < 20; ++k) {
        const Mat m(4, 4, gen::vec(rng, 16));
        const Vec s = svd(m).s;
        const Vec ev = symmetric_eigen(gram(m)).values;
        for (std::size_t i = 0; i < 4; ++i) CHECK(std::fabs(s[i] - std::sqrt(std::max(ev[i], 0.0))) <= 1e-8);
    }
}

TEST_CASE("symmetric eigen reconstructs") {
    Rng rng(5);
    const Mat a(5, 5, gen::vec(rng, 25));
    const Mat s = gram(a);
    const SymmetricEigen e = symmetric_eigen(s);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) {
            double v = 0.0;
            for (std::size_t k = 0; k < 5; ++k) v += e.vectors(i, k) * e.values[k] * e.vectors(j, k);
            CHECK(v == doctest::Approx(s(i, j)).epsilon(1e-10));
        }
    CHECK(power_iteration_max_eig(s) == doctest::Approx(e.values[0]).epsilon(1e-6));
}

TEST_CASE("svd size limit") {
    CHECK_NOTHROW(svd(Mat(kSvdMaxDim + 1, 2)));
    CHECK_THROWS_AS(svd(Mat(kSvdMaxDim + 1, kSvdMaxDim + 1)), Error);
}

TEST_CASE("matrix kernels") {
    const Mat a(2, 3, Vec{1, 2, 3, 4, 5, 6});
    CHECK(matvec(a, Vec{1, 0, -1}) == Vec{-2, -2});
    CHECK(matvec_t(a, Vec{1, 1}) == Vec{5, 7, 9});
    const Mat g = gram(a);
    CHECK(g(0, 0) == 17.0);
    CHECK(g(1, 2) == 2 * 3 + 5 * 6);
    CHECK(matmul(a, a.transpose())(0, 1) == 32.0);
    CHECK_THROWS_AS(matvec(a, Vec{1, 2}), Error);
}
