#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "gen.hpp"
#include "projfree/datasets.hpp"
#include "projfree/diagnostics.hpp"
#include "projfree/error.hpp"

using namespace projfree;

namespace {

std::string temp_file(const std::string& name, const std::string& text) {
    const auto p = std::filesystem::temp_directory_path() / ("projfree-test-" + name);
    std::ofstream(p, std::ios::binary) << text;
    return p.string();
}

}  // namespace

TEST_CASE("delimited files") {
    TabularDataset d = load_delimited(temp_file("a.csv", "1,2\n3,4\n"), false, 1);
    CHECK(d.x.flat() == Vec{1, 3});
    CHECK(d.y == Vec{2, 4});
    d = load_delimited(temp_file("b.csv", "x,y\n1,2\n3,4\n"), true, 1);
    CHECK(d.x.flat() == Vec{1, 3});
    d = load_delimited(temp_file("c.txt", "1 2 5\n3 4 6\n"), false, 0);
    CHECK(d.x.flat() == Vec{2, 5, 4, 6});
    CHECK(d.y == Vec{1, 3});
    CHECK_THROWS_AS(load_delimited(temp_file("d.csv", ""), false, 0), Error);
    CHECK_THROWS_AS(load_delimited(temp_file("e.csv", "1,2\n3\n"), false, 0), Error);
    CHECK_THROWS_AS(load_delimited(temp_file("f.csv", "1,nan\n"), false, 0), Error);
    CHECK_THROWS_AS(load_delimited(temp_file("g.csv", "1,inf\n"), false, 0), Error);
    CHECK_THROWS_AS(load_delimited(temp_file("h.csv", "1,2\n"), false, 5), Error);
    CHECK_THROWS_AS(load_delimited("/nonexistent/file.csv", false, 0), Error);
}

TEST_CASE("libsvm files") {
    TabularDataset d = load_libsvm(temp_file("a.svm", "1 1:0.5 3:2\n0 2:1\n"));
    CHECK(d.x.rows() == 2);
    CHECK(d.x.cols() == 3);
    CHECK(d.x.flat() == Vec{0.5, 0, 2, 0, 1, 0});
    CHECK(d.y == Vec{1, -1});
    CHECK_THROWS_AS(load_libsvm(temp_file("b.svm", "1 0:1\n")), Error);
    CHECK_THROWS_AS(load_libsvm(temp_file("c.svm", "1 1:nan\n")), Error);
    CHECK_THROWS_AS(load_libsvm(temp_file("d.svm", "")), Error);
}

TEST_CASE("ratings files") {
    ObservedMatrix m = load_ratings(temp_file("a.ratings", "1,1,5\n2,3,2\n"));
    CHECK(m.m == 2);
    CHECK(m.n == 3);
    CHECK(m.entries.size() == 2);
    m = load_ratings(temp_file("b.ratings", "1,1,5\n1,1,3\n"));
    REQUIRE(m.entries.size() == 1);
    CHECK(m.entries[0].value == 3.0);
    CHECK_THROWS_AS(load_ratings(temp_file("c.ratings", "")), Error);
    CHECK_THROWS_AS(load_ratings(temp_file("d.ratings", "1,1,inf\n")), Error);
}

TEST_CASE("regression generator") {
    SyntheticSpec s;
    s.n = 50;
    s.d = 3;
    s.seed = 4;
    const auto g = gen_regression(s);
    CHECK(norm2(g.w_true) == doctest::Approx(1.0));
    const Loss loss = Loss::quadratic(g.data);
    CHECK(loss.eval(g.w_true) == doctest::Approx(0.0));
    const ConstrainedOptimum opt = l2_least_squares_optimum(loss, 2.0);
    for (std::size_t i = 0; i < 3; ++i) CHECK(opt.w[i] == doctest::Approx(g.w_true[i]));
    CHECK(gen_regression(s).data.x.flat() == g.data.x.flat());
    CHECK(gen_regression(s).data.y == g.data.y);
    s.seed = 5;
    CHECK(gen_regression(s).data.y != g.data.y);
}

TEST_CASE("classification generator respects the margin") {
    SyntheticSpec s;
    s.kind = SyntheticKind::Classification;
    s.n = 200;
    s.d = 4;
    s.margin = 0.5;
    s.seed = 7;
    const auto g = gen_classification(s);
    for (std::size_t i = 0; i < s.n; ++i) {
        const double z = dot(g.data.x.row(i), g.w_true);
        CHECK(std::fabs(z) >= 0.5);
        CHECK(g.data.y[i] == (z > 0 ? 1.0 : -1.0));
    }
}

TEST_CASE("low-rank generator") {
    SyntheticSpec s;
    s.kind = SyntheticKind::LowRank;
    s.m = 6;
    s.n = 5;
    s.rank = 1;
    s.fraction = 1.0;
    s.seed = 3;
    const auto g = gen_lowrank(s);
    CHECK(g.observed.entries.size() == 30);
    CHECK(Loss::observed_quadratic(g.observed).eval(g.full.flat()) == doctest::Approx(0.0));
    const Vec s_vals = svd(g.full).s;
    CHECK(s_vals[1] <= 1e-10 * s_vals[0]);
    s.fraction = 0.4;
    const auto a = gen_lowrank(s), b = gen_lowrank(s);
    CHECK(a.observed.entries.size() == 12);
    for (std::size_t k = 0; k < 12; ++k) {
        CHECK(a.observed.entries[k].i == b.observed.entries[k].i);
        CHECK(a.observed.entries[k].j == b.observed.entries[k].j);
    }
}

TEST_CASE("property: standardization round-trips") {
    Rng rng(9);
    for (int k = 0; k < 20; ++k) {
        const std::size_t n = 5 + k, d = 1 + k % 4;
        Mat x(n, d, gen::vec(rng, n * d, gen::uniform(rng, 0.1, 100)));
        if (k == 3)
            for (std::size_t i = 0; i < n; ++i) x(i, 0) = 7.0;  // constant column
        const Standardizer st = Standardizer::fit(x);
        const Mat z = st.apply(x);
        for (std::size_t j = 0; j < d; ++j) {
            double mean = 0;
            for (std::size_t i = 0; i < n; ++i) mean += z(i, j) / n;
            CHECK(std::fabs(mean) <= 1e-10);
        }
        const Mat back = st.invert(z);
        for (std::size_t i = 0; i < n * d; ++i)
            CHECK(std::fabs(back.flat()[i] - x.flat()[i]) <= 1e-10 * std::max(1.0, std::fabs(x.flat()[i])));
    }
}
