#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "projfree/error.hpp"

namespace projfree {

/// Dense real vector. Model parameters of every shape (vectors and
/// row-major flattened matrices) travel as a Vec.
using Vec = std::vector<double>;

/// Norm exponent in [1, inf]. Infinity is a distinguished state rather than
/// a large double so that closed forms can branch on it exactly.
class Exponent {
public:
    explicit Exponent(double p);
    static Exponent infinity() noexcept { return Exponent(); }

    bool is_inf() const noexcept { return inf_; }
    /// Finite value; +inf for the infinite exponent.
    double value() const noexcept {
        return inf_ ? std::numeric_limits<double>::infinity() : p_;
    }
    bool operator==(const Exponent& o) const noexcept {
        return inf_ == o.inf_ && (inf_ || p_ == o.p_);
    }

private:
    Exponent() noexcept : p_(0.0), inf_(true) {}
    double p_;
    bool inf_;
};

/// Row-major dense matrix.
class Mat {
public:
    Mat(std::size_t rows, std::size_t cols, double fill = 0.0);
    Mat(std::size_t rows, std::size_t cols, Vec data);

    static Mat identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * cols_, cols_};
    }
    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }

    const Vec& flat() const noexcept { return data_; }
    Vec& flat() noexcept { return data_; }

    Mat transpose() const;
    double frobenius_norm() const;

private:
    std::size_t rows_;
    std::size_t cols_;
    Vec data_;
};

struct SvdResult {
    Mat u;  ///< m x k, orthonormal columns
    Vec s;  ///< k singular values, nonincreasing
    Mat v;  ///< n x k, orthonormal columns

    Mat reconstruct() const;
};

struct SymmetricEigen {
    Vec values;    ///< nonincreasing
    Mat vectors;   ///< column j pairs with values[j]
};

inline constexpr std::size_t kSvdMaxDim = 512;

// --- vector kernels ------------------------------------------------------

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> x);
/// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);
/// (1 - gamma) * a + gamma * b
Vec lerp(std::span<const double> a, std::span<const double> b, double gamma);
Vec sub(std::span<const double> a, std::span<const double> b);
Vec scaled(std::span<const double> x, double a);
double max_abs(std::span<const double> x);
bool all_finite(std::span<const double> x);
void require_finite(std::span<const double> x, const char* what);

/// (sum |x_i|^p)^(1/p), with max-abs rescaling against overflow.
double lp_norm(std::span<const double> x, Exponent p);
/// Hölder conjugate q with 1/p + 1/q = 1. Requires p > 1.
Exponent dual_exponent(Exponent p);

inline double sign(double x) noexcept { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// --- matrix kernels ------------------------------------------------------

Mat matmul(const Mat& a, const Mat& b);
Vec matvec(const Mat& a, std::span<const double> x);
/// a^T x
Vec matvec_t(const Mat& a, std::span<const double> x);
/// a^T a
Mat gram(const Mat& a);

/// Thin SVD by one-sided (Hestenes) Jacobi.
SvdResult svd(const Mat& m);

/// Eigen-decomposition of a symmetric matrix by cyclic two-sided Jacobi.
SymmetricEigen symmetric_eigen(const Mat& a);

/// Largest eigenvalue of a symmetric PSD matrix by power iteration.
double power_iteration_max_eig(const Mat& a, double tol = 1e-8, std::size_t max_iter = 10000);

}  // namespace projfree
