#include "projfree/numerics.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>

namespace projfree {

Exponent::Exponent(double p) : p_(p), inf_(false) {
    if (std::isinf(p) && p > 0) {
        inf_ = true;
        p_ = 0.0;
        return;
    }
    if (!(p >= 1.0))
        fail(ErrorKind::InvalidExponent, "norm exponent must be >= 1, got " + std::to_string(p));
}

// --- Mat ------------------------------------------------------------------

Mat::Mat(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    if (rows == 0 || cols == 0) fail(ErrorKind::ShapeMismatch, "matrix dimensions must be positive");
}

Mat::Mat(std::size_t rows, std::size_t cols, Vec data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (rows == 0 || cols == 0) fail(ErrorKind::ShapeMismatch, "matrix dimensions must be positive");
    if (data_.size() != rows * cols)
        fail(ErrorKind::ShapeMismatch, "matrix data has " + std::to_string(data_.size()) +
                                           " entries, expected " + std::to_string(rows * cols));
}

Mat Mat::identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat Mat::transpose() const {
    Mat t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double Mat::frobenius_norm() const { return norm2(data_); }

Mat SvdResult::reconstruct() const {
    Mat out(u.rows(), v.rows());
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (s[k] == 0.0) continue;
        for (std::size_t i = 0; i < u.rows(); ++i) {
            const double a = u(i, k) * s[k];
            for (std::size_t j = 0; j < v.rows(); ++j) out(i, j) += a * v(j, k);
        }
    }
    return out;
}

// --- vector kernels -------------------------------------------------------

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) fail(ErrorKind::ShapeMismatch, "dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> x) { return lp_norm(x, Exponent(2.0)); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
    if (x.size() != y.size()) fail(ErrorKind::ShapeMismatch, "axpy: length mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

Vec lerp(std::span<const double> a, std::span<const double> b, double gamma) {
    if (a.size() != b.size()) fail(ErrorKind::ShapeMismatch, "lerp: length mismatch");
    Vec out(a.size());
    const double keep = 1.0 - gamma;
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = keep * a[i] + gamma * b[i];
    return out;
}

Vec sub(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) fail(ErrorKind::ShapeMismatch, "sub: length mismatch");
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

Vec scaled(std::span<const double> x, double a) {
    Vec out(x.begin(), x.end());
    for (double& e : out) e *= a;
    return out;
}

double max_abs(std::span<const double> x) {
    double m = 0.0;
    for (double e : x) m = std::max(m, std::fabs(e));
    return m;
}

bool all_finite(std::span<const double> x) {
    return std::all_of(x.begin(), x.end(), [](double e) { return std::isfinite(e); });
}

void require_finite(std::span<const double> x, const char* what) {
    if (!all_finite(x)) fail(ErrorKind::NonFinite, std::string(what) + " contains non-finite entries");
}

double lp_norm(std::span<const double> x, Exponent p) {
    const double m = max_abs(x);
    if (m == 0.0) return 0.0;
    if (p.is_inf()) return m;
    const double pv = p.value();
    double s = 0.0;
    if (pv == 1.0) {
        for (double e : x) s += std::fabs(e);
        return s;
    }
    if (pv == 2.0) {
        for (double e : x) {
            const double r = e / m;
            s += r * r;
        }
        return m * std::sqrt(s);
    }
    for (double e : x) s += std::pow(std::fabs(e) / m, pv);
    return m * std::pow(s, 1.0 / pv);
}

Exponent dual_exponent(Exponent p) {
    if (p.is_inf()) return Exponent(1.0);
    if (!(p.value() > 1.0))
        fail(ErrorKind::InvalidExponent, "dual exponent requires p > 1");
    const double pv = p.value();
    if (pv == 2.0) return Exponent(2.0);
    return Exponent(pv / (pv - 1.0));
}

// --- matrix kernels -------------------------------------------------------

Mat matmul(const Mat& a, const Mat& b) {
    if (a.cols() != b.rows()) fail(ErrorKind::ShapeMismatch, "matmul: inner dimensions differ");
    Mat c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

Vec matvec(const Mat& a, std::span<const double> x) {
    if (a.cols() != x.size()) fail(ErrorKind::ShapeMismatch, "matvec: dimension mismatch");
    Vec y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
    return y;
}

Vec matvec_t(const Mat& a, std::span<const double> x) {
    if (a.rows() != x.size()) fail(ErrorKind::ShapeMismatch, "matvec_t: dimension mismatch");
    Vec y(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) axpy(x[i], a.row(i), y);
    return y;
}

Mat gram(const Mat& a) {
    Mat g(a.cols(), a.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        const auto row = a.row(r);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double ri = row[i];
            if (ri == 0.0) continue;
            for (std::size_t j = i; j < a.cols(); ++j) g(i, j) += ri * row[j];
        }
    }
    for (std::size_t i = 0; i < a.cols(); ++i)
        for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
    return g;
}

namespace {

// Columns of `cols` (n_rows x k, column-major as k vectors) are completed to
// an orthonormal set where `norms[j] == 0`, using Gram-Schmidt against the
// standard basis.
void complete_orthonormal(std::vector<Vec>& cols, const std::vector<bool>& valid) {
    const std::size_t n = cols.empty() ? 0 : cols[0].size();
    std::size_t basis = 0;
    for (std::size_t j = 0; j < cols.size(); ++j) {
        if (valid[j]) continue;
        while (basis < n) {
            Vec cand(n, 0.0);
            cand[basis++] = 1.0;
            for (int pass = 0; pass < 2; ++pass)
                for (std::size_t k = 0; k < cols.size(); ++k) {
                    if (k == j || (!valid[k] && k > j)) continue;
                    const double c = dot(cand, cols[k]);
                    axpy(-c, cols[k], cand);
                }
            const double nrm = norm2(cand);
            if (nrm > 1e-8) {
                for (double& e : cand) e /= nrm;
                cols[j] = std::move(cand);
                break;
            }
        }
    }
}

SvdResult svd_tall(const Mat& m) {
    const std::size_t rows = m.rows();
    const std::size_t k = m.cols();
    // Column vectors of the working matrix and of V.
    std::vector<Vec> a(k, Vec(rows));
    std::vector<Vec> v(k, Vec(k, 0.0));
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t i = 0; i < rows; ++i) a[j][i] = m(i, j);
        v[j][j] = 1.0;
    }

    constexpr double kTol = 1e-12;
    constexpr int kMaxSweeps = 80;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t i = 0; i + 1 < k; ++i)
            for (std::size_t j = i + 1; j < k; ++j) {
                const double alpha = dot(a[i], a[i]);
                const double beta = dot(a[j], a[j]);
                const double gamma = dot(a[i], a[j]);
                if (gamma == 0.0 || std::fabs(gamma) <= kTol * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t r = 0; r < rows; ++r) {
                    const double ai = a[i][r], aj = a[j][r];
                    a[i][r] = c * ai - s * aj;
                    a[j][r] = s * ai + c * aj;
                }
                for (std::size_t r = 0; r < k; ++r) {
                    const double vi = v[i][r], vj = v[j][r];
                    v[i][r] = c * vi - s * vj;
                    v[j][r] = s * vi + c * vj;
                }
            }
        if (!rotated) break;
        if (sweep + 1 == kMaxSweeps)
            fail(ErrorKind::NumericFailure, "svd: Jacobi sweeps did not converge");
    }

    Vec sigma(k);
    for (std::size_t j = 0; j < k; ++j) sigma[j] = norm2(a[j]);
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

    const double smax = sigma.empty() ? 0.0 : sigma[order[0]];
    std::vector<Vec> ucols(k);
    std::vector<bool> valid(k);
    SvdResult out{Mat(rows, k), Vec(k), Mat(k, k)};
    for (std::size_t jj = 0; jj < k; ++jj) {
        const std::size_t j = order[jj];
        out.s[jj] = sigma[j];
        ucols[jj] = a[j];
        valid[jj] = sigma[j] > 0.0 && sigma[j] > smax * 1e-300;
        if (valid[jj])
            for (double& e : ucols[jj]) e /= sigma[j];
        else
            out.s[jj] = 0.0;
        for (std::size_t r = 0; r < k; ++r) out.v(r, jj) = v[j][r];
    }
    complete_orthonormal(ucols, valid);
    for (std::size_t jj = 0; jj < k; ++jj)
        for (std::size_t r = 0; r < rows; ++r) out.u(r, jj) = ucols[jj][r];
    return out;
}

}  // namespace

SvdResult svd(const Mat& m) {
    if (std::min(m.rows(), m.cols()) > kSvdMaxDim)
        fail(ErrorKind::SizeLimit, "svd: min dimension exceeds " + std::to_string(kSvdMaxDim));
    require_finite(m.flat(), "svd input");
    if (m.rows() >= m.cols()) return svd_tall(m);
    SvdResult t = svd_tall(m.transpose());
    return SvdResult{std::move(t.v), std::move(t.s), std::move(t.u)};
}

SymmetricEigen symmetric_eigen(const Mat& input) {
    if (input.rows() != input.cols()) fail(ErrorKind::ShapeMismatch, "symmetric_eigen: matrix not square");
    const std::size_t n = input.rows();
    Mat a = input;
    Mat v = Mat::identity(n);
    constexpr int kMaxSweeps = 100;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double off = 0.0, total = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                total += a(i, j) * a(i, j);
                if (i != j) off += a(i, j) * a(i, j);
            }
        if (off <= 1e-30 * total || off == 0.0) break;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        if (sweep + 1 == kMaxSweeps)
            fail(ErrorKind::NumericFailure, "symmetric_eigen: Jacobi sweeps did not converge");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });
    SymmetricEigen out{Vec(n), Mat(n, n)};
    for (std::size_t jj = 0; jj < n; ++jj) {
        out.values[jj] = a(order[jj], order[jj]);
        for (std::size_t k = 0; k < n; ++k) out.vectors(k, jj) = v(k, order[jj]);
    }
    return out;
}

double power_iteration_max_eig(const Mat& a, double tol, std::size_t max_iter) {
    if (a.rows() != a.cols()) fail(ErrorKind::ShapeMismatch, "power iteration: matrix not square");
    const std::size_t n = a.rows();
    Vec x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.01 * static_cast<double>(i % 7);
    double nx = norm2(x);
    for (double& e : x) e /= nx;
    double lambda = 0.0;
    for (std::size_t it = 0; it < max_iter; ++it) {
        Vec y = matvec(a, x);
        const double next = dot(x, y);
        const double ny = norm2(y);
        if (ny == 0.0) return 0.0;
        for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / ny;
        if (it > 0 && std::fabs(next - lambda) <= tol * std::fabs(next)) return next;
        lambda = next;
    }
    return lambda;
}

}  // namespace projfree
