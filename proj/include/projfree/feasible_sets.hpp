#pragma once

#include <cstddef>
#include <string>
#include <variant>

#include "projfree/numerics.hpp"

namespace projfree {

/// {u in R^d : ||u||_p <= r}
struct LpBall {
    Exponent p;
    double r;
    std::size_t d;
};

/// {X in R^{m x n} : ||sigma(X)||_p <= r}
struct SchattenBall {
    Exponent p;
    double r;
    std::size_t m;
    std::size_t n;
};

/// {X in R^{m x n} : (sum_i ||X_i||_p^q)^(1/q) <= r}. Rows are groups; p acts
/// within a row and q across rows.
struct GroupBall {
    Exponent p;
    Exponent q;
    double r;
    std::size_t m;
    std::size_t n;
};

/// A constraint set. Points are flat Vecs; matrix families read them as
/// row-major m x n matrices.
class FeasibleSet {
public:
    using Variant = std::variant<LpBall, SchattenBall, GroupBall>;

    explicit FeasibleSet(Variant v);

    static FeasibleSet lp(Exponent p, double r, std::size_t d) { return FeasibleSet(LpBall{p, r, d}); }
    static FeasibleSet schatten(Exponent p, double r, std::size_t m, std::size_t n) {
        return FeasibleSet(SchattenBall{p, r, m, n});
    }
    static FeasibleSet group(Exponent p, Exponent q, double r, std::size_t m, std::size_t n) {
        return FeasibleSet(GroupBall{p, q, r, m, n});
    }

    const Variant& variant() const noexcept { return v_; }
    std::size_t dim() const noexcept;
    double radius() const noexcept;
    bool is_matrix() const noexcept { return !std::holds_alternative<LpBall>(v_); }
    std::string describe() const;

    /// The set's own norm (the one whose ball this is).
    double norm(std::span<const double> x) const;
    /// Dual of the set's own norm.
    double dual_norm(std::span<const double> c) const;

    /// argmin_{v in set} <v, c>. For c = 0 returns r * e_1.
    Vec lmo(std::span<const double> c) const;
    Mat lmo(const Mat& c) const;

    /// Euclidean projection onto the set.
    Vec project(std::span<const double> x) const;
    Mat project(const Mat& x) const;

    /// Strong-convexity parameter (p - 1) / r; exponents must lie in (1, 2].
    double strong_convexity() const;
    /// Diameter measured in the set's own norm: 2r.
    double diameter() const noexcept { return 2.0 * radius(); }
    /// Upper bound on the Euclidean diameter.
    double euclidean_diameter() const;

    /// set-norm(x) <= r (1 + tol)
    bool contains(std::span<const double> x, double tol = 0.0) const;

    /// Rough multiply-add count of one lmo call, used by cost accounting.
    double lmo_cost() const noexcept;

private:
    void check_shape(std::size_t n) const;
    Variant v_;
};

// Vector-level building blocks, exposed for tests and reuse.
namespace detail {
Vec lp_lmo(std::span<const double> c, Exponent p, double r);
Vec lp_project(std::span<const double> x, Exponent p, double r);
Vec l1_project(std::span<const double> x, double r);
}  // namespace detail

}  // namespace projfree
