#pragma once
// Hand-rolled generators for the property tests.

#include <random>
#include <vector>

#include "projfree/feasible_sets.hpp"
#include "projfree/random.hpp"

namespace gen {

using projfree::Exponent;
using projfree::FeasibleSet;
using projfree::Rng;
using projfree::Vec;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline Vec vec(Rng& rng, std::size_t d, double scale = 1.0) {
    Vec x = projfree::gaussian_vec(d, rng);
    for (double& v : x) v *= scale;
    return x;
}

inline Exponent exponent(Rng& rng) {
    const double pick = uniform(rng, 0.0, 1.0);
    if (pick < 0.15) return Exponent::infinity();
    if (pick < 0.3) return Exponent(1.0);
    return Exponent(uniform(rng, 1.05, 5.0));
}

/// Uniform radius along a random ray: strictly feasible for any norm ball.
inline Vec feasible(Rng& rng, const FeasibleSet& set) {
    Vec x = vec(rng, set.dim());
    const double scale = set.radius() * uniform(rng, 0.0, 1.0) / set.norm(x);
    for (double& v : x) v *= scale;
    return x;
}

inline std::vector<FeasibleSet> families() {
    const Exponent inf = Exponent::infinity();
    return {
        FeasibleSet::lp(Exponent(1.0), 1.0, 4),
        FeasibleSet::lp(Exponent(1.5), 2.0, 4),
        FeasibleSet::lp(Exponent(2.0), 1.0, 4),
        FeasibleSet::lp(Exponent(3.0), 0.5, 4),
        FeasibleSet::lp(inf, 1.0, 4),
        FeasibleSet::schatten(Exponent(1.0), 1.0, 3, 2),
        FeasibleSet::schatten(Exponent(1.5), 1.0, 3, 2),
        FeasibleSet::schatten(Exponent(2.0), 1.0, 3, 2),
        FeasibleSet::schatten(inf, 1.0, 3, 2),
        FeasibleSet::group(Exponent(2.0), Exponent(1.5), 1.0, 3, 2),
        FeasibleSet::group(Exponent(1.5), Exponent(3.0), 1.0, 3, 2),
        FeasibleSet::group(Exponent(2.0), Exponent(2.0), 1.0, 3, 2),
    };
}

}  // namespace gen
