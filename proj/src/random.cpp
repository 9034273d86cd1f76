#include "projfree/random.hpp"

#include <numeric>

namespace projfree {

Vec gaussian_vec(std::size_t n, Rng& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Vec v(n);
    for (double& e : v) e = nd(rng);
    return v;
}

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng) {
    if (k > n) fail(ErrorKind::InvalidArgument, "cannot draw more samples than the population holds");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(k);
    return idx;
}

}  // namespace projfree
