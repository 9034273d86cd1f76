#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "projfree/numerics.hpp"

namespace projfree {

/// Every stochastic component takes one of these by reference; a run owns
/// its engine so parallel runs never share state.
using Rng = std::mt19937_64;

Vec gaussian_vec(std::size_t n, Rng& rng);
double uniform01(Rng& rng);

/// k distinct indices from [0, n), in draw order (partial Fisher-Yates).
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng);

}  // namespace projfree
