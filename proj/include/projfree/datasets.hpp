#pragma once

#include <string>

#include "projfree/losses.hpp"
#include "projfree/random.hpp"

namespace projfree {

/// Comma- or whitespace-separated numeric rows. target_column is 0-based.
TabularDataset load_delimited(const std::string& path, bool has_header, std::size_t target_column);
/// "label idx:val ..." with 1-based ascending indices. Label 0 becomes -1.
TabularDataset load_libsvm(const std::string& path);
/// "user,item,rating" triplets with 1-based ids; a repeated pair keeps the
/// last rating.
ObservedMatrix load_ratings(const std::string& path);

enum class SyntheticKind { Regression, Classification, LowRank };

struct SyntheticSpec {
    SyntheticKind kind = SyntheticKind::Regression;
    std::size_t n = 100;  ///< rows; matrix columns for LowRank
    std::size_t d = 5;
    std::size_t m = 0;     ///< LowRank rows
    std::size_t rank = 1;  ///< LowRank
    double noise = 0.0;
    double fraction = 1.0;  ///< LowRank observation fraction
    double margin = 0.0;    ///< Classification: min |w_true^T x|
    double bias = 0.0;      ///< Regression intercept
    /// Regression: scale a random w_true to this Euclidean norm (<= 0 keeps
    /// the raw Gaussian draw). Ignored when w_true is given.
    double w_norm = 1.0;
    /// AR(1) correlation between neighbouring feature columns.
    double correlation = 0.0;
    Vec w_true;
    std::uint64_t seed = 0;
};

struct GeneratedTabular {
    TabularDataset data;
    Vec w_true;
};

struct GeneratedMatrix {
    ObservedMatrix observed;
    Mat full;
};

/// y = X w_true + bias + noise * N(0, 1); X standard Gaussian rows.
GeneratedTabular gen_regression(const SyntheticSpec& spec);
/// Labels sign(w_true^T x) in {-1, +1}; rows closer than margin to the
/// separating hyperplane are redrawn. w_true has unit norm.
GeneratedTabular gen_classification(const SyntheticSpec& spec);
/// full = A B^T with Gaussian A (m x rank) and B (n x rank); observed
/// entries drawn without replacement, plus noise.
GeneratedMatrix gen_lowrank(const SyntheticSpec& spec);

/// Column-wise zero mean / unit variance. Constant columns keep scale 1.
class Standardizer {
public:
    static Standardizer fit(const Mat& x);
    Mat apply(const Mat& x) const;
    Mat invert(const Mat& z) const;
    const Vec& mean() const noexcept { return mean_; }
    const Vec& scale() const noexcept { return scale_; }

private:
    Vec mean_;
    Vec scale_;
};

}  // namespace projfree
