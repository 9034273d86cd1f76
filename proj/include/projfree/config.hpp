#pragma once

#include <optional>
#include <string>

#include "projfree/datasets.hpp"
#include "projfree/diagnostics.hpp"
#include "projfree/feasible_sets.hpp"
#include "projfree/losses.hpp"
#include "projfree/optimizers.hpp"

namespace projfree {

enum class DataSource { Synthetic, Delimited, Libsvm, Ratings };
enum class Method { FW, PA, SPA, GD, SGD };
enum class StepKind { Predefined, Quadratic, Exact, Short };
enum class SetFamily { Lp, Schatten, Group };

struct RunConfig {
    // loss
    LossKind loss = LossKind::Quadratic;
    BiasMode bias = BiasMode::None;

    // data
    DataSource source = DataSource::Synthetic;
    SyntheticSpec synthetic;
    std::string path;
    bool has_header = false;
    std::size_t target_column = 0;
    bool standardize = true;  // file data only

    // set
    SetFamily family = SetFamily::Lp;
    Exponent p{2.0};
    Exponent q{2.0};
    double r = 1.0;
    std::optional<std::size_t> set_d;  // declared dims, checked against the data
    std::optional<std::size_t> set_m;
    std::optional<std::size_t> set_n;

    // optimizer
    Method method = Method::PA;
    StepKind step = StepKind::Predefined;
    PaOption option = PaOption::A;
    std::size_t iters = 100;
    std::uint64_t seed = 1;
    std::optional<double> L;
    std::optional<double> eta;
    std::size_t batch = 1;
    double line_search_tol = 1e-8;
    bool timing = false;
    std::optional<double> f_star;

    // perturbation
    bool perturb = false;
    double epsilon = 1e-6;
    double delta = 0.1;

    // output
    std::string trace_path;
};

/// Parses the JSON config text. Errors name the offending field.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Cross-field checks that need the data (shape agreement and friends).
void validate(const RunConfig& cfg, const Loss& loss);

struct RunResult {
    Trace trace;
    double f_star = 0.0;
    bool f_star_exact = false;
    double L = 0.0;
    double final_loss = 0.0;
    std::optional<double> min_gap;
    ConvergencePoint convergence;
    std::string set_description;
};

/// Builds the loss from the data spec (bias and standardization applied).
Loss build_loss(const RunConfig& cfg);
FeasibleSet build_set(const RunConfig& cfg, const Loss& loss);
RunResult execute(const RunConfig& cfg);

}  // namespace projfree
