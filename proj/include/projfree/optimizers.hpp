#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "projfree/feasible_sets.hpp"
#include "projfree/losses.hpp"
#include "projfree/perturbation.hpp"
#include "projfree/random.hpp"

namespace projfree {

/// What an optimizer minimizes. h is the (possibly perturbed) objective the
/// method follows; f is the unperturbed loss reported in traces.
class Objective {
public:
    using Fn = std::function<double(std::span<const double>)>;
    using GradFn = std::function<Vec(std::span<const double>)>;

    explicit Objective(Loss f);
    explicit Objective(PerturbedLoss h);
    /// Plain smooth function without sample structure (toys and tests).
    static Objective custom(std::size_t dim, Fn f, GradFn grad, double grad_cost = 0.0);

    std::size_t dim() const noexcept { return dim_; }
    bool perturbed() const noexcept { return theta_ != 0.0; }
    /// N, or 0 when the objective has no sample structure.
    std::size_t num_samples() const noexcept { return loss_ ? loss_->num_samples() : 0; }
    const Loss* loss() const noexcept { return loss_ ? &*loss_ : nullptr; }
    double theta() const noexcept { return theta_; }
    const Vec& xi() const noexcept { return xi_; }

    double f(std::span<const double> w) const;
    double h(std::span<const double> w) const;
    Vec grad_f(std::span<const double> w) const;
    Vec grad(std::span<const double> w) const;  ///< gradient of h
    Vec stochastic_grad(std::span<const double> w, std::span<const std::size_t> indices) const;
    double grad_cost() const noexcept { return grad_cost_; }

private:
    Objective() = default;
    std::size_t dim_ = 0;
    std::optional<Loss> loss_;
    Fn fn_;
    GradFn grad_fn_;
    double theta_ = 0.0;
    Vec xi_;
    double grad_cost_ = 0.0;
};

// --- step rules ----------------------------------------------------------

/// gamma_t = 2 / (t + 1)
struct PredefinedDecay {};
/// gamma = argmin over [0, 1] of the L-smooth quadratic upper model.
struct QuadraticLineSearch {
    double L;
};
/// Golden section on the restriction gamma -> h(w + gamma (v - w)).
struct ExactLineSearch {
    double tol = 1e-8;
};
struct ShortStep {
    double L;
    double alpha;
};
/// Fixed base step for projected (S)GD.
struct ConstantEta {
    double eta;
};
using StepRule = std::variant<PredefinedDecay, QuadraticLineSearch, ExactLineSearch, ShortStep, ConstantEta>;

double step_size_predefined(std::size_t t);

struct ThetaSchedule {
    double theta;
    double Theta;
};
/// theta_t = t, Theta_t = t (t + 1) / 2.
ThetaSchedule theta_schedule(std::size_t t);

double line_search_quadratic(double g, double dist2, double L);
double short_step(double grad_dual_norm, double alpha, double L);
/// Golden-section minimization of phi over [0, 1]; returns the midpoint of
/// the final bracket, whose width is at most tol.
double exact_line_search(const std::function<double(double)>& phi, double tol);
std::size_t spa_batch_size(std::size_t t, std::size_t n);

// --- traces --------------------------------------------------------------

/// One row per completed update. Row t describes the iterate after t
/// updates and the quantities used to produce it.
struct TraceRecord {
    std::size_t t = 0;
    double loss_f = 0.0;
    std::optional<double> loss_h;
    std::optional<double> fw_gap;
    std::optional<double> gamma;
    std::optional<std::size_t> batch;
    std::optional<double> grad_norm;
    std::optional<double> step_ms;
    std::optional<double> oracle_ms;
    std::optional<double> proj_ms;

    bool operator==(const TraceRecord&) const = default;
};

/// Arithmetic done by the method itself (diagnostics excluded), in rough
/// multiply-add units.
struct CostCounter {
    double gradient = 0.0;
    double oracle = 0.0;
    double projection = 0.0;
    double vector = 0.0;
    std::size_t iterations = 0;

    double total() const noexcept { return gradient + oracle + projection + vector; }
    double per_iteration() const noexcept {
        return iterations ? total() / static_cast<double>(iterations) : 0.0;
    }
};

struct Trace {
    std::string method;
    double initial_loss_f = 0.0;
    std::optional<double> initial_fw_gap;
    std::vector<TraceRecord> records;
    Vec final_w;
    CostCounter cost;

    // Filled only with RunOptions::record_vectors.
    std::vector<Vec> iterates;  ///< w_0 .. w_T
    std::vector<Vec> oracle;    ///< v_1 .. v_T
    std::vector<Vec> z;         ///< z_0 .. z_{T-1} (PA only)
    std::vector<Vec> p;         ///< oracle inputs p_1 .. p_T
    std::vector<Vec> grads;     ///< raw gradients used at each update
};

struct RunOptions {
    std::size_t iters = 100;
    /// Starting point; empty means lmo of a random unit direction.
    Vec init;
    std::uint64_t seed = 1;
    bool record_vectors = false;
    bool timing = false;
    bool record_gap = true;
};

enum class PaOption { A, B };

Vec default_init(const FeasibleSet& set, Rng& rng);

Trace fw_run(const Objective& obj, const FeasibleSet& set, const StepRule& rule, const RunOptions& opt);
Trace pa_run(const Objective& obj, const FeasibleSet& set, PaOption option, const RunOptions& opt);
Trace spa_run(const Objective& obj, const FeasibleSet& set, const RunOptions& opt);
Trace projected_gd_run(const Objective& obj, const FeasibleSet& set, double eta, const RunOptions& opt);
/// eta_t = eta0 / sqrt(t) on minibatches of the given size.
Trace projected_sgd_run(const Objective& obj, const FeasibleSet& set, double eta0, std::size_t batch,
                        const RunOptions& opt);

/// Picks eta = c / L, c in {1e-3, 3e-3, ..., 1}, by the lowest loss after a
/// short probe run. Diverging candidates are skipped. batch > 0 probes SGD.
double tune_gd_eta(const Objective& obj, const FeasibleSet& set, double L, const RunOptions& opt,
                   std::size_t probe_iters = 50, std::size_t batch = 0);

inline constexpr double kDivergenceThreshold = 1e12;

}  // namespace projfree
