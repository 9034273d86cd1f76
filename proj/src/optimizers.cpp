#include "projfree/optimizers.hpp"

#include <array>
#include <chrono>
#include <cmath>

#include "projfree/diagnostics.hpp"

namespace projfree {

// --- Objective -----------------------------------------------------------

Objective::Objective(Loss f) : dim_(f.dim()), grad_cost_(f.grad_cost()) { loss_.emplace(std::move(f)); }

Objective::Objective(PerturbedLoss h)
    : dim_(h.base().dim()), theta_(h.theta()), xi_(h.xi()), grad_cost_(h.base().grad_cost()) {
    loss_.emplace(h.base());
}

Objective Objective::custom(std::size_t dim, Fn f, GradFn grad, double grad_cost) {
    if (dim == 0) fail(ErrorKind::InvalidArgument, "objective dimension must be positive");
    Objective o;
    o.dim_ = dim;
    o.fn_ = std::move(f);
    o.grad_fn_ = std::move(grad);
    o.grad_cost_ = grad_cost > 0.0 ? grad_cost : static_cast<double>(dim);
    return o;
}

double Objective::f(std::span<const double> w) const { return loss_ ? loss_->eval(w) : fn_(w); }

double Objective::h(std::span<const double> w) const {
    const double base = f(w);
    return perturbed() ? base + theta_ * dot(xi_, w) : base;
}

Vec Objective::grad_f(std::span<const double> w) const { return loss_ ? loss_->grad(w) : grad_fn_(w); }

Vec Objective::grad(std::span<const double> w) const {
    Vec g = grad_f(w);
    if (perturbed()) axpy(theta_, xi_, g);
    return g;
}

Vec Objective::stochastic_grad(std::span<const double> w, std::span<const std::size_t> indices) const {
    if (!loss_) fail(ErrorKind::Unsupported, "stochastic gradient needs a sample-structured loss");
    Vec g = loss_->stochastic_grad(w, indices);
    if (perturbed()) axpy(theta_, xi_, g);
    return g;
}

// --- step rules ----------------------------------------------------------

double step_size_predefined(std::size_t t) {
    if (t == 0) fail(ErrorKind::InvalidArgument, "iteration counter starts at 1");
    return 2.0 / (static_cast<double>(t) + 1.0);
}

ThetaSchedule theta_schedule(std::size_t t) {
    if (t == 0) fail(ErrorKind::InvalidArgument, "iteration counter starts at 1");
    const double td = static_cast<double>(t);
    return {td, td * (td + 1.0) / 2.0};
}

double line_search_quadratic(double g, double dist2, double L) {
    if (!(L > 0.0)) fail(ErrorKind::InvalidArgument, "line search needs L > 0");
    if (dist2 < 0.0) fail(ErrorKind::InvalidArgument, "squared distance must be nonnegative");
    if (dist2 == 0.0) return 0.0;
    return std::clamp(-g / (L * dist2), 0.0, 1.0);
}

double short_step(double grad_dual_norm, double alpha, double L) {
    const double s = alpha * grad_dual_norm / 4.0;
    if (L < s) return 1.0;
    return s / L;
}

double exact_line_search(const std::function<double(double)>& phi, double tol) {
    if (!(tol > 0.0)) fail(ErrorKind::InvalidArgument, "line search tolerance must be positive");
    const double rho = (std::sqrt(5.0) - 1.0) / 2.0;
    auto eval = [&](double g) {
        const double v = phi(g);
        if (!std::isfinite(v)) fail(ErrorKind::NonFinite, "line search restriction is not finite");
        return v;
    };
    double a = 0.0, b = 1.0;
    double c = b - rho * (b - a), d = a + rho * (b - a);
    double fc = eval(c), fd = eval(d);
    while (b - a > tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - rho * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + rho * (b - a);
            fd = eval(d);
        }
    }
    return 0.5 * (a + b);
}

std::size_t spa_batch_size(std::size_t t, std::size_t n) {
    if (t == 0 || n == 0) fail(ErrorKind::InvalidArgument, "batch schedule needs t >= 1 and N >= 1");
    // t^4 overflows 64 bits past t ~ 65535; N is far smaller long before.
    if (t >= 65536) return n;
    const std::size_t t4 = t * t * t * t;
    return std::min(t4, n);
}

// --- shared run plumbing -------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

/// Per-run bookkeeping common to all methods.
class Recorder {
public:
    Recorder(const Objective& obj, const FeasibleSet& set, const RunOptions& opt, std::string method)
        : obj_(obj), set_(set), opt_(opt) {
        trace_.method = std::move(method);
        trace_.records.reserve(opt.iters);
    }

    Trace& trace() { return trace_; }

    /// Gap of the unperturbed f at w; grad_f may be passed when known.
    std::optional<double> gap(std::span<const double> w, const Vec* grad_f) const {
        if (!opt_.record_gap) return std::nullopt;
        if (grad_f) return fw_gap(set_, w, *grad_f);
        return fw_gap(set_, w, obj_.grad_f(w));
    }

    void start(std::span<const double> w0, const Vec* grad_f) {
        trace_.initial_loss_f = obj_.f(w0);
        if (!std::isfinite(trace_.initial_loss_f)) fail(ErrorKind::NonFinite, "initial loss is not finite");
        trace_.initial_fw_gap = gap(w0, grad_f);
        if (opt_.record_vectors) trace_.iterates.emplace_back(w0.begin(), w0.end());
    }

    void finish_row(TraceRecord rec, std::span<const double> w, const Vec* grad_f, bool divergence_is_error) {
        rec.loss_f = obj_.f(w);
        if (obj_.perturbed()) rec.loss_h = obj_.h(w);
        const double watched = rec.loss_h.value_or(rec.loss_f);
        if (!std::isfinite(watched) || std::fabs(watched) > kDivergenceThreshold) {
            const std::string msg = trace_.method + " diverged at iteration " + std::to_string(rec.t);
            fail(divergence_is_error || std::isfinite(watched) ? ErrorKind::Divergence : ErrorKind::NonFinite, msg);
        }
        rec.fw_gap = gap(w, grad_f);
        if (!opt_.timing) rec.step_ms = rec.oracle_ms = rec.proj_ms = std::nullopt;
        trace_.records.push_back(rec);
        if (opt_.record_vectors) trace_.iterates.emplace_back(w.begin(), w.end());
        trace_.cost.iterations = rec.t;
    }

    void finish(Vec w) { trace_.final_w = std::move(w); }

private:
    const Objective& obj_;
    const FeasibleSet& set_;
    const RunOptions& opt_;
    Trace trace_;
};

void check_problem(const Objective& obj, const FeasibleSet& set, const RunOptions& opt) {
    if (obj.dim() != set.dim())
        fail(ErrorKind::ShapeMismatch, "objective has " + std::to_string(obj.dim()) + " parameters but " +
                                           set.describe() + " has dimension " + std::to_string(set.dim()));
    if (opt.iters == 0) fail(ErrorKind::InvalidArgument, "iteration budget must be at least 1");
}

Vec initial_point(const FeasibleSet& set, const RunOptions& opt, Rng& rng) {
    if (opt.init.empty()) return default_init(set, rng);
    if (opt.init.size() != set.dim()) fail(ErrorKind::ShapeMismatch, "initial point has the wrong dimension");
    require_finite(opt.init, "initial point");
    if (!set.contains(opt.init, 1e-8)) fail(ErrorKind::InvalidArgument, "initial point lies outside " + set.describe());
    return opt.init;
}

}  // namespace

Vec default_init(const FeasibleSet& set, Rng& rng) { return set.lmo(sample_unit_sphere(set.dim(), rng)); }

// --- Frank-Wolfe ---------------------------------------------------------

Trace fw_run(const Objective& obj, const FeasibleSet& set, const StepRule& rule, const RunOptions& opt) {
    check_problem(obj, set, opt);
    if (std::holds_alternative<ConstantEta>(rule)) fail(ErrorKind::InvalidArgument, "constant eta is a GD rule");
    Rng rng(opt.seed);
    Vec w = initial_point(set, opt, rng);
    const double d = static_cast<double>(w.size());

    static constexpr std::array<const char*, 5> names{"fw-predefined", "fw-quadratic-ls", "fw-exact-ls",
                                                      "fw-short-step", "fw"};
    Recorder rec(obj, set, opt, names[rule.index()]);
    CostCounter& cost = rec.trace().cost;

    Vec g = obj.grad(w);
    cost.gradient += obj.grad_cost();
    rec.start(w, obj.perturbed() ? nullptr : &g);

    for (std::size_t t = 1; t <= opt.iters; ++t) {
        const auto t0 = Clock::now();
        TraceRecord row;
        row.t = t;
        row.grad_norm = norm2(g);

        const auto to = Clock::now();
        const Vec v = set.lmo(g);
        row.oracle_ms = ms_since(to);
        cost.oracle += set.lmo_cost();

        const Vec dir = sub(v, w);
        cost.vector += 2.0 * d;
        double gamma = 0.0;
        std::visit(
            [&](const auto& r) {
                using T = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<T, PredefinedDecay>) {
                    gamma = step_size_predefined(t);
                } else if constexpr (std::is_same_v<T, QuadraticLineSearch>) {
                    gamma = line_search_quadratic(dot(dir, g), dot(dir, dir), r.L);
                    cost.vector += 4.0 * d;
                } else if constexpr (std::is_same_v<T, ExactLineSearch>) {
                    std::size_t evals = 0;
                    auto phi = [&](double s) {
                        ++evals;
                        Vec x = w;
                        axpy(s, dir, x);
                        return obj.h(x);
                    };
                    gamma = exact_line_search(phi, r.tol);
                    if (phi(gamma) > obj.h(w)) gamma = 0.0;
                    cost.gradient += 0.5 * obj.grad_cost() * static_cast<double>(evals);
                } else if constexpr (std::is_same_v<T, ShortStep>) {
                    gamma = short_step(set.dual_norm(g), r.alpha, r.L);
                    cost.vector += 2.0 * d;
                }
            },
            rule);
        row.gamma = gamma;
        axpy(gamma, dir, w);
        if (opt.record_vectors) {
            rec.trace().oracle.push_back(v);
            rec.trace().p.push_back(g);
        }

        g = obj.grad(w);
        cost.gradient += obj.grad_cost();
        row.step_ms = ms_since(t0);
        rec.finish_row(row, w, obj.perturbed() ? nullptr : &g, false);
    }
    rec.finish(std::move(w));
    return std::move(rec.trace());
}

// --- Primal Averaging ----------------------------------------------------

namespace {

Trace pa_impl(const Objective& obj, const FeasibleSet& set, PaOption option, bool stochastic, const RunOptions& opt) {
    check_problem(obj, set, opt);
    const std::size_t n_samples = obj.num_samples();
    if (stochastic && n_samples == 0) fail(ErrorKind::Unsupported, "SPA needs a loss with sample structure");
    Rng rng(opt.seed);
    Vec w = initial_point(set, opt, rng);
    Vec v = w;
    Vec p(w.size(), 0.0);
    const double d = static_cast<double>(w.size());

    Recorder rec(obj, set, opt, stochastic ? "spa" : (option == PaOption::A ? "pa-a" : "pa-b"));
    CostCounter& cost = rec.trace().cost;
    rec.start(w, nullptr);

    for (std::size_t t = 1; t <= opt.iters; ++t) {
        const auto t0 = Clock::now();
        TraceRecord row;
        row.t = t;
        const double gamma = step_size_predefined(t);
        row.gamma = gamma;

        const Vec z = lerp(w, v, gamma);
        cost.vector += 3.0 * d;

        Vec g;
        if (stochastic) {
            const std::size_t nt = spa_batch_size(t, n_samples);
            row.batch = nt;
            if (nt == n_samples) {
                g = obj.grad(z);
                cost.gradient += obj.grad_cost();
            } else {
                const auto idx = sample_without_replacement(n_samples, nt, rng);
                g = obj.stochastic_grad(z, idx);
                cost.gradient += obj.grad_cost() * static_cast<double>(nt) / static_cast<double>(n_samples);
            }
        } else {
            g = obj.grad(z);
            cost.gradient += obj.grad_cost();
        }

        if (option == PaOption::A) {
            const auto [theta, Theta] = theta_schedule(t);
            for (std::size_t i = 0; i < p.size(); ++i) p[i] = ((Theta - theta) * p[i] + theta * g[i]) / Theta;
            cost.vector += 3.0 * d;
        } else {
            p = g;
        }
        row.grad_norm = norm2(p);

        const auto to = Clock::now();
        v = set.lmo(p);
        row.oracle_ms = ms_since(to);
        cost.oracle += set.lmo_cost();

        w = lerp(w, v, gamma);
        cost.vector += 3.0 * d;
        row.step_ms = ms_since(t0);

        if (opt.record_vectors) {
            rec.trace().z.push_back(z);
            rec.trace().grads.push_back(g);
            rec.trace().p.push_back(p);
            rec.trace().oracle.push_back(v);
        }
        rec.finish_row(row, w, nullptr, false);
    }
    rec.finish(std::move(w));
    return std::move(rec.trace());
}

}  // namespace

Trace pa_run(const Objective& obj, const FeasibleSet& set, PaOption option, const RunOptions& opt) {
    return pa_impl(obj, set, option, false, opt);
}

Trace spa_run(const Objective& obj, const FeasibleSet& set, const RunOptions& opt) {
    return pa_impl(obj, set, PaOption::B, true, opt);
}

// --- projected gradient baselines ----------------------------------------

namespace {

Trace gd_impl(const Objective& obj, const FeasibleSet& set, double eta0, std::size_t batch, const RunOptions& opt) {
    check_problem(obj, set, opt);
    if (!(eta0 > 0.0) || !std::isfinite(eta0)) fail(ErrorKind::InvalidArgument, "step size eta must be positive");
    const bool stochastic = batch > 0;
    const std::size_t n_samples = obj.num_samples();
    if (stochastic && (n_samples == 0 || batch > n_samples))
        fail(ErrorKind::InvalidArgument, "SGD batch must lie in [1, N]");
    Rng rng(opt.seed);
    Vec w = initial_point(set, opt, rng);
    const double d = static_cast<double>(w.size());

    Recorder rec(obj, set, opt, stochastic ? "sgd" : "gd");
    CostCounter& cost = rec.trace().cost;
    // Projection cost in the same units as lmo_cost: a norm pass plus a few
    // sweeps; iterative projections are charged per call by their kind.
    const double proj_cost = set.lmo_cost() * 2.0;

    Vec g = stochastic ? Vec{} : obj.grad(w);
    if (!stochastic) cost.gradient += obj.grad_cost();
    rec.start(w, (!stochastic && !obj.perturbed()) ? &g : nullptr);

    for (std::size_t t = 1; t <= opt.iters; ++t) {
        const auto t0 = Clock::now();
        TraceRecord row;
        row.t = t;
        double eta = eta0;
        if (stochastic) {
            const auto idx = sample_without_replacement(n_samples, batch, rng);
            g = obj.stochastic_grad(w, idx);
            cost.gradient += obj.grad_cost() * static_cast<double>(batch) / static_cast<double>(n_samples);
            row.batch = batch;
            eta = eta0 / std::sqrt(static_cast<double>(t));
        }
        row.grad_norm = norm2(g);
        Vec x = w;
        axpy(-eta, g, x);
        cost.vector += 2.0 * d;

        const auto tp = Clock::now();
        w = set.project(x);
        row.proj_ms = ms_since(tp);
        cost.projection += proj_cost;

        if (!stochastic) {
            g = obj.grad(w);
            cost.gradient += obj.grad_cost();
        }
        row.step_ms = ms_since(t0);
        if (opt.record_vectors) rec.trace().grads.push_back(g);
        rec.finish_row(row, w, (!stochastic && !obj.perturbed()) ? &g : nullptr, true);
    }
    rec.finish(std::move(w));
    return std::move(rec.trace());
}

}  // namespace

Trace projected_gd_run(const Objective& obj, const FeasibleSet& set, double eta, const RunOptions& opt) {
    return gd_impl(obj, set, eta, 0, opt);
}

Trace projected_sgd_run(const Objective& obj, const FeasibleSet& set, double eta0, std::size_t batch,
                        const RunOptions& opt) {
    if (batch == 0) fail(ErrorKind::InvalidArgument, "SGD batch must be at least 1");
    return gd_impl(obj, set, eta0, batch, opt);
}

double tune_gd_eta(const Objective& obj, const FeasibleSet& set, double L, const RunOptions& opt,
                   std::size_t probe_iters, std::size_t batch) {
    if (!(L > 0.0)) fail(ErrorKind::InvalidArgument, "eta tuning needs L > 0");
    static constexpr std::array<double, 7> grid{1e-3, 3e-3, 1e-2, 3e-2, 1e-1, 3e-1, 1.0};
    RunOptions probe = opt;
    probe.iters = probe_iters;
    probe.record_vectors = false;
    probe.timing = false;
    probe.record_gap = false;
    double best_eta = 0.0, best_loss = std::numeric_limits<double>::infinity();
    for (double c : grid) {
        try {
            const Trace tr = gd_impl(obj, set, c / L, batch, probe);
            const double loss = tr.records.back().loss_h.value_or(tr.records.back().loss_f);
            if (loss < best_loss) {
                best_loss = loss;
                best_eta = c / L;
            }
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Divergence && e.kind() != ErrorKind::NonFinite) throw;
        }
    }
    if (best_eta == 0.0) fail(ErrorKind::Divergence, "every step size on the tuning grid diverged");
    return best_eta;
}

}  // namespace projfree
