#include "projfree/suites.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "projfree/datasets.hpp"
#include "projfree/diagnostics.hpp"
#include "projfree/feasible_sets.hpp"
#include "projfree/losses.hpp"
#include "projfree/optimizers.hpp"
#include "projfree/perturbation.hpp"
#include "projfree/trace_io.hpp"

namespace projfree {

namespace {

namespace fs = std::filesystem;

std::string num(double v, const char* f = "%.4g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

CheckResult begin_check(int criterion, std::string name) {
    CheckResult r;
    r.criterion = criterion;
    r.name = std::move(name);
    return r;
}

void maybe_write(const SuiteOptions& opt, const std::string& name, const Trace& tr) {
    if (opt.trace_dir.empty()) return;
    write_trace_csv((fs::path(opt.trace_dir) / name).string(), tr.records);
}

// --- LSQ-B: boundary least squares --------------------------------------

constexpr double kLsqRadius = 0.5;
constexpr double kEpsilon = 1e-6;
constexpr double kDelta = 0.1;
constexpr std::uint64_t kXiSeed = 4242;
constexpr std::size_t kLsqIters = 2000;

SyntheticSpec lsqb_spec() {
    SyntheticSpec s;
    s.kind = SyntheticKind::Regression;
    s.n = 2000;
    s.d = 20;
    s.noise = 0.1;
    s.seed = 42;
    s.w_norm = 1.0;
    return s;
}

struct Problem {
    Loss loss;
    FeasibleSet set;
    Objective obj;
    double f_star;
    double L;
};

Objective perturbed(const Loss& loss, const FeasibleSet& set) {
    Rng rng(kXiSeed);
    return Objective(make_perturbed(loss, kEpsilon, set.euclidean_diameter(), kDelta, rng));
}

Problem lsqb() {
    Loss loss = Loss::quadratic(gen_regression(lsqb_spec()).data);
    FeasibleSet set = FeasibleSet::lp(Exponent(2.0), kLsqRadius, loss.dim());
    const ConstrainedOptimum opt = l2_least_squares_optimum(loss, kLsqRadius);
    Rng rng(7);
    const double L = loss.estimate_smoothness(set, 1, rng);
    Objective obj = perturbed(loss, set);
    return {std::move(loss), std::move(set), std::move(obj), opt.value, L};
}

RunOptions run_opts(std::size_t iters, std::uint64_t seed) {
    RunOptions o;
    o.iters = iters;
    o.seed = seed;
    return o;
}

// --- 1. PA rate -----------------------------------------------------------

CheckResult c1(const SuiteOptions& opt) {
    CheckResult r = begin_check(1, "LSQ-B PA rate");
    const auto start = std::chrono::steady_clock::now();
    const Problem p = lsqb();
    const Trace tr = pa_run(p.obj, p.set, PaOption::A, run_opts(kLsqIters, 1));
    maybe_write(opt, "c1_pa.csv", tr);
    const SlopeFit fit = loglog_slope(suboptimality_series(tr, p.f_star), 20);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.pass = fit.slope <= -1.7 && fit.r_squared >= 0.9 && secs < 60.0;
    r.detail = "slope=" + num(fit.slope) + " (required <= -1.7), r2=" + num(fit.r_squared) +
               " (required >= 0.9), runtime=" + num(secs, "%.2f") + " s (required < 60 s)" +
               (fit.clipped ? ", values clipped at 1e-14" : "");
    return r;
}

// --- 2. standard FW rate ------------------------------------------------

CheckResult c2(const SuiteOptions& opt) {
    CheckResult r = begin_check(2, "LSQ-B FWPLR rate");
    const Problem p = lsqb();
    const Trace tr = fw_run(p.obj, p.set, PredefinedDecay{}, run_opts(kLsqIters, 1));
    maybe_write(opt, "c2_fw.csv", tr);
    const auto series = suboptimality_series(tr, p.f_star);
    const SlopeFit fit = loglog_slope(series, 20);
    const double D = p.set.diameter();
    std::size_t violations = 0;
    double worst = 0.0;
    for (const auto& [t, gap] : series) {
        // Row t holds the iterate after t updates, i.e. w_{t+1} when w_1 is the start.
        const double bound = 2.0 * p.L * D * D / (t + 2.0);
        worst = std::max(worst, gap / bound);
        if (gap > bound) ++violations;
    }
    const bool slope_ok = fit.slope >= -1.6 && fit.slope <= -0.8;
    r.pass = slope_ok && violations == 0;
    r.detail = "slope=" + num(fit.slope) + " (required in [-1.6, -0.8]), r2=" + num(fit.r_squared) +
               "; bound 2LD^2/(t+1) violations=" + std::to_string(violations) +
               " (required 0), max ratio=" + num(worst);
    return r;
}

// --- 3. non-convex FW gap -------------------------------------------------

CheckResult c3(const SuiteOptions& opt) {
    CheckResult r = begin_check(3, "Bi-weight FW gap rate");
    Loss loss = Loss::biweight(gen_regression(lsqb_spec()).data);
    const FeasibleSet set = FeasibleSet::lp(Exponent(2.0), kLsqRadius, loss.dim());
    Rng rng(7);
    const double L = loss.estimate_smoothness(set, 200, rng);
    const double alpha = set.strong_convexity();
    const Objective obj = perturbed(loss, set);
    const Trace tr = fw_run(obj, set, ShortStep{L, alpha}, run_opts(kLsqIters, 1));
    maybe_write(opt, "c3_biweight.csv", tr);

    const auto gaps = min_gap_series(tr);
    const SlopeFit fit = loglog_slope(gaps, kDefaultBurnIn);

    // One-based gap indexing: k_1 is the gap at the start, k_{t+1} at row t.
    double best_f = tr.initial_loss_f;
    for (const auto& rec : tr.records) best_f = std::min(best_f, rec.loss_f);
    const double ell_1 = std::max(tr.initial_loss_f - best_f, 0.0);
    std::size_t violations = 0;
    double running = *tr.initial_fw_gap;
    for (std::size_t s = 1; s <= tr.records.size(); ++s) {
        const double bound = nonconvex_rate_bound(ell_1, alpha, L, kDelta, loss.dim(), s);
        if (running > bound) ++violations;
        if (tr.records[s - 1].fw_gap) running = std::min(running, *tr.records[s - 1].fw_gap);
    }
    r.pass = fit.slope <= -0.9 && violations == 0;
    r.detail = "min-gap slope=" + num(fit.slope) + " (required <= -0.9), r2=" + num(fit.r_squared) +
               (fit.clipped ? " (values clipped at 1e-14)" : "") + "; rate-bound violations=" +
               std::to_string(violations) + " (required 0), C'=" +
               num(nonconvex_constant(alpha, L, kDelta, loss.dim()));
    return r;
}

// --- 4. quasi-convex convergence ----------------------------------------

CheckResult c4(const SuiteOptions& opt) {
    CheckResult r = begin_check(4, "Squared-sigmoid FWLS convergence");
    SyntheticSpec s;
    s.kind = SyntheticKind::Classification;
    s.n = 500;
    s.d = 5;
    s.margin = 0.5;
    s.seed = 7;
    const Loss loss = Loss::squared_sigmoid(gen_classification(s).data);
    const FeasibleSet set = FeasibleSet::lp(Exponent(2.0), 10.0, loss.dim());
    const Objective obj(loss);
    constexpr std::size_t iters = 1000;
    const Trace main = fw_run(obj, set, ExactLineSearch{1e-8}, run_opts(iters, 1));
    maybe_write(opt, "c4_sigmoid.csv", main);

    double best_restart = std::numeric_limits<double>::infinity();
    for (std::uint64_t k = 0; k < 10; ++k) {
        RunOptions o = run_opts(iters, 100 + k);
        o.record_gap = false;
        best_restart = std::min(best_restart, fw_run(obj, set, ExactLineSearch{1e-8}, o).records.back().loss_f);
    }
    const double final_f = main.records.back().loss_f;
    const double diff = final_f - best_restart;

    // Rate window: eps < 1, ending where the suboptimality reaches the
    // resolution of the loss itself.
    double f_ref = best_restart;
    for (const auto& rec : main.records) f_ref = std::min(f_ref, rec.loss_f);
    const double resolution = 1e-12 * std::max(1.0, std::fabs(f_ref));
    std::vector<std::pair<double, double>> window;
    for (const auto& [t, e] : suboptimality_series(main, f_ref)) {
        if (e < resolution) break;
        if (e < 1.0) window.emplace_back(t, e);
    }
    std::string slope_txt;
    bool slope_ok = false;
    try {
        const SlopeFit fit = loglog_slope(window, kDefaultBurnIn);
        slope_ok = fit.slope <= -1.0 / 3.0;
        slope_txt = num(fit.slope) + " over t=" + num(fit.t_first, "%.0f") + ".." + num(fit.t_last, "%.0f");
    } catch (const Error& e) {
        slope_txt = std::string("unavailable (") + e.what() + ")";
    }
    r.pass = std::fabs(diff) <= 0.05 && slope_ok;
    r.detail = "final f - best of 10 restarts=" + num(diff) + " (required |.| <= 0.05); eps<1 slope=" + slope_txt +
               " (required <= -0.333)";
    return r;
}

// --- 5. SPA schedule and parity -----------------------------------------

CheckResult c5(const SuiteOptions& opt) {
    CheckResult r = begin_check(5, "SPA batch schedule and parity");
    const Problem p = lsqb();
    const std::size_t n = p.loss.num_samples();
    const Trace sched = spa_run(p.obj, p.set, run_opts(50, 11));
    std::size_t bad = 0;
    for (const auto& rec : sched.records)
        if (!rec.batch || *rec.batch != std::min<std::size_t>(rec.t * rec.t * rec.t * rec.t, n)) ++bad;

    std::string parity;
    bool all = true;
    for (std::uint64_t seed : {11, 12, 13}) {
        const Trace spa = spa_run(p.obj, p.set, run_opts(300, seed));
        const Trace pa = pa_run(p.obj, p.set, PaOption::B, run_opts(300, seed));
        maybe_write(opt, "c5_spa_seed" + std::to_string(seed) + ".csv", spa);
        maybe_write(opt, "c5_pab_seed" + std::to_string(seed) + ".csv", pa);
        const double es = spa.records.back().loss_f - p.f_star;
        const double ep = pa.records.back().loss_f - p.f_star;
        const bool ok = es <= 2.0 * ep;
        all = all && ok;
        parity += " seed " + std::to_string(seed) + ": " + num(es) + " vs 2x" + num(ep) + (ok ? " ok;" : " FAIL;");
    }
    r.pass = bad == 0 && all;
    r.detail = "batch mismatches t=1..50: " + std::to_string(bad) + " (required 0);" + parity;
    return r;
}

// --- 6. LMO vs brute force ----------------------------------------------

struct Family {
    std::string name;
    FeasibleSet set;
    std::function<Vec(Rng&)> sample;  // boundary or extreme point
};

Vec scale_to_norm(const FeasibleSet& set, Vec x) {
    const double n = set.norm(x);
    return scaled(x, set.radius() / n);
}

std::vector<Family> lmo_families() {
    std::vector<Family> fam;
    auto boundary = [](FeasibleSet set) {
        return [set](Rng& rng) { return scale_to_norm(set, gaussian_vec(set.dim(), rng)); };
    };
    auto add = [&](std::string name, FeasibleSet set) {
        auto sampler = boundary(set);
        fam.push_back({std::move(name), std::move(set), sampler});
    };
    const Exponent inf = Exponent::infinity();
    add("l1 d=2", FeasibleSet::lp(Exponent(1.0), 1.0, 2));
    add("l1.5 d=2", FeasibleSet::lp(Exponent(1.5), 1.0, 2));
    add("l1.5 d=3", FeasibleSet::lp(Exponent(1.5), 1.0, 3));
    add("l2 d=3", FeasibleSet::lp(Exponent(2.0), 1.0, 3));
    add("l3 d=2", FeasibleSet::lp(Exponent(3.0), 1.0, 2));
    add("linf d=2", FeasibleSet::lp(inf, 1.0, 2));
    add("schatten1.5 2x2", FeasibleSet::schatten(Exponent(1.5), 1.0, 2, 2));
    add("schatten2 2x2", FeasibleSet::schatten(Exponent(2.0), 1.0, 2, 2));
    // Nuclear and spectral balls: sample their extreme points directly
    // (rank-one and orthogonal matrices).
    fam.push_back({"schatten1 2x2", FeasibleSet::schatten(Exponent(1.0), 1.0, 2, 2), [](Rng& rng) {
                       Vec a = sample_unit_sphere(2, rng), b = sample_unit_sphere(2, rng);
                       return Vec{a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]};
                   }});
    fam.push_back({"schatten-inf 2x2", FeasibleSet::schatten(inf, 1.0, 2, 2), [](Rng& rng) {
                       const double phi = 2.0 * std::numbers::pi * uniform01(rng);
                       const double c = std::cos(phi), s = std::sin(phi);
                       if (uniform01(rng) < 0.5) return Vec{c, -s, s, c};
                       return Vec{c, s, s, -c};
                   }});
    add("group(2,2) 2x2", FeasibleSet::group(Exponent(2.0), Exponent(2.0), 1.0, 2, 2));
    add("group(1.5,2) 2x2", FeasibleSet::group(Exponent(1.5), Exponent(2.0), 1.0, 2, 2));
    add("group(2,1.5) 2x2", FeasibleSet::group(Exponent(2.0), Exponent(1.5), 1.0, 2, 2));
    return fam;
}

CheckResult c6(const SuiteOptions&) {
    CheckResult r = begin_check(6, "LMO equivalence");
    constexpr std::size_t kSamples = 1000000;
    constexpr std::size_t kDirections = 100;
    bool ok = true;
    std::string worst_name;
    double worst_gap = 0.0, worst_opt = -std::numeric_limits<double>::infinity();
    Rng rng(6);
    for (const Family& f : lmo_families()) {
        const std::size_t d = f.set.dim();
        Vec pts(kSamples * d);
        for (std::size_t k = 0; k < kSamples; ++k) {
            const Vec x = f.sample(rng);
            std::copy(x.begin(), x.end(), pts.begin() + static_cast<std::ptrdiff_t>(k * d));
        }
        for (std::size_t j = 0; j < kDirections; ++j) {
            const Vec c = sample_unit_sphere(d, rng);
            double brute = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < kSamples; ++k) {
                double s = 0.0;
                for (std::size_t i = 0; i < d; ++i) s += pts[k * d + i] * c[i];
                brute = std::min(brute, s);
            }
            const Vec v = f.set.lmo(c);
            const double val = dot(v, c);
            const bool feasible = f.set.contains(v, 1e-9);
            const double gap = std::fabs(val - brute);
            if (gap > worst_gap) {
                worst_gap = gap;
                worst_name = f.name;
            }
            worst_opt = std::max(worst_opt, val - brute);
            if (gap > 1e-3 || val > brute + 1e-9 || !feasible) ok = false;
        }
    }
    // l2 closed form.
    double l2_err = 0.0;
    const FeasibleSet l2 = FeasibleSet::lp(Exponent(2.0), 2.5, 7);
    for (int k = 0; k < 100; ++k) {
        const Vec c = gaussian_vec(7, rng);
        const Vec v = l2.lmo(c);
        const double nc = norm2(c);
        for (std::size_t i = 0; i < 7; ++i) l2_err = std::max(l2_err, std::fabs(v[i] + 2.5 * c[i] / nc));
    }
    r.pass = ok && l2_err <= 1e-12;
    r.detail = "max |lmo - brute| over 13 families x 100 directions x 1e6 points=" + num(worst_gap) + " (" +
               worst_name + "; required <= 1e-3), max lmo - brute=" + num(worst_opt) +
               " (required <= 1e-9); l2 closed-form error=" + num(l2_err) + " (required <= 1e-12)";
    return r;
}

// --- 7. projections -------------------------------------------------------

CheckResult c7(const SuiteOptions&) {
    CheckResult r = begin_check(7, "Projection correctness");
    const Exponent inf = Exponent::infinity();
    std::vector<std::pair<std::string, FeasibleSet>> fams{
        {"l1", FeasibleSet::lp(Exponent(1.0), 1.0, 5)},
        {"l1.5", FeasibleSet::lp(Exponent(1.5), 1.0, 5)},
        {"l2", FeasibleSet::lp(Exponent(2.0), 1.0, 5)},
        {"l3", FeasibleSet::lp(Exponent(3.0), 1.0, 5)},
        {"linf", FeasibleSet::lp(inf, 1.0, 5)},
        {"schatten1", FeasibleSet::schatten(Exponent(1.0), 1.0, 3, 2)},
        {"schatten1.5", FeasibleSet::schatten(Exponent(1.5), 1.0, 3, 2)},
        {"schatten2", FeasibleSet::schatten(Exponent(2.0), 1.0, 3, 2)},
        {"schatten-inf", FeasibleSet::schatten(inf, 1.0, 3, 2)},
        {"group(2,1.5)", FeasibleSet::group(Exponent(2.0), Exponent(1.5), 1.0, 3, 2)},
        {"group(1.5,2)", FeasibleSet::group(Exponent(1.5), Exponent(2.0), 1.0, 3, 2)},
        {"group(3,1.5)", FeasibleSet::group(Exponent(3.0), Exponent(1.5), 1.0, 3, 2)},
    };
    Rng rng(77);
    double worst_vi = -std::numeric_limits<double>::infinity(), worst_idem = 0.0;
    std::string vi_name;
    for (const auto& [name, set] : fams) {
        const std::size_t d = set.dim();
        std::vector<Vec> zs;
        for (int k = 0; k < 1000; ++k) zs.push_back(scaled(scale_to_norm(set, gaussian_vec(d, rng)), uniform01(rng)));
        for (int k = 0; k < 20; ++k) {
            const Vec x = scaled(gaussian_vec(d, rng), k < 2 ? 0.05 : 2.0);
            const Vec px = set.project(x);
            const Vec ppx = set.project(px);
            for (std::size_t i = 0; i < d; ++i) worst_idem = std::max(worst_idem, std::fabs(ppx[i] - px[i]));
            const Vec res = sub(x, px);
            for (const Vec& z : zs) {
                const double vi = dot(res, sub(z, px));
                if (vi > worst_vi) {
                    worst_vi = vi;
                    vi_name = name;
                }
            }
        }
    }
    // Grid oracle for l_1.5 in the plane.
    const FeasibleSet l15 = FeasibleSet::lp(Exponent(1.5), 1.0, 2);
    constexpr int kGrid = 2001;
    std::vector<std::array<double, 2>> grid;
    for (int i = 0; i < kGrid; ++i)
        for (int j = 0; j < kGrid; ++j) {
            const double a = -1.0 + 2.0 * i / (kGrid - 1), b = -1.0 + 2.0 * j / (kGrid - 1);
            const double pts[2] = {a, b};
            if (lp_norm(pts, Exponent(1.5)) <= 1.0) grid.push_back({a, b});
        }
    double worst_grid = 0.0;
    for (int k = 0; k < 10; ++k) {
        const Vec x = k == 0 ? Vec{1.0, 2.0} : scaled(gaussian_vec(2, rng), 2.0);
        const Vec px = l15.project(x);
        const double ours = norm2(sub(x, px));
        double best = std::numeric_limits<double>::infinity();
        for (const auto& g : grid) best = std::min(best, std::hypot(x[0] - g[0], x[1] - g[1]));
        worst_grid = std::max(worst_grid, std::fabs(ours - best));
    }
    r.pass = worst_vi <= 1e-8 && worst_idem <= 1e-10 && worst_grid <= 1e-3;
    r.detail = "max VI=" + num(worst_vi) + " (" + vi_name + "; required <= 1e-8), idempotence=" + num(worst_idem) +
               " (required <= 1e-10), l1.5 grid gap=" + num(worst_grid) + " (required <= 1e-3)";
    return r;
}

// --- 8. gradients vs finite differences ---------------------------------

CheckResult c8(const SuiteOptions&) {
    CheckResult r = begin_check(8, "Gradient fidelity");
    SyntheticSpec reg;
    reg.n = 40;
    reg.d = 4;
    reg.noise = 0.5;
    reg.seed = 8;
    SyntheticSpec cls = reg;
    cls.kind = SyntheticKind::Classification;
    SyntheticSpec mat;
    mat.kind = SyntheticKind::LowRank;
    mat.m = 5;
    mat.n = 4;
    mat.rank = 2;
    mat.fraction = 0.5;
    mat.seed = 8;
    const auto rd = gen_regression(reg).data;
    const auto cd = gen_classification(cls).data;
    std::vector<std::pair<std::string, Loss>> losses{
        {"logistic", Loss::logistic(cd, BiasMode::Constrained)},
        {"quadratic", Loss::quadratic(rd, BiasMode::Constrained)},
        {"observed_quadratic", Loss::observed_quadratic(gen_lowrank(mat).observed)},
        {"squared_sigmoid", Loss::squared_sigmoid(cd, BiasMode::Constrained)},
        {"biweight", Loss::biweight(rd, BiasMode::Constrained)},
    };
    Rng rng(88);
    constexpr double h = 1e-5;
    double worst = 0.0;
    std::string worst_name;
    for (const auto& [name, loss] : losses) {
        for (int k = 0; k < 100; ++k) {
            Vec w = gaussian_vec(loss.dim(), rng);
            const Vec g = loss.grad(w);
            Vec fd(w.size());
            for (std::size_t i = 0; i < w.size(); ++i) {
                const double keep = w[i];
                w[i] = keep + h;
                const double fp = loss.eval(w);
                w[i] = keep - h;
                const double fm = loss.eval(w);
                w[i] = keep;
                fd[i] = (fp - fm) / (2.0 * h);
            }
            const double rel = norm2(sub(fd, g)) / std::max(norm2(g), 1e-8);
            if (rel > worst) {
                worst = rel;
                worst_name = name;
            }
        }
    }
    r.pass = worst <= 1e-5;
    r.detail = "max relative error=" + num(worst) + " (" + worst_name + "; required <= 1e-5)";
    return r;
}

// --- 9. oracle Lipschitz inequality -------------------------------------

CheckResult c9(const SuiteOptions&) {
    CheckResult r = begin_check(9, "Oracle Lipschitz inequality");
    Rng rng(99);
    std::string detail;
    std::size_t total_violations = 0;
    for (const auto& [name, set] : {std::pair{std::string("l2"), FeasibleSet::lp(Exponent(2.0), 1.0, 5)},
                                    std::pair{std::string("l1.5"), FeasibleSet::lp(Exponent(1.5), 1.0, 5)}}) {
        const double alpha = set.strong_convexity();
        std::size_t literal = 0, doubled = 0;
        double worst_ratio = 0.0;
        for (int k = 0; k < 10000; ++k) {
            const Vec p = scaled(gaussian_vec(5, rng), std::exp(uniform01(rng) * 4.0 - 2.0));
            const Vec q = scaled(gaussian_vec(5, rng), std::exp(uniform01(rng) * 4.0 - 2.0));
            const double lhs = norm2(sub(set.lmo(p), set.lmo(q)));
            const double rhs = norm2(sub(p, q)) / (alpha * (norm2(p) + norm2(q)));
            if (lhs > rhs + 1e-9) ++literal;
            if (lhs > 2.0 * rhs + 1e-9) ++doubled;
            worst_ratio = std::max(worst_ratio, lhs / rhs);
        }
        total_violations += literal;
        detail += " " + name + ": " + std::to_string(literal) + "/10000 violations (max lhs/rhs=" + num(worst_ratio) +
                  "; with factor 2: " + std::to_string(doubled) + ");";
    }
    r.pass = total_violations == 0;
    r.detail = "required 0 violations beyond 1e-9;" + detail;
    return r;
}

// --- 10. perturbation floor ---------------------------------------------

CheckResult c10(const SuiteOptions&) {
    CheckResult r = begin_check(10, "Perturbation gradient floor");
    constexpr std::size_t d = 10;
    constexpr int kDraws = 100000;
    // f = 0 through a quadratic loss on an all-zero design.
    const Loss zero = Loss::quadratic(TabularDataset(Mat(1, d), Vec{0.0}));
    const Vec w(d, 0.0);
    Rng rng(1010);
    std::vector<Vec> grads;
    grads.reserve(kDraws);
    double m2 = 0.0;
    for (int k = 0; k < kDraws; ++k) {
        const PerturbedLoss h(zero, 1.0, sample_unit_sphere(d, rng), 0.5);
        grads.push_back(h.grad(w));
        m2 += grads.back()[0] * grads.back()[0];
    }
    m2 /= kDraws;
    bool ok = std::fabs(m2 - 1.0 / d) <= 3e-3;
    std::string detail = "E[xi_1^2]=" + num(m2, "%.5f") + " vs 1/d=0.1 (required within 3e-3);";
    for (double delta : {0.1, 0.3}) {
        const double floor = gradient_norm_floor(delta, d);
        int below_norm = 0, below_coord = 0;
        for (const Vec& g : grads) {
            if (norm2(g) < floor) ++below_norm;
            if (std::fabs(g[0]) < floor) ++below_coord;
        }
        const double rn = static_cast<double>(below_norm) / kDraws, rc = static_cast<double>(below_coord) / kDraws;
        ok = ok && rn <= delta + 0.02 && rc <= delta + 0.02;
        detail += " delta=" + num(delta) + ": floor=" + num(floor) + ", rate(||grad h|| < floor)=" + num(rn) +
                  ", rate(|grad h_1| < floor)=" + num(rc) + " (required <= " + num(delta + 0.02) + ");";
    }
    r.pass = ok;
    r.detail = detail;
    return r;
}

// --- 11. iteration economy ------------------------------------------------

CheckResult c11(const SuiteOptions& opt) {
    CheckResult r = begin_check(11, "Iteration economy");
    const Problem p = lsqb();
    const RunOptions o = run_opts(kLsqIters, 1);
    const Trace pa = pa_run(p.obj, p.set, PaOption::A, o);
    const Trace fw = fw_run(p.obj, p.set, PredefinedDecay{}, o);
    const double eta = tune_gd_eta(p.obj, p.set, p.L, o);
    const Trace gd = projected_gd_run(p.obj, p.set, eta, o);
    maybe_write(opt, "c11_gd.csv", gd);
    const auto cpa = detect_convergence(pa, p.f_star);
    const auto cfw = detect_convergence(fw, p.f_star);
    const auto cgd = detect_convergence(gd, p.f_star);
    auto it = [](const ConvergencePoint& c) { return c.converged ? std::to_string(c.t) : std::string("none"); };
    const double ratio = pa.cost.per_iteration() / fw.cost.per_iteration();
    const bool vs_fw = cpa.converged && (!cfw.converged || cpa.t < cfw.t);
    const bool vs_gd = cpa.converged && (!cgd.converged || cpa.t <= cgd.t);
    r.pass = vs_fw && vs_gd && ratio <= 2.0;
    r.detail = "+/-2% iterations: PA=" + it(cpa) + ", FWPLR=" + it(cfw) + " (PA required strictly fewer), GD(eta=" +
               num(eta * p.L) + "/L)=" + it(cgd) + " (PA required <=); per-iteration cost PA/FWPLR=" + num(ratio) +
               " (required <= 2)";
    return r;
}

// --- 12. determinism ------------------------------------------------------

CheckResult c12(const SuiteOptions&) {
    CheckResult r = begin_check(12, "Determinism");
    const auto base = fs::temp_directory_path() /
                      ("projfree-determinism-" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
    const fs::path a = base / "a", b = base / "b";
    fs::create_directories(a);
    fs::create_directories(b);
    const std::vector<int> producers{1, 2, 3, 4, 5, 11};
    for (const fs::path& dir : {a, b}) {
        SuiteOptions o;
        o.trace_dir = dir.string();
        for (int c : producers) run_criterion(c, o);
    }
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    std::size_t files = 0, differ = 0;
    for (const auto& e : fs::directory_iterator(a)) {
        ++files;
        const fs::path other = b / e.path().filename();
        if (!fs::exists(other) || slurp(e.path()) != slurp(other)) ++differ;
    }
    std::size_t files_b = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(b)) ++files_b;
    std::error_code ec;
    fs::remove_all(base, ec);
    r.pass = files > 0 && files == files_b && differ == 0;
    r.detail = std::to_string(files) + " trace files from criteria 1-5, 11 written twice; " + std::to_string(differ) +
               " differ (required 0)";
    return r;
}

}  // namespace

std::vector<int> suite_criteria(const std::string& name) {
    if (name == "oracles") return {6, 7, 8, 9, 10};
    if (name == "convex") return {1, 2, 5, 11};
    if (name == "quasi") return {4};
    if (name == "nonconvex") return {3};
    if (name == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    fail(ErrorKind::InvalidArgument, "unknown suite '" + name + "' (expected convex, quasi, nonconvex, oracles or all)");
}

CheckResult run_criterion(int criterion, const SuiteOptions& opt) {
    using Fn = CheckResult (*)(const SuiteOptions&);
    static constexpr Fn table[] = {c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11, c12};
    if (criterion < 1 || criterion > kNumCriteria)
        fail(ErrorKind::InvalidArgument, "criterion must lie in 1.." + std::to_string(kNumCriteria));
    const auto start = std::chrono::steady_clock::now();
    CheckResult res;
    try {
        res = table[criterion - 1](opt);
    } catch (const Error& e) {
        res.criterion = criterion;
        res.pass = false;
        res.detail = std::string("error (") + to_string(e.kind()) + "): " + e.what();
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

std::string format_result(const CheckResult& r) {
    return std::string(r.pass ? "PASS" : "FAIL") + " criterion " + std::to_string(r.criterion) + " [" + r.name +
           "] " + r.detail + " (" + num(r.seconds, "%.2f") + " s)";
}

std::size_t suite_threads(const SuiteOptions& opt) {
    if (opt.threads > 0) return opt.threads;
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("PROJFREE_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) n = static_cast<std::size_t>(v);
        else fail(ErrorKind::InvalidArgument, "PROJFREE_THREADS must be a positive integer");
    }
    return n;
}

std::vector<CheckResult> run_criteria(const std::vector<int>& criteria, const SuiteOptions& opt, std::ostream& out) {
    const std::size_t n = criteria.size();
    std::vector<CheckResult> results(n);
    std::vector<bool> done(n, false);
    std::mutex mu;
    std::condition_variable cv;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < n;) {
            CheckResult res = run_criterion(criteria[k], opt);
            std::lock_guard lock(mu);
            results[k] = std::move(res);
            done[k] = true;
            cv.notify_all();
        }
    };
    const std::size_t workers = std::min(suite_threads(opt), std::max<std::size_t>(n, 1));
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
    // Single writer: lines appear in criterion order as soon as each is ready.
    for (std::size_t k = 0; k < n; ++k) {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return done[k]; });
        out << format_result(results[k]) << std::endl;
    }
    for (auto& t : pool) t.join();
    return results;
}

}  // namespace projfree
