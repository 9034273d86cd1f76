#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "projfree/config.hpp"
#include "projfree/diagnostics.hpp"
#include "projfree/error.hpp"
#include "projfree/suites.hpp"
#include "projfree/trace_io.hpp"

using namespace projfree;

namespace {

enum Exit { kPass = 0, kCheckFailure = 1, kUsage = 2, kNumeric = 3 };

int exit_code(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::NumericFailure:
        case ErrorKind::NonFinite:
        case ErrorKind::Divergence:
        case ErrorKind::NotStronglyConvex:
            return kNumeric;
        default:
            return kUsage;
    }
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed, std::optional<std::size_t> iters,
            const std::string& out) {
    RunConfig cfg = load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (iters) cfg.iters = *iters;
    if (!out.empty()) cfg.trace_path = out;
    if (cfg.iters == 0) fail(ErrorKind::Config, "optimizer.iters: must be at least 1");

    const RunResult res = execute(cfg);
    if (!cfg.trace_path.empty()) write_trace_csv(cfg.trace_path, res.trace.records);

    std::cout << "method: " << res.trace.method << "\n"
              << "set: " << res.set_description << "\n"
              << "iterations: " << res.trace.records.size() << "\n"
              << "final loss: " << fmt(res.final_loss) << "\n"
              << "min FW gap: " << (res.min_gap ? fmt(*res.min_gap) : std::string("n/a")) << "\n"
              << "f*: " << fmt(res.f_star) << (res.f_star_exact ? " (exact)" : " (best known)") << "\n"
              << "L: " << fmt(res.L) << "\n"
              << "convergence (+/-2%): "
              << (res.convergence.converged ? "iteration " + std::to_string(res.convergence.t) : std::string("not reached"))
              << "\n";
    if (!cfg.trace_path.empty()) std::cout << "trace: " << cfg.trace_path << "\n";
    return kPass;
}

int cmd_suite(const std::string& name) {
    const std::vector<int> criteria = suite_criteria(name);
    const auto results = run_criteria(criteria, SuiteOptions{}, std::cout);
    std::size_t failed = 0;
    for (const auto& r : results) failed += r.pass ? 0 : 1;
    std::cout << name << ": " << results.size() - failed << "/" << results.size() << " checks passed\n";
    return failed ? kCheckFailure : kPass;
}

int cmd_slope(const std::string& path, std::size_t burn_in, const std::string& column, std::optional<double> f_star) {
    const auto records = read_trace_csv(path);
    std::vector<std::pair<double, double>> series;
    for (const auto& rec : records) {
        std::optional<double> v;
        if (column == "loss_f") v = rec.loss_f;
        else if (column == "loss_h") v = rec.loss_h;
        else if (column == "fw_gap") v = rec.fw_gap;
        else if (column == "grad_norm") v = rec.grad_norm;
        else fail(ErrorKind::InvalidArgument, "--column must be loss_f, loss_h, fw_gap or grad_norm");
        if (!v) continue;
        series.emplace_back(static_cast<double>(rec.t), f_star ? *v - *f_star : *v);
    }
    const SlopeFit fit = loglog_slope(series, burn_in);
    std::cout << "slope: " << fmt(fit.slope) << "\n"
              << "intercept: " << fmt(fit.intercept) << "\n"
              << "r2: " << fmt(fit.r_squared) << "\n"
              << "window: t=" << fmt(fit.t_first) << ".." << fmt(fit.t_last) << " (" << fit.points
              << " points, burn-in " << fit.burn_in << ")\n";
    if (fit.clipped) std::cout << "note: values below " << fmt(kSlopeFloor) << " were clipped\n";
    return kPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"projfree: projection-free optimization experiments"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run one optimizer from a config file");
    std::string config_path, out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> iters;
    run->add_option("--config", config_path, "JSON config file")->required();
    run->add_option("--seed", seed, "Override optimizer.seed");
    run->add_option("--iters", iters, "Override optimizer.iters");
    run->add_option("--out", out, "Trace CSV path (overrides output.trace)");

    auto* suite = app.add_subcommand("suite", "Run an acceptance suite");
    std::string suite_name;
    suite->add_option("name", suite_name, "convex, quasi, nonconvex, oracles or all")->required();

    auto* slope = app.add_subcommand("slope", "Fit a log-log slope to a trace column");
    std::string trace_path, column = "loss_f";
    std::size_t burn_in = kDefaultBurnIn;
    std::optional<double> f_star;
    slope->add_option("trace", trace_path, "Trace CSV")->required();
    slope->add_option("--burn-in", burn_in, "Ignore rows with t <= N");
    slope->add_option("--column", column, "loss_f (default), loss_h, fw_gap or grad_norm");
    slope->add_option("--f-star", f_star, "Subtract this value before fitting");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kPass : kUsage;
    }

    try {
        if (*run) return cmd_run(config_path, seed, iters, out);
        if (*suite) return cmd_suite(suite_name);
        return cmd_slope(trace_path, burn_in, column, f_star);
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
        return exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
}
