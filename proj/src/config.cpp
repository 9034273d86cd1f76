#include "projfree/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace projfree {

namespace {

using json = nlohmann::json;

[[noreturn]] void config_error(const std::string& field, const std::string& msg) {
    fail(ErrorKind::Config, field + ": " + msg);
}

/// A JSON object section that remembers which keys were consumed so unknown
/// keys (usually typos) can be reported.
class Section {
public:
    Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
        if (!j_.is_object()) config_error(name_, "expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }
    std::string field(const std::string& key) const { return name_ + "." + key; }

    const json* get(const std::string& key) {
        used_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    std::string str(const std::string& key, const std::string& fallback) {
        const json* v = get(key);
        if (!v) return fallback;
        if (!v->is_string()) config_error(field(key), "expected a string");
        return v->get<std::string>();
    }
    double num(const std::string& key, double fallback) {
        const json* v = get(key);
        if (!v) return fallback;
        if (!v->is_number()) config_error(field(key), "expected a number");
        return v->get<double>();
    }
    std::optional<double> opt_num(const std::string& key) {
        if (!has(key)) {
            used_.insert(key);
            return std::nullopt;
        }
        return num(key, 0.0);
    }
    std::size_t count(const std::string& key, std::size_t fallback) {
        const json* v = get(key);
        if (!v) return fallback;
        if (!v->is_number_integer() || v->get<long long>() < 0) config_error(field(key), "expected a nonnegative integer");
        return v->get<std::size_t>();
    }
    std::optional<std::size_t> opt_count(const std::string& key) {
        if (!has(key)) {
            used_.insert(key);
            return std::nullopt;
        }
        return count(key, 0);
    }
    bool flag(const std::string& key, bool fallback) {
        const json* v = get(key);
        if (!v) return fallback;
        if (!v->is_boolean()) config_error(field(key), "expected true or false");
        return v->get<bool>();
    }
    Exponent exponent(const std::string& key, Exponent fallback) {
        const json* v = get(key);
        if (!v) return fallback;
        if (v->is_string()) {
            const auto s = v->get<std::string>();
            if (s == "inf" || s == "infinity") return Exponent::infinity();
            config_error(field(key), "expected a number >= 1 or \"inf\"");
        }
        if (!v->is_number()) config_error(field(key), "expected a number >= 1 or \"inf\"");
        try {
            return Exponent(v->get<double>());
        } catch (const Error&) {
            config_error(field(key), "exponent must be >= 1");
        }
    }
    Vec vec(const std::string& key) {
        const json* v = get(key);
        if (!v) return {};
        if (!v->is_array()) config_error(field(key), "expected an array of numbers");
        Vec out;
        for (const auto& e : *v) {
            if (!e.is_number()) config_error(field(key), "expected an array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }
    template <class E>
    E choice(const std::string& key, E fallback, std::initializer_list<std::pair<const char*, E>> options) {
        const json* v = get(key);
        if (!v) return fallback;
        if (!v->is_string()) config_error(field(key), "expected a string");
        const auto s = v->get<std::string>();
        std::string names;
        for (const auto& [n, e] : options) {
            if (s == n) return e;
            names += names.empty() ? n : std::string(", ") + n;
        }
        config_error(field(key), "unknown value '" + s + "' (expected one of: " + names + ")");
    }

    void finish() const {
        for (const auto& [k, _] : j_.items())
            if (!used_.count(k)) config_error(field(k), "unknown key");
    }

private:
    const json& j_;
    std::string name_;
    std::set<std::string> used_;
};

}  // namespace

RunConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::Config, std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) fail(ErrorKind::Config, "config must be a JSON object");
    for (const auto& [k, _] : root.items()) {
        static const std::set<std::string> known{"loss", "data", "set", "optimizer", "perturbation", "output"};
        if (!known.count(k)) config_error(k, "unknown section");
    }
    for (const char* required : {"loss", "data", "set", "optimizer"})
        if (!root.contains(required)) config_error(required, "section is required");

    RunConfig c;
    {
        Section s(root["loss"], "loss");
        if (!s.has("kind")) config_error("loss.kind", "is required");
        c.loss = s.choice<LossKind>("kind", LossKind::Quadratic,
                                    {{"logistic", LossKind::Logistic},
                                     {"quadratic", LossKind::Quadratic},
                                     {"observed_quadratic", LossKind::ObservedQuadratic},
                                     {"squared_sigmoid", LossKind::SquaredSigmoid},
                                     {"biweight", LossKind::BiWeight}});
        c.bias = s.choice<BiasMode>("bias", BiasMode::None,
                                    {{"none", BiasMode::None},
                                     {"constrained", BiasMode::Constrained},
                                     {"profiled", BiasMode::Profiled}});
        s.finish();
    }
    {
        Section s(root["data"], "data");
        c.source = s.choice<DataSource>("source", DataSource::Synthetic,
                                        {{"synthetic", DataSource::Synthetic},
                                         {"delimited", DataSource::Delimited},
                                         {"libsvm", DataSource::Libsvm},
                                         {"ratings", DataSource::Ratings}});
        auto& g = c.synthetic;
        if (c.source == DataSource::Synthetic) {
            g.kind = s.choice<SyntheticKind>("kind", SyntheticKind::Regression,
                                             {{"regression", SyntheticKind::Regression},
                                              {"classification", SyntheticKind::Classification},
                                              {"lowrank", SyntheticKind::LowRank}});
            g.n = s.count("n", g.n);
            g.d = s.count("d", g.d);
            g.m = s.count("m", g.m);
            g.rank = s.count("rank", g.rank);
            g.noise = s.num("noise", g.noise);
            g.fraction = s.num("fraction", g.fraction);
            g.margin = s.num("margin", g.margin);
            g.bias = s.num("bias", g.bias);
            g.w_norm = s.num("w_norm", g.w_norm);
            g.correlation = s.num("correlation", g.correlation);
            g.w_true = s.vec("w_true");
            g.seed = s.count("seed", 0);
            if (g.n == 0) config_error("data.n", "must be positive");
            if (g.kind != SyntheticKind::LowRank && g.d == 0) config_error("data.d", "must be positive");
            if (g.kind == SyntheticKind::LowRank && g.m == 0) config_error("data.m", "must be positive for lowrank data");
            if (g.noise < 0.0) config_error("data.noise", "must be nonnegative");
            if (!(g.fraction > 0.0 && g.fraction <= 1.0)) config_error("data.fraction", "must lie in (0, 1]");
        } else {
            if (!s.has("path")) config_error("data.path", "is required for file data");
            c.path = s.str("path", "");
            c.has_header = s.flag("has_header", false);
            c.target_column = s.count("target_column", 0);
            c.standardize = s.flag("standardize", true);
        }
        s.finish();
    }
    {
        Section s(root["set"], "set");
        c.family = s.choice<SetFamily>("family", SetFamily::Lp,
                                       {{"lp", SetFamily::Lp}, {"schatten", SetFamily::Schatten}, {"group", SetFamily::Group}});
        c.p = s.exponent("p", c.p);
        c.q = s.exponent("q", c.q);
        if (!s.has("r")) config_error("set.r", "is required");
        c.r = s.num("r", c.r);
        if (!(c.r > 0.0)) config_error("set.r", "radius must be positive");
        c.set_d = s.opt_count("d");
        c.set_m = s.opt_count("m");
        c.set_n = s.opt_count("n");
        s.finish();
    }
    {
        Section s(root["optimizer"], "optimizer");
        c.method = s.choice<Method>("method", Method::PA,
                                    {{"fw", Method::FW}, {"pa", Method::PA}, {"spa", Method::SPA},
                                     {"gd", Method::GD}, {"sgd", Method::SGD}});
        c.step = s.choice<StepKind>("step", StepKind::Predefined,
                                    {{"predefined", StepKind::Predefined}, {"quadratic", StepKind::Quadratic},
                                     {"exact", StepKind::Exact}, {"short", StepKind::Short}});
        c.option = s.choice<PaOption>("option", PaOption::A, {{"A", PaOption::A}, {"B", PaOption::B}});
        c.iters = s.count("iters", c.iters);
        c.seed = s.count("seed", c.seed);
        c.L = s.opt_num("L");
        c.eta = s.opt_num("eta");
        c.batch = s.count("batch", c.batch);
        c.line_search_tol = s.num("tol", c.line_search_tol);
        c.timing = s.flag("timing", false);
        c.f_star = s.opt_num("f_star");
        if (c.iters == 0) config_error("optimizer.iters", "must be at least 1");
        if (c.L && !(*c.L > 0.0)) config_error("optimizer.L", "must be positive");
        if (c.eta && !(*c.eta > 0.0)) config_error("optimizer.eta", "must be positive");
        if (c.batch == 0) config_error("optimizer.batch", "must be at least 1");
        if (!(c.line_search_tol > 0.0)) config_error("optimizer.tol", "must be positive");
        s.finish();
    }
    if (root.contains("perturbation")) {
        Section s(root["perturbation"], "perturbation");
        c.perturb = s.flag("enabled", true);
        c.epsilon = s.num("epsilon", c.epsilon);
        c.delta = s.num("delta", c.delta);
        if (!(c.epsilon > 0.0)) config_error("perturbation.epsilon", "must be positive");
        if (!(c.delta > 0.0 && c.delta < 1.0)) config_error("perturbation.delta", "must lie in (0, 1)");
        s.finish();
    }
    if (root.contains("output")) {
        Section s(root["output"], "output");
        c.trace_path = s.str("trace", "");
        s.finish();
    }

    const bool matrix_data = c.source == DataSource::Ratings ||
                             (c.source == DataSource::Synthetic && c.synthetic.kind == SyntheticKind::LowRank);
    if (matrix_data != (c.loss == LossKind::ObservedQuadratic))
        config_error("loss.kind", std::string("'") + to_string(c.loss) + "' does not fit the " +
                                      (matrix_data ? "matrix" : "tabular") + " data given in data.source/data.kind");
    if (c.bias == BiasMode::Profiled && c.loss != LossKind::Quadratic)
        config_error("loss.bias", "'profiled' is only available for the quadratic loss");
    if (matrix_data && c.bias != BiasMode::None) config_error("loss.bias", "matrix losses take no intercept");
    if (c.method == Method::FW && c.step == StepKind::Predefined && root["optimizer"].contains("option"))
        config_error("optimizer.option", "applies to method 'pa' only");
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Config, "cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

Loss build_loss(const RunConfig& cfg) {
    if (cfg.source == DataSource::Ratings) return Loss::observed_quadratic(load_ratings(cfg.path));
    if (cfg.source == DataSource::Synthetic && cfg.synthetic.kind == SyntheticKind::LowRank)
        return Loss::observed_quadratic(gen_lowrank(cfg.synthetic).observed);

    auto tabular = [&]() -> TabularDataset {
        switch (cfg.source) {
        case DataSource::Delimited: return load_delimited(cfg.path, cfg.has_header, cfg.target_column);
        case DataSource::Libsvm: return load_libsvm(cfg.path);
        default: break;
        }
        if (cfg.synthetic.kind == SyntheticKind::Classification) return gen_classification(cfg.synthetic).data;
        return gen_regression(cfg.synthetic).data;
    };
    TabularDataset data = tabular();
    if (cfg.source != DataSource::Synthetic && cfg.standardize)
        data = TabularDataset(Standardizer::fit(data.x).apply(data.x), std::move(data.y));
    try {
        switch (cfg.loss) {
        case LossKind::Logistic: return Loss::logistic(std::move(data), cfg.bias);
        case LossKind::Quadratic: return Loss::quadratic(std::move(data), cfg.bias);
        case LossKind::SquaredSigmoid: return Loss::squared_sigmoid(std::move(data), cfg.bias);
        case LossKind::BiWeight: return Loss::biweight(std::move(data), cfg.bias);
        case LossKind::ObservedQuadratic: break;
        }
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::InvalidArgument) config_error("loss.kind", e.what());
        throw;
    }
    fail(ErrorKind::Config, "loss.kind: unsupported with tabular data");
}

void validate(const RunConfig& cfg, const Loss& loss) {
    const std::size_t dim = loss.dim();
    const std::string data_desc = loss.observed()
        ? "data shape " + std::to_string(loss.observed()->m) + "x" + std::to_string(loss.observed()->n)
        : "data.d = " + std::to_string(dim - (cfg.bias == BiasMode::Constrained ? 1 : 0)) +
              (cfg.bias == BiasMode::Constrained ? " (+1 intercept)" : "");
    if (cfg.family == SetFamily::Lp) {
        if (cfg.set_d && *cfg.set_d != dim)
            config_error("set.d", std::to_string(*cfg.set_d) + " does not match " + data_desc);
    } else {
        std::size_t m = 0, n = 0;
        if (loss.observed()) {
            m = loss.observed()->m;
            n = loss.observed()->n;
        }
        if (cfg.set_m) m = *cfg.set_m;
        if (cfg.set_n) n = *cfg.set_n;
        if (m == 0 || n == 0) config_error("set.m", "matrix families need set.m and set.n for tabular data");
        if (m * n != dim)
            config_error("set.m", "set shape " + std::to_string(m) + "x" + std::to_string(n) + " does not match " +
                                      data_desc);
    }
    if (cfg.step == StepKind::Short) {
        const bool ok = [&] {
            auto in12 = [](Exponent e) { return !e.is_inf() && e.value() > 1.0 && e.value() <= 2.0; };
            return cfg.family == SetFamily::Group ? in12(cfg.p) && in12(cfg.q) : in12(cfg.p);
        }();
        if (!ok) config_error("optimizer.step", "'short' needs a strongly convex set (set.p in (1, 2])");
    }
    if ((cfg.method == Method::GD || cfg.method == Method::SGD) && cfg.family == SetFamily::Group) {
        const bool finite = !cfg.p.is_inf() && !cfg.q.is_inf() && cfg.p.value() > 1.0 && cfg.q.value() > 1.0;
        if (!(cfg.p == cfg.q) && !finite) config_error("set.p", "group projection needs finite exponents > 1");
    }
    if (cfg.method == Method::SGD && cfg.batch > loss.num_samples())
        config_error("optimizer.batch", std::to_string(cfg.batch) + " exceeds the " +
                                            std::to_string(loss.num_samples()) + " available samples");
}

FeasibleSet build_set(const RunConfig& cfg, const Loss& loss) {
    switch (cfg.family) {
    case SetFamily::Lp: return FeasibleSet::lp(cfg.p, cfg.r, loss.dim());
    case SetFamily::Schatten:
    case SetFamily::Group: {
        std::size_t m = loss.observed() ? loss.observed()->m : 0, n = loss.observed() ? loss.observed()->n : 0;
        if (cfg.set_m) m = *cfg.set_m;
        if (cfg.set_n) n = *cfg.set_n;
        if (cfg.family == SetFamily::Schatten) return FeasibleSet::schatten(cfg.p, cfg.r, m, n);
        return FeasibleSet::group(cfg.p, cfg.q, cfg.r, m, n);
    }
    }
    fail(ErrorKind::Config, "set.family: unsupported");
}

RunResult execute(const RunConfig& cfg) {
    const Loss loss = build_loss(cfg);
    validate(cfg, loss);
    const FeasibleSet set = build_set(cfg, loss);

    RunResult res;
    res.set_description = set.describe();
    Rng aux(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    res.L = cfg.L ? *cfg.L : loss.estimate_smoothness(set, 200, aux);

    const Objective obj = cfg.perturb
        ? Objective(make_perturbed(loss, cfg.epsilon, set.euclidean_diameter(), cfg.delta, aux))
        : Objective(loss);

    RunOptions opt;
    opt.iters = cfg.iters;
    opt.seed = cfg.seed;
    opt.timing = cfg.timing;

    switch (cfg.method) {
    case Method::FW: {
        StepRule rule = PredefinedDecay{};
        switch (cfg.step) {
        case StepKind::Predefined: break;
        case StepKind::Quadratic: rule = QuadraticLineSearch{res.L}; break;
        case StepKind::Exact: rule = ExactLineSearch{cfg.line_search_tol}; break;
        case StepKind::Short: rule = ShortStep{res.L, set.strong_convexity()}; break;
        }
        res.trace = fw_run(obj, set, rule, opt);
        break;
    }
    case Method::PA: res.trace = pa_run(obj, set, cfg.option, opt); break;
    case Method::SPA: res.trace = spa_run(obj, set, opt); break;
    case Method::GD: {
        const double eta = cfg.eta ? *cfg.eta : tune_gd_eta(obj, set, res.L, opt);
        res.trace = projected_gd_run(obj, set, eta, opt);
        break;
    }
    case Method::SGD: {
        const double eta = cfg.eta ? *cfg.eta : tune_gd_eta(obj, set, res.L, opt, 50, cfg.batch);
        res.trace = projected_sgd_run(obj, set, eta, cfg.batch, opt);
        break;
    }
    }

    double best = res.trace.initial_loss_f;
    for (const auto& r : res.trace.records) best = std::min(best, r.loss_f);
    if (cfg.f_star) {
        res.f_star = *cfg.f_star;
        res.f_star_exact = true;
    } else if (loss.kind() == LossKind::Quadratic && cfg.family == SetFamily::Lp && cfg.p == Exponent(2.0)) {
        res.f_star = std::min(best, l2_least_squares_optimum(loss, cfg.r).value);
        res.f_star_exact = true;
    } else {
        res.f_star = best;
        const bool convex = loss.kind() == LossKind::Logistic || loss.kind() == LossKind::Quadratic ||
                            loss.kind() == LossKind::ObservedQuadratic;
        if (convex) {
            RunOptions ref = opt;
            ref.iters = 10 * cfg.iters;
            ref.timing = false;
            ref.record_gap = false;
            const Trace rt = fw_run(Objective(loss), set, ExactLineSearch{1e-10}, ref);
            for (const auto& r : rt.records) res.f_star = std::min(res.f_star, r.loss_f);
        }
    }

    res.final_loss = res.trace.records.back().loss_f;
    for (const auto& r : res.trace.records)
        if (r.fw_gap) res.min_gap = std::min(res.min_gap.value_or(*r.fw_gap), *r.fw_gap);
    res.convergence = detect_convergence(res.trace, res.f_star);
    return res;
}

}  // namespace projfree
