#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gen.hpp"
#include "projfree/config.hpp"
#include "projfree/error.hpp"
#include "projfree/suites.hpp"
#include "projfree/trace_io.hpp"

using namespace projfree;

namespace {

const char* kMinimal = R"({
  "loss": {"kind": "quadratic"},
  "data": {"source": "synthetic", "kind": "regression", "n": 50, "d": 3, "noise": 0.1, "seed": 1},
  "set": {"family": "lp", "p": 2, "r": 0.5},
  "optimizer": {"method": "pa", "option": "A", "iters": 25, "seed": 3}
})";

std::string error_text(const std::string& cfg) {
    try {
        const RunConfig c = parse_config(cfg);
        execute(c);
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("trace csv round trip") {
    Rng rng(1);
    std::vector<TraceRecord> recs;
    for (std::size_t t = 1; t <= 40; ++t) {
        TraceRecord r;
        r.t = t;
        r.loss_f = gen::uniform(rng, -1e6, 1e6) / 3.0;
        if (t % 2) r.loss_h = r.loss_f + 1e-9;
        if (t % 3) r.fw_gap = gen::uniform(rng, 0, 1);
        r.gamma = 2.0 / (t + 1.0);
        if (t % 5) r.batch = t * t;
        r.grad_norm = 1.0 / 7.0;
        if (t == 4) r.step_ms = 0.125;
        recs.push_back(r);
    }
    std::stringstream ss;
    write_trace_csv(ss, recs);
    const std::string text = ss.str();
    CHECK(text.substr(0, text.find('\n')) == kTraceHeader);
    CHECK(read_trace_csv(ss) == recs);
    // Absent fields are empty cells, never zeros.
    std::istringstream lines(text);
    std::string line;
    std::getline(lines, line);
    std::getline(lines, line);
    CHECK(line.find(",,") != std::string::npos);
}

TEST_CASE("trace csv rejects malformed input") {
    std::istringstream bad_header("t,loss\n1,2\n");
    CHECK_THROWS_AS(read_trace_csv(bad_header), Error);
    std::istringstream bad_t(std::string(kTraceHeader) + "\n2,1,,,,,,,,\n1,1,,,,,,,,\n");
    CHECK_THROWS_AS(read_trace_csv(bad_t), Error);
    std::istringstream short_row(std::string(kTraceHeader) + "\n1,1,,\n");
    CHECK_THROWS_AS(read_trace_csv(short_row), Error);
}

TEST_CASE("minimal config runs and produces one row per iteration") {
    const RunConfig cfg = parse_config(kMinimal);
    const RunResult a = execute(cfg);
    CHECK(a.trace.records.size() == 25);
    CHECK(a.f_star_exact);
    CHECK(a.final_loss >= a.f_star - 1e-9);
    const RunResult b = execute(cfg);
    std::stringstream sa, sb;
    write_trace_csv(sa, a.trace.records);
    write_trace_csv(sb, b.trace.records);
    CHECK(sa.str() == sb.str());
}

TEST_CASE("config errors name the fields") {
    std::string cfg = kMinimal;
    cfg.replace(cfg.find("\"r\": 0.5"), 8, "\"r\": 0.5, \"d\": 4");
    const std::string msg = error_text(cfg);
    CHECK(msg.find("set.d") != std::string::npos);
    CHECK(msg.find("data.d") != std::string::npos);

    cfg = kMinimal;
    cfg.replace(cfg.find("\"iters\""), 7, "\"iterz\"");
    CHECK(error_text(cfg).find("optimizer.iterz") != std::string::npos);

    CHECK_THROWS_AS(parse_config("{not json"), Error);
    CHECK(error_text(R"({"loss": {"kind": "quadratic"}})").find("data") != std::string::npos);

    cfg = kMinimal;
    cfg.replace(cfg.find("\"p\": 2"), 6, "\"p\": 0.5");
    CHECK(error_text(cfg).find("set.p") != std::string::npos);
}

TEST_CASE("config variants") {
    const std::vector<std::string> bodies{
        R"({"loss": {"kind": "logistic", "bias": "constrained"},
            "data": {"kind": "classification", "n": 40, "d": 3, "seed": 2},
            "set": {"family": "lp", "p": 1.5, "r": 2},
            "optimizer": {"method": "fw", "step": "exact", "iters": 15},
            "perturbation": {"enabled": true, "epsilon": 1e-4, "delta": 0.2}})",
        R"({"loss": {"kind": "observed_quadratic"},
            "data": {"kind": "lowrank", "m": 5, "n": 4, "rank": 2, "fraction": 0.5, "seed": 2},
            "set": {"family": "schatten", "p": 1, "r": 3},
            "optimizer": {"method": "fw", "step": "predefined", "iters": 10}})",
        R"({"loss": {"kind": "quadratic"},
            "data": {"kind": "regression", "n": 40, "d": 6, "seed": 2},
            "set": {"family": "group", "p": 2, "q": 1.5, "r": 1, "m": 3, "n": 2},
            "optimizer": {"method": "gd", "iters": 10}})",
        R"({"loss": {"kind": "biweight"},
            "data": {"kind": "regression", "n": 40, "d": 3, "seed": 2},
            "set": {"family": "lp", "p": "inf", "r": 1},
            "optimizer": {"method": "sgd", "batch": 4, "iters": 10}})",
        R"({"loss": {"kind": "quadratic"},
            "data": {"kind": "regression", "n": 40, "d": 3, "seed": 2},
            "set": {"family": "lp", "p": 2, "r": 1},
            "optimizer": {"method": "spa", "iters": 10}})",
    };
    for (const auto& body : bodies) {
        CAPTURE(body);
        const RunResult r = execute(parse_config(body));
        CHECK(r.trace.records.size() >= 10);
    }
}

TEST_CASE("suite names") {
    CHECK(suite_criteria("oracles") == std::vector<int>{6, 7, 8, 9, 10});
    CHECK(suite_criteria("all").size() == 12);
    CHECK_THROWS_AS(suite_criteria("bogus"), Error);
    CHECK_THROWS_AS(run_criterion(13), Error);
    const CheckResult r = run_criterion(8);
    CHECK(r.pass);
    CHECK(format_result(r).rfind("PASS criterion 8", 0) == 0);
}
