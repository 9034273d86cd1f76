#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace projfree {

struct CheckResult {
    int criterion = 0;
    std::string name;
    bool pass = false;
    std::string detail;  ///< measured vs required values
    double seconds = 0.0;
};

struct SuiteOptions {
    /// Worker cap; 0 reads PROJFREE_THREADS (default: hardware concurrency).
    std::size_t threads = 0;
    /// When set, trace-producing checks write their CSV traces here.
    std::string trace_dir;
};

inline constexpr int kNumCriteria = 12;

/// Criteria run by a named suite: convex, quasi, nonconvex, oracles, all.
/// Unknown names raise an InvalidArgument error.
std::vector<int> suite_criteria(const std::string& name);

CheckResult run_criterion(int criterion, const SuiteOptions& opt = {});

/// Runs the criteria (in parallel up to the thread cap) and writes one line
/// per check to out, in criterion order.
std::vector<CheckResult> run_criteria(const std::vector<int>& criteria, const SuiteOptions& opt, std::ostream& out);

std::string format_result(const CheckResult& r);

std::size_t suite_threads(const SuiteOptions& opt);

}  // namespace projfree
