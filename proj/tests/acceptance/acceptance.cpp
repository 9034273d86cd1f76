// Prints one PASS/FAIL line per acceptance criterion.
// Usage: acceptance [--criterion N]...   (default: all)
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <string>

#include "projfree/suites.hpp"

int main(int argc, char** argv) {
    std::vector<int> criteria;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            criteria.push_back(std::atoi(argv[++i]));
        } else {
            std::cerr << "usage: acceptance [--criterion N]...\n";
            return 2;
        }
    }
    if (criteria.empty())
        for (int c = 1; c <= projfree::kNumCriteria; ++c) criteria.push_back(c);
    try {
        const auto results = projfree::run_criteria(criteria, {}, std::cout);
        for (const auto& r : results)
            if (!r.pass) return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
