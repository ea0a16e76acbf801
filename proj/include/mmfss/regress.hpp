#pragma once

#include <string>
#include <vector>

#include "mmfss/ssdf.hpp"

namespace mmfss {

struct RegressOptions {
    int window = 16;
    int smax = 191;
};

struct Check {
    std::string group;  // differentials, einf, hidden, nu, chart
    std::string name;
    std::string citation;
    bool pass = false;
    std::string detail;
};

struct RegressReport {
    std::vector<Check> checks;
    double engine_seconds = 0;
    double total_seconds = 0;
    bool all_pass() const;
    // One line per check: PASS/FAIL, group, name, citation, detail.
    std::string matrix() const;
};

// Runs the whole pipeline against the shipped tables.
RegressReport regress(const Dataset& d, const RegressOptions& opt = {});

}  // namespace mmfss
