#pragma once

#include <string>
#include <vector>

namespace subdif {

/// One named inequality check: pass iff margin = rhs - lhs >= -tolerance.
struct CheckResult {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    double runtime_s = 0.0;
    std::string note;
};

CheckResult make_check(std::string name, double lhs, double rhs, double tolerance,
                       std::string note = {});

struct Report {
    std::vector<CheckResult> checks;

    int failed() const;
    void add(CheckResult c) { checks.push_back(std::move(c)); }

    /// Machine form; excludes runtimes so identical inputs give identical bytes.
    std::string to_json() const;
    /// Aligned human-readable table (includes runtimes).
    std::string to_text() const;
};

}  // namespace subdif
