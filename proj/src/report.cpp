#include "subdif/report.hpp"

#include <cmath>
#include <cstdio>

#include "json.hpp"

namespace subdif {

CheckResult make_check(std::string name, double lhs, double rhs, double tolerance,
                       std::string note) {
    CheckResult c;
    c.name = std::move(name);
    c.lhs = lhs;
    c.rhs = rhs;
    c.tolerance = tolerance;
    c.margin = rhs - lhs;
    c.pass = std::isfinite(c.margin) && c.margin >= -tolerance;
    c.note = std::move(note);
    return c;
}

int Report::failed() const {
    int n = 0;
    for (const auto& c : checks)
        if (!c.pass) ++n;
    return n;
}

std::string Report::to_json() const {
    nlohmann::json j;
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks) {
        nlohmann::json e;
        e["name"] = c.name;
        e["lhs"] = c.lhs;
        e["rhs"] = c.rhs;
        e["margin"] = c.margin;
        e["tolerance"] = c.tolerance;
        e["pass"] = c.pass;
        if (!c.note.empty()) e["note"] = c.note;
        j["checks"].push_back(e);
    }
    j["failed"] = failed();
    j["total"] = static_cast<int>(checks.size());
    return j.dump(2) + "\n";
}

std::string Report::to_text() const {
    std::string out;
    char buf[512];
    std::snprintf(buf, sizeof buf, "%-34s %6s %13s %13s %13s %9s\n", "check", "pass", "lhs", "rhs",
                  "margin", "time[s]");
    out += buf;
    for (const auto& c : checks) {
        std::snprintf(buf, sizeof buf, "%-34s %6s %13.5e %13.5e %13.5e %9.3f\n", c.name.c_str(),
                      c.pass ? "ok" : "FAIL", c.lhs, c.rhs, c.margin, c.runtime_s);
        out += buf;
        if (!c.note.empty()) out += "    note: " + c.note + "\n";
    }
    std::snprintf(buf, sizeof buf, "failed: %d of %zu\n", failed(), checks.size());
    out += buf;
    return out;
}

}  // namespace subdif
