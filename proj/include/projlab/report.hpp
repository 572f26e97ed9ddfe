#pragma once

#include <string>

namespace projlab {

/// Uniform result of a single named check; one CSV row in a run summary.
/// verdict is "pass", "fail" or "vacuous"; lhs/rhs are the two sides of the
/// inequality (or measurement vs. expectation) the verdict compares.
struct CheckResult {
    std::string name;
    std::string instance;
    std::string verdict = "pass";
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    std::string notes;

    bool passed() const { return verdict != "fail"; }

    static CheckResult compare(std::string name, std::string instance, double lhs,
                               double rhs, double slack, std::string notes = {}) {
        CheckResult r;
        r.name = std::move(name);
        r.instance = std::move(instance);
        r.lhs = lhs;
        r.rhs = rhs;
        r.slack = slack;
        r.verdict = lhs <= rhs + slack ? "pass" : "fail";
        r.notes = std::move(notes);
        return r;
    }

    static CheckResult vacuous(std::string name, std::string instance, std::string notes) {
        CheckResult r;
        r.name = std::move(name);
        r.instance = std::move(instance);
        r.verdict = "vacuous";
        r.notes = std::move(notes);
        return r;
    }
};

} // namespace projlab
