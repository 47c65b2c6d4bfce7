#ifndef FWM_VALIDATION_HPP
#define FWM_VALIDATION_HPP

#include <functional>
#include <string>
#include <vector>

/// Oracle cross-checks shared by `fwm validate` and the acceptance runner.
namespace fwm::validation {

struct CheckResult
{
    int criterion = 0;
    std::string title;
    bool pass = false;
    std::string detail;
};

struct CheckDefinition
{
    int criterion = 0;
    std::string title;
    /// Wall-clock budget in seconds, enforced by the acceptance runner (0: none).
    double runtime_limit = 0.0;
    std::function<CheckResult()> run;
};

/// Criteria 1-9, in order. Deterministic: fixed seeds, no timing data.
std::vector<CheckDefinition> oracle_checks();

/// One line per result: "criterion N: PASS|FAIL <title>: <detail>".
std::string format_report(const std::vector<CheckResult> &results);

/// Scientific notation with five significant digits, locale independent.
std::string sci(double value);

} // namespace fwm::validation

#endif
