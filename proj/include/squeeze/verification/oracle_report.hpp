#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

namespace squeeze {

/// Compact %g rendering for report notes.
inline std::string fmt_g(double x, int digits = 6) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

/// Outcome of one verification item: pass iff max_error <= tolerance.
struct OracleReport {
    std::string name;
    double max_error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::size_t samples = 0;
    std::string notes;
    std::uint64_t seed = 0;

    static OracleReport make(std::string name, double max_error, double tolerance, std::size_t samples,
                             std::string notes = {}, std::uint64_t seed = 0) {
        OracleReport r{std::move(name), max_error, tolerance, false, samples, std::move(notes), seed};
        r.pass = !std::isnan(max_error) && max_error <= tolerance;
        return r;
    }
};

/// Least-squares slope of log(err) against log(step).
inline double convergence_order(const std::vector<double>& steps, const std::vector<double>& errors) {
    const std::size_t n = steps.size();
    if (n < 2 || errors.size() != n) return std::numeric_limits<double>::quiet_NaN();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(errors[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        const double x = std::log(steps[i]), y = std::log(errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double dn = static_cast<double>(n);
    return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

/// True if `values` (ordered by decreasing step) never increase, treating
/// entries at or below `floor` as zero.
inline bool non_increasing(const std::vector<double>& values, double floor = 0.0, double rel_slack = 1e-9) {
    for (std::size_t i = 1; i < values.size(); ++i) {
        const double a = values[i - 1] <= floor ? 0.0 : values[i - 1];
        const double b = values[i] <= floor ? 0.0 : values[i];
        if (b > a * (1.0 + rel_slack) && b > floor) return false;
    }
    return true;
}

}  // namespace squeeze
