#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace squeeze {

/// Bad sizes, mismatched grids, malformed settings.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input outside the domain of an operator (e.g. a non-positive gap).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Gap width collapsed: the solution leaves the region where it exists.
class QuenchError : public std::runtime_error {
public:
    QuenchError(const std::string& what, double time, std::array<double, 2> location, double min_gap)
        : std::runtime_error(what), time_(time), location_(location), min_gap_(min_gap) {}

    double time() const noexcept { return time_; }
    /// Node where the gap is smallest ({x, 0} on the interval).
    std::array<double, 2> location() const noexcept { return location_; }
    double min_gap() const noexcept { return min_gap_; }

private:
    double time_;
    std::array<double, 2> location_;
    double min_gap_;
};

/// A fixed-point iteration ran out of iterations.
class IterationError : public std::runtime_error {
public:
    IterationError(const std::string& what, int iterations, double last_ratio)
        : std::runtime_error(what), iterations_(iterations), last_ratio_(last_ratio) {}

    int iterations() const noexcept { return iterations_; }
    double last_ratio() const noexcept { return last_ratio_; }

private:
    int iterations_;
    double last_ratio_;
};

/// Internal invariant broken (singular system where none should occur, ...).
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace squeeze
