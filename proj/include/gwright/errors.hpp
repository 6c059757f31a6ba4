#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gwright {

// Base for everything thrown by this library, so callers can catch one type.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parameter lists rejected by validate(); carries one message per violated
// constraint so callers see every problem at once.
class validation_error : public error {
public:
    explicit validation_error(std::vector<std::string> issues)
        : error(join(issues)), issues_(std::move(issues)) {}
    const std::vector<std::string>& issues() const { return issues_; }

private:
    static std::string join(const std::vector<std::string>& issues) {
        std::string msg = "parameter validation failed:";
        for (const auto& s : issues) msg += "\n  - " + s;
        return msg;
    }
    std::vector<std::string> issues_;
};

// Evaluation landed on a pole of a gamma factor.
class pole_error : public error {
public:
    using error::error;
};

// Bad argument outside a routine's domain (e.g. tau <= 0 for a density).
class argument_error : public error {
public:
    using error::error;
};

// An iterative scheme hit its cap before reaching the requested tolerance.
// best_estimate() is the last (unconverged) value, for diagnostic use only.
class convergence_error : public error {
public:
    convergence_error(const std::string& what, double best, double err_estimate)
        : error(what), best_(best), err_(err_estimate) {}
    double best_estimate() const { return best_; }
    double error_estimate() const { return err_; }

private:
    double best_;
    double err_;
};

// The requested computation is outside the regime the implemented
// representation covers (e.g. no contour decay, inadmissible dimension).
class unsupported_error : public error {
public:
    using error::error;
};

// Operation requires state that has not been built (e.g. sampling before
// build_sampler).
class state_error : public error {
public:
    using error::error;
};

// Numerically singular linear algebra (ill-conditioned moment systems).
class conditioning_error : public error {
public:
    using error::error;
};

// Malformed input file (parameter files, grids).
class parse_error : public error {
public:
    using error::error;
};

}  // namespace gwright
