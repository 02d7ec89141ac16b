#pragma once

#include <stdexcept>
#include <string>

namespace bulkjl {

/// Process exit codes used by the CLI: 0 success, 2 input error,
/// 3 constraint violation, 4 numeric error.
enum class errc : int {
    input = 2,
    constraint = 3,
    numeric = 4,
};

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const noexcept { return code_; }
    int exit_code() const noexcept { return static_cast<int>(code_); }

private:
    errc code_;
};

/// Malformed or out-of-domain input (bad file, bad parameter, zero matrix, ...).
class input_error : public error {
public:
    explicit input_error(const std::string& what) : error(errc::input, what) {}
};

/// A theorem precondition that cannot be satisfied at the given parameters.
class constraint_error : public error {
public:
    explicit constraint_error(const std::string& what) : error(errc::constraint, what) {}
};

/// Numerical failure. Carries the best estimate reached before giving up.
class numeric_error : public error {
public:
    numeric_error(const std::string& what, double best_estimate)
        : error(errc::numeric, what), best_estimate_(best_estimate) {}
    double best_estimate() const noexcept { return best_estimate_; }

private:
    double best_estimate_;
};

}  // namespace bulkjl
