#pragma once

#include <stdexcept>
#include <string>

namespace lldos {

// Error taxonomy shared by the library and the command-line front end.
// Exit-code contract: 2 = invalid/degenerate physics configuration,
// 3 = numerical nonconvergence, 4 = I/O failure.

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
    virtual int exit_code() const { return 1; }
    virtual const char* kind() const { return "error"; }
};

struct DomainError : Error {
    using Error::Error;
    int exit_code() const override { return 2; }
    const char* kind() const override { return "domain"; }
};

struct InvalidConfigError : Error {
    using Error::Error;
    int exit_code() const override { return 2; }
    const char* kind() const override { return "invalid_config"; }
};

// Example-1 tuning: a vanishing band variance means the restricted density
// of states does not exist as a function.
struct DegenerateBandError : Error {
    using Error::Error;
    int exit_code() const override { return 2; }
    const char* kind() const override { return "degenerate_band"; }
};

struct PositivityViolationError : Error {
    using Error::Error;
    int exit_code() const override { return 2; }
    const char* kind() const override { return "positivity_violation"; }
};

struct UnsupportedModelError : Error {
    using Error::Error;
    int exit_code() const override { return 2; }
    const char* kind() const override { return "unsupported_model"; }
};

struct QuadratureError : Error {
    using Error::Error;
    int exit_code() const override { return 3; }
    const char* kind() const override { return "quadrature_nonconvergence"; }
};

struct NonconvergenceError : Error {
    using Error::Error;
    int exit_code() const override { return 3; }
    const char* kind() const override { return "nonconvergence"; }
};

struct FactorizationError : Error {
    using Error::Error;
    int exit_code() const override { return 3; }
    const char* kind() const override { return "factorization"; }
};

struct OverflowSignal : Error {
    using Error::Error;
    int exit_code() const override { return 3; }
    const char* kind() const override { return "overflow"; }
};

struct IoError : Error {
    using Error::Error;
    int exit_code() const override { return 4; }
    const char* kind() const override { return "io"; }
};

} // namespace lldos
