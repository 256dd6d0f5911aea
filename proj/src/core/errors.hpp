#pragma once

#include <stdexcept>
#include <string>

namespace spotsim {

// Error taxonomy mirrored by the C API status codes and the CLI exit codes.

/// Malformed or inconsistent configuration (bad key, bad value, wrong contract).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Parameter outside its mathematical domain (negative rate, beta <= 1 for a
/// closed-form drift, lambda*dt >= 1 for the biased Euler step, ...).
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Contract whose terminal volume target cannot be reached on the grid.
class FeasibilityError : public DomainError {
public:
    explicit FeasibilityError(const std::string& what) : DomainError(what) {}
};

/// I/O failure (missing config file, unwritable output directory).
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace spotsim
