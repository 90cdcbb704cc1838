#pragma once

#include <stdexcept>
#include <string>

namespace psqi {

// Invalid configuration or unusable argument combination (CLI exit code 1).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or missing input data (CLI exit code 2).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// A signal whose useful component has zero energy; it cannot be perturbed
// under any finite SNR budget.
class DegenerateSignalError : public std::runtime_error {
public:
    explicit DegenerateSignalError(const std::string& what) : std::runtime_error(what) {}
};

// A shaped noise sample with zero energy (cannot be scaled to a target SNR).
class DegenerateNoiseError : public std::runtime_error {
public:
    explicit DegenerateNoiseError(const std::string& what) : std::runtime_error(what) {}
};

// The external classifier process failed: nonzero exit, protocol violation,
// or timeout. Carries captured diagnostics in what().
class ClassifierFailure : public std::runtime_error {
public:
    explicit ClassifierFailure(const std::string& what) : std::runtime_error(what) {}
};

} // namespace psqi
