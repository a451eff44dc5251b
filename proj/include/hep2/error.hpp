#pragma once

#include <stdexcept>
#include <string>

namespace hep2 {

// User-fixable: bad layer specs, bad flags, malformed config files.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Problems with input data: missing files, dimension mismatches, bad labels.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Metric-level failures, e.g. MCA undefined because a class was never tested.
class EvalError : public std::runtime_error {
public:
    explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

// An augmented variant of a test-specimen cell reached a training set.
class LeakageError : public std::runtime_error {
public:
    explicit LeakageError(const std::string& msg) : std::runtime_error(msg) {}
};

// Broken internal invariant; maps to exit code 2 in the CLI.
class InternalError : public std::logic_error {
public:
    explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace hep2
