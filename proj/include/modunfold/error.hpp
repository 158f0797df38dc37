#pragma once

#include <stdexcept>
#include <string>

namespace modunfold {

// Bad argument to a single operation (empty input, out-of-range index, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A parameter combination that cannot be realized (empty OOB band,
// unmeetable filter spec, ...).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A closed-form condition has no solution for the given parameters
// (non-positive denominators in the OF / threshold formulas).
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// |x| > lambda at the quantizer input.
class OverloadError : public std::runtime_error {
public:
    OverloadError(const std::string& what, long index)
        : std::runtime_error(what), index_(index) {}
    long index() const noexcept { return index_; }

private:
    long index_;
};

// More fold locations in a segment than out-of-band equations, or a
// numerically rank-deficient column selection.
class RecoveryError : public std::runtime_error {
public:
    RecoveryError(const std::string& what, long segment)
        : std::runtime_error(what), segment_(segment) {}
    long segment() const noexcept { return segment_; }

private:
    long segment_;
};

}  // namespace modunfold
