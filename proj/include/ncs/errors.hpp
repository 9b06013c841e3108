#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>
#include <utility>

namespace ncs {

/// A matrix inequality or equation has no solution for the given data.
/// `value()` carries the quantity that decided infeasibility (a spectral
/// radius, an eigenvalue bound, ...), named in the message.
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(const std::string& what, double value)
        : std::runtime_error(what), value_(value) {}

    double value() const noexcept { return value_; }

private:
    double value_;
};

/// Dense eigenvalue or linear-solve failure. Carries the offending matrix.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, Eigen::MatrixXd offending)
        : std::runtime_error(what), offending_(std::move(offending)) {}

    const Eigen::MatrixXd& offending_matrix() const noexcept { return offending_; }

private:
    Eigen::MatrixXd offending_;
};

/// Experiment file rejected; the message names the JSON path of the failure.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ncs
