// SPDX-License-Identifier: Apache-2.0
//
// Shared numeric types and error classes for the disco-IRS link simulator.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace dirs {

using cd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Vec3 = Eigen::Vector3d;

/// Argument outside the mathematical domain of a formula (log of a
/// non-positive distance, bound evaluated with too few antennas, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Caller broke a structural precondition (dimension mismatch, wrong detector kind).
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Detector could not be built because the direct channel is numerically rank deficient.
class SingularityError : public std::runtime_error {
public:
    SingularityError(const std::string& what, double condition)
        : std::runtime_error(what), condition_(condition) {}
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

/// A scenario asked for something the configuration does not provide (e.g. no AJ).
class CapabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite value encountered during optimization or evaluation.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or unparsable experiment/scene configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace dirs
