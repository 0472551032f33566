#pragma once

#include <stdexcept>
#include <string>

namespace specden {

/// Base of every error raised by the library. Carries the module and
/// operation that raised it so the CLI can name the origin.
class Error : public std::runtime_error {
public:
    Error(std::string module, std::string operation, const std::string& message);

    const std::string& module() const noexcept { return module_; }
    const std::string& operation() const noexcept { return operation_; }
    const std::string& detail() const noexcept { return detail_; }

    /// Process exit code the CLI maps this error to.
    virtual int exit_code() const noexcept = 0;

private:
    std::string module_;
    std::string operation_;
    std::string detail_;
};

/// Bad configuration or an input outside an operation's domain.
class DomainError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 1; }
};

/// A solver, quadrature or eigensolver did not deliver a trustworthy result.
class NumericalError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

class PoleError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class BranchError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ResolutionError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class EigenSolverError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SchemeDisagreement : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateDenominator : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class GridTooCoarse : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class CurvatureUnavailable : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace specden
