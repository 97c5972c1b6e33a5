#pragma once

#include <stdexcept>
#include <string>

namespace horolab {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class DomainViolation : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class InvariantViolation : public Error {
public:
    using Error::Error;
};

/// The hypersurface built from a jet is singular there: g - 2 Sch_g is not invertible.
class SingularPoint : public Error {
public:
    SingularPoint(const std::string& what, double min_eig) : Error(what), min_eig_(min_eig) {}
    double min_eig() const noexcept { return min_eig_; }

private:
    double min_eig_;
};

class NotFound : public Error {
public:
    NotFound(const std::string& what, double max_abs_lambda) : Error(what), max_abs_lambda_(max_abs_lambda) {}
    double max_abs_lambda() const noexcept { return max_abs_lambda_; }

private:
    double max_abs_lambda_;
};

class ZeroEigenvalue : public Error {
public:
    using Error::Error;
};

class FlowNotRegular : public Error {
public:
    using Error::Error;
};

class NotStronglyConvex : public Error {
public:
    using Error::Error;
};

class SolveFailed : public Error {
public:
    using Error::Error;
};

}  // namespace horolab
