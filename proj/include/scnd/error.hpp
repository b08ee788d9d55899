#pragma once

#include <stdexcept>
#include <string>

namespace scnd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInstance : public Error {
public:
    using Error::Error;
};

class InfeasibleRanges : public Error {
public:
    using Error::Error;
};

class NonIntegralBinary : public Error {
public:
    NonIntegralBinary(std::string variable, double value);
    const std::string& variable() const noexcept { return variable_; }
    double value() const noexcept { return value_; }

private:
    std::string variable_;
    double value_;
};

class NumericalBreakdown : public Error {
public:
    using Error::Error;
};

class NoWarehouseOpen : public Error {
public:
    using Error::Error;
};

class NegativeRadicand : public Error {
public:
    explicit NegativeRadicand(double radicand);
    double radicand() const noexcept { return radicand_; }

private:
    double radicand_;
};

class SingleCell : public Error {
public:
    using Error::Error;
};

class IoFailure : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace scnd
