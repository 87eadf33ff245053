#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace crnforge {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class SingularMatrix : public Error {
public:
    using Error::Error;
};

class UnsupportedDimension : public Error {
public:
    using Error::Error;
};

// Parameter outside the regime an operation is defined for.
class RegimeError : public Error {
public:
    using Error::Error;
};

class EmptySystem : public Error {
public:
    using Error::Error;
};

class NotKinetic : public Error {
public:
    struct Offender {
        std::size_t equation;
        double coeff;
        std::vector<unsigned> exponents;
    };
    NotKinetic(const std::string& what, std::vector<Offender> offenders)
        : Error(what), offenders_(std::move(offenders)) {}
    const std::vector<Offender>& offenders() const noexcept { return offenders_; }

private:
    std::vector<Offender> offenders_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t line, std::size_t column)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
          line_(line), column_(column) {}
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class InvalidNetwork : public Error {
public:
    using Error::Error;
};

class ConstraintViolation : public Error {
public:
    explicit ConstraintViolation(std::vector<std::string> failed)
        : Error(make_message(failed)), failed_(std::move(failed)) {}
    const std::vector<std::string>& failed() const noexcept { return failed_; }

private:
    static std::string make_message(const std::vector<std::string>& failed) {
        std::string m = "constraint violation:";
        for (const auto& f : failed) m += " " + f;
        return m;
    }
    std::vector<std::string> failed_;
};

class TermNotCrossNegative : public Error {
public:
    using Error::Error;
};

class PNotPositive : public Error {
public:
    using Error::Error;
};

// Homoclinic loop could not be tracked to the requested accuracy.
class LoopTrackingError : public Error {
public:
    using Error::Error;
};

class StiffnessFailure : public Error {
public:
    StiffnessFailure(const std::string& what, double mu) : Error(what), mu_(mu) {}
    double mu() const noexcept { return mu_; }

private:
    double mu_;
};

class NoReturn : public Error {
public:
    using Error::Error;
};

}  // namespace crnforge
