#pragma once

#include <stdexcept>
#include <string>

namespace aptw {

// Base for everything the library throws. Input-side errors (bad files,
// off-grid queries, bad flags) derive from InputError; the CLI maps those to
// exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InputError : public Error {
public:
    using Error::Error;
};

class ParseError : public InputError {
public:
    ParseError(const std::string& msg, std::size_t row)
        : InputError("row " + std::to_string(row) + ": " + msg), row_(row) {}
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class DomainError : public InputError {
public:
    using InputError::InputError;
};

class CoverageError : public InputError {
public:
    using InputError::InputError;
};

class LookupError : public InputError {
public:
    using InputError::InputError;
};

// Dataset violates Axiom C at grid resolution for the requested income.
class NoZeroError : public Error {
public:
    using Error::Error;
};

// q(p_old, y) = 0: a price increase has no welfare effect, the reservation
// price is not identified.
class NotApplicableError : public Error {
public:
    using Error::Error;
};

// Raised when check_qrum's candidate precondition (no income effects) fails.
class IncomeVarianceError : public Error {
public:
    IncomeVarianceError(const std::string& msg, double price, double y_a, double y_b)
        : Error(msg), price(price), income_a(y_a), income_b(y_b) {}
    double price;
    double income_a;
    double income_b;
};

// A construction or verification step disagreed with the data. Signals an
// inconsistency between the axiom checks and the constructive path.
class ConstructionError : public Error {
public:
    using Error::Error;
};

class ProvenanceError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace aptw
