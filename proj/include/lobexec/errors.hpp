#pragma once

#include <stdexcept>
#include <string>

namespace lobexec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A shape was evaluated outside the price/volume range it covers.
class OutOfDomain : public Error {
public:
    using Error::Error;
};

class InvalidParam : public Error {
public:
    using Error::Error;
};

/// A precondition of the closed-form solution (injectivity of h1/h2, explosion condition,
/// order book depth) failed on the validation grid.
class PreconditionFailed : public Error {
public:
    PreconditionFailed(std::string reason, double witness, double witness_value)
        : Error(reason + " (witness " + std::to_string(witness) + ", value " +
                std::to_string(witness_value) + ")"),
          reason_(std::move(reason)),
          witness_(witness),
          witness_value_(witness_value) {}

    const std::string& reason() const noexcept { return reason_; }
    double witness() const noexcept { return witness_; }
    double witness_value() const noexcept { return witness_value_; }

private:
    std::string reason_;
    double witness_;
    double witness_value_;
};

class NoRootInBracket : public Error {
public:
    using Error::Error;
};

class NotConverged : public Error {
public:
    using Error::Error;
};

class BudgetExceeded : public Error {
public:
    using Error::Error;
};

}  // namespace lobexec
