#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kreg {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller supplied something outside an operation's domain. CLI exit code 2.
class InputError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure failed. CLI exit code 3.
class NumericError : public Error {
public:
    using Error::Error;
};

class ParseError : public InputError {
public:
    ParseError(std::size_t line, const std::string& what)
        : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Labels contain a single class, so no classifier can be fitted.
class DegenerateFitError : public InputError {
public:
    using InputError::InputError;
};

class NotTwiceDifferentiable : public InputError {
public:
    using InputError::InputError;
};

class RenderError : public InputError {
public:
    using InputError::InputError;
};

/// Population minimizer does not exist (risk decreases without bound).
class DivergenceError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Iterative solver stopped at its iteration cap.
class ConvergenceError : public NumericError {
public:
    ConvergenceError(const std::string& what, double last_objective, double residual)
        : NumericError(what + " (last objective " + std::to_string(last_objective) +
                       ", residual " + std::to_string(residual) + ")"),
          last_objective_(last_objective), residual_(residual) {}

    [[nodiscard]] double last_objective() const noexcept { return last_objective_; }
    [[nodiscard]] double residual() const noexcept { return residual_; }

private:
    double last_objective_;
    double residual_;
};

}  // namespace kreg
