#pragma once

#include <stdexcept>
#include <string>

namespace lossq {

// Process exit codes used by the CLI. Every library error maps onto one.
enum class ExitCode : int {
    ok = 0,
    usage = 1,
    validation = 2,
    regime = 3,
    comparison_fail = 4,
    runaway_sim = 5,
};

class Error : public std::runtime_error {
public:
    Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ExitCode code() const noexcept { return code_; }

private:
    ExitCode code_;
};

// Bad command line, unreadable config, unwritable output.
class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error(ExitCode::usage, what) {}
};

// Bad parameters, malformed config, violated preconditions.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(ExitCode::validation, what) {}
};

// Argument outside the mathematical domain of a function (e.g. negative transform argument).
class DomainError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// A closed form is not available for the requested quantity.
class UnsupportedError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// A series could not be truncated within the hard term cap.
class TruncationError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Recurrence kernel too close to singular to solve forward.
class IllConditionedError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Operation requested in a traffic regime where it is not defined.
class RegimeError : public Error {
public:
    explicit RegimeError(const std::string& what) : Error(ExitCode::regime, what) {}
};

class BracketError : public RegimeError {
public:
    using RegimeError::RegimeError;
};

class ComparisonError : public Error {
public:
    explicit ComparisonError(const std::string& what) : Error(ExitCode::comparison_fail, what) {}
};

class RunawayError : public Error {
public:
    explicit RunawayError(const std::string& what) : Error(ExitCode::runaway_sim, what) {}
};

}  // namespace lossq
