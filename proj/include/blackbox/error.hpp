#pragma once

#include <stdexcept>
#include <string>

namespace blackbox {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated (negative temperature, p outside [0,1], ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Observer register and box outcome widths disagree.
class WidthMismatch : public Error {
public:
    using Error::Error;
};

// A machine table handed to a constructor is partial or nondeterministic.
class InvalidTable : public Error {
public:
    using Error::Error;
};

// The observer's configured energy budget would be exceeded by another recording.
class EnergyBudgetExhausted : public Error {
public:
    using Error::Error;
};

// A hidden state emitted both bit values at the same position, so the outcome
// is not a function of the hidden state at that granularity.
class StateAliasing : public Error {
public:
    using Error::Error;
};

// Config or box-spec document failed schema validation.
class ConfigError : public Error {
public:
    using Error::Error;
};

// A report could not be written to its destination.
class OutputError : public Error {
public:
    using Error::Error;
};

// A scenario-specific precondition failed (e.g. a trap scenario with N = 0).
class ScenarioPrecondition : public Error {
public:
    ScenarioPrecondition(std::string code, const std::string& what)
        : Error(what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

}  // namespace blackbox
