#pragma once

#include <stdexcept>
#include <string>

namespace subq {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonPositiveParameter : public Error {
public:
    explicit NonPositiveParameter(std::string field)
        : Error("parameter '" + field + "' must be strictly positive"), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class CouplingMismatch : public Error {
public:
    using Error::Error;
};

class StepTooLarge : public Error {
public:
    using Error::Error;
};

class NonFinite : public Error {
public:
    using Error::Error;
};

class NotSteadyState : public Error {
public:
    using Error::Error;
};

class WindowOutOfRange : public Error {
public:
    using Error::Error;
};

class TooFewSamples : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace subq
