#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace landau {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failures: map to exit code 2 in the CLI.
class NumericError : public Error {
public:
    using Error::Error;
};

class NotPsd : public NumericError {
public:
    using NumericError::NumericError;
};

class SingularRelativeVelocity : public NumericError {
public:
    using NumericError::NumericError;
};

class NonFinite : public NumericError {
public:
    NonFinite(std::string const &what, std::size_t particle, long step)
        : NumericError(what), particle_(particle), step_(step)
    {
    }
    [[nodiscard]] std::size_t particle() const noexcept { return particle_; }
    [[nodiscard]] long step() const noexcept { return step_; }

private:
    std::size_t particle_;
    long step_;
};

class NotCentered : public NumericError {
public:
    using NumericError::NumericError;
};

class Degenerate : public NumericError {
public:
    using NumericError::NumericError;
};

/// Invalid argument outside a function's mathematical domain.
class DomainError : public Error {
public:
    using Error::Error;
};

class SizeMismatch : public Error {
public:
    using Error::Error;
};

class TooLarge : public Error {
public:
    using Error::Error;
};

/// Configuration problem; carries the offending field and, when known, the line.
class ConfigError : public Error {
public:
    ConfigError(std::string field, std::string const &message, int line = 0)
        : Error(format(field, message, line)), field_(std::move(field)), line_(line)
    {
    }
    [[nodiscard]] std::string const &field() const noexcept { return field_; }
    [[nodiscard]] int line() const noexcept { return line_; }

private:
    static std::string format(std::string const &field, std::string const &message, int line)
    {
        std::string out;
        if (line > 0)
            out += "line " + std::to_string(line) + ": ";
        if (!field.empty())
            out += "'" + field + "': ";
        return out + message;
    }

    std::string field_;
    int line_;
};

} // namespace landau
