#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tracelab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inputs that violate an operation's precondition (dimension mismatch,
/// label mismatch, non-MC where an MC is required, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A file that cannot be opened for reading or writing.
class IoError : public Error {
public:
    using Error::Error;
};

/// Text that cannot be parsed. `line`/`column` are 1-based; zero when the
/// error is structural and `location` carries a JSON path instead.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line, std::size_t column)
        : Error(message + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
          line_(line), column_(column) {}
    ParseError(const std::string& message, const std::string& location)
        : Error(location.empty() ? message : location + ": " + message), location_(location) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }
    const std::string& location() const { return location_; }

    /// Same position and location, message prefixed (e.g. with a file name).
    ParseError with_prefix(const std::string& prefix) const {
        ParseError e(*this);
        static_cast<std::runtime_error&>(e) = std::runtime_error(prefix + what());
        return e;
    }

private:
    std::size_t line_ = 0;
    std::size_t column_ = 0;
    std::string location_;
};

/// An exhaustive enumeration would exceed the configured limit.
class GuardExceeded : public Error {
public:
    GuardExceeded(const std::string& what, std::uint64_t limit, std::uint64_t required)
        : Error(what + ": enumeration of " + std::to_string(required) +
                " candidates exceeds the guard of " + std::to_string(limit)),
          limit_(limit), required_(required) {}

    std::uint64_t limit() const { return limit_; }
    std::uint64_t required() const { return required_; }

private:
    std::uint64_t limit_;
    std::uint64_t required_;
};

/// Default bound on pure-strategy enumerations.
inline constexpr std::uint64_t kDefaultGuard = 1'000'000;

/// Reads TRACELAB_GUARD from the environment, falling back to kDefaultGuard.
std::uint64_t guard_from_env();

} // namespace tracelab
