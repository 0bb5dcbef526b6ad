#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace semfast {

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries the 1-based line number.
class ParseError : public Error
{
public:
    ParseError(std::size_t line, const std::string& message)
        : Error("line " + std::to_string(line) + ": " + message), line_(line)
    {
    }

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A record violates a data-model invariant.
class InvariantError : public Error
{
public:
    InvariantError(std::int64_t frame, std::string field, const std::string& message)
        : Error(message + " (frame " + std::to_string(frame) + ", field '" + field + "')"),
          frame_(frame), field_(std::move(field))
    {
    }

    std::int64_t frame() const noexcept { return frame_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::int64_t frame_;
    std::string field_;
};

/// Invalid parameters or configuration values.
class ConfigError : public Error
{
public:
    using Error::Error;
};

} // namespace semfast
