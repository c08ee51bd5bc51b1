#pragma once

#include <stdexcept>
#include <string>

namespace lcrec {

// Base class for all library errors. The CLI maps ValidationError (and
// subclasses) to exit code 1 and everything else to exit code 2.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad user input: malformed files, out-of-range values, invalid config.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

// A row/line failed to parse; carries the 1-based line number in the message.
class ParseError : public ValidationError {
public:
    ParseError(const std::string& path, std::size_t line, const std::string& what)
        : ValidationError(path + ":" + std::to_string(line) + ": " + what),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// A binary or structured file does not match its declared format.
class FormatError : public ValidationError {
public:
    explicit FormatError(const std::string& msg) : ValidationError(msg) {}
};

// Config file problems: unknown keys, invalid enum values.
class ConfigError : public ValidationError {
public:
    explicit ConfigError(const std::string& msg) : ValidationError(msg) {}
};

// Training produced a non-finite loss.
class DivergenceError : public Error {
public:
    explicit DivergenceError(const std::string& msg) : Error(msg) {}
};

}  // namespace lcrec
