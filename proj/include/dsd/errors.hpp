#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dsd {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input data (markers, labels, record layout, ...).
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what, std::size_t line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    /// 1-based line number of the offending record, 0 if not file-bound.
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Invalid configuration or precondition violation.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Embedding or chat provider failure.
class ProviderError : public Error {
public:
    explicit ProviderError(const std::string& what, bool retryable = false)
        : Error(what), retryable_(retryable) {}

    bool retryable() const { return retryable_; }

private:
    bool retryable_;
};

}  // namespace dsd
