#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tpiet {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (WKT, queries, CSV cells) with an optional position.
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& message, std::size_t line = 0, std::size_t column = 0)
        : Error(line == 0 ? message
                          : message + " at line " + std::to_string(line) + ", column " +
                                std::to_string(column)),
          line_(line), column_(column), bare_(message) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::string& bare_message() const noexcept { return bare_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string bare_;
};

/// An operation would break a data-model invariant (history, schema, kinds).
class InvariantError : public Error {
public:
    using Error::Error;
};

/// A name (layer, attribute, member, measure...) does not resolve.
class NameError : public Error {
public:
    using Error::Error;
};

/// Operands of the wrong kind or type.
class TypeError : public Error {
public:
    using Error::Error;
};

}  // namespace tpiet
