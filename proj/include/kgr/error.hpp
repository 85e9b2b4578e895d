#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kgr {

enum class ErrorKind {
    InvalidName,
    ParseError,
    UnknownPredicate,
    RangeRestriction,
    KindConflict,
    UnknownFact,
    ResourceLimit,
    DuplicateNamespace,
    UnresolvedClass,
    AlreadyExists,
    StaleClosure,
    Io,
};

std::string_view to_string(ErrorKind kind);

// Every failure the library reports is an Error; kind() tells callers which.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Parse failures carry the 1-based line they came from (0 when not line-oriented).
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line = 0,
               ErrorKind kind = ErrorKind::ParseError)
        : Error(kind, line ? "line " + std::to_string(line) + ": " + message : message),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace kgr
