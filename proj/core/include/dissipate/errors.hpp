#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dissipate {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset` is the byte offset of the offending token.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Operator specification that violates the schema; `path` is a JSON pointer-like location.
class SpecError : public Error {
public:
    SpecError(const std::string& path, const std::string& what)
        : Error(path + ": " + what), path_(path) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Expression evaluated outside its domain (log/sqrt of negatives, division by zero, overflow).
class EvalError : public Error {
public:
    using Error::Error;
};

/// Failure inside a numerical kernel (singular factorization, non-finite norms).
class NumericError : public Error {
public:
    using Error::Error;
};

/// Re A has a negative direction, so no exponent p can be admissible.
class NonnegativityViolated : public Error {
public:
    explicit NonnegativityViolated(double min_eigenvalue)
        : Error("symmetric part of Re A is not positive semidefinite (min eigenvalue " +
                std::to_string(min_eigenvalue) + ")"),
          min_eigenvalue_(min_eigenvalue) {}
    double min_eigenvalue() const noexcept { return min_eigenvalue_; }

private:
    double min_eigenvalue_;
};

}  // namespace dissipate
