#pragma once

#include <stdexcept>
#include <string>

namespace overlapq {

// Failure classes; the CLI maps each to a distinct exit code.
enum class ErrorKind { validation, cap, oracle_mismatch, internal };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

class CapExceeded : public Error {
public:
    explicit CapExceeded(const std::string& what) : Error(ErrorKind::cap, what) {}
};

class OracleMismatch : public Error {
public:
    explicit OracleMismatch(const std::string& what) : Error(ErrorKind::oracle_mismatch, what) {}
};

int exit_code(ErrorKind kind) noexcept;

}  // namespace overlapq
