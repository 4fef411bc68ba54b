#pragma once

#include <stdexcept>
#include <string>

namespace embaudit {

// Failure classes map one-to-one onto CLI exit codes (2 and 3).
enum class ErrorKind { Validation, Numeric };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& message)
        : Error(ErrorKind::Validation, message) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& message)
        : Error(ErrorKind::Numeric, message) {}
};

}  // namespace embaudit
