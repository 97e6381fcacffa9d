#pragma once

#include <stdexcept>
#include <string>

namespace hazealign {

/// Base class for every error raised by the library. `code()` is a short
/// machine-readable tag used by the CLI's single-line error output.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& message) : Error("io", message) {}
};

class FormatError : public Error {
public:
    explicit FormatError(const std::string& message) : Error("format", message) {}
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& message) : Error("invalid-argument", message) {}
};

}  // namespace hazealign
