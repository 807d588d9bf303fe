#pragma once

#include <stdexcept>
#include <string>

namespace nanosim {

/// Rejected parameter combination. `field()` names the offending knob using the
/// same spelling as the CLI flag and JSON key.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& message)
        : std::invalid_argument(field.empty() ? message : field + ": " + message),
          field_(std::move(field)),
          message_(message) {}

    const std::string& field() const noexcept { return field_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::string field_;
    std::string message_;
};

/// File-system failure; the message always carries the path.
class IoError : public std::runtime_error {
public:
    IoError(const std::string& path, const std::string& message)
        : std::runtime_error(path + ": " + message), path_(path) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Malformed input file content (CSV rows, column maps).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace nanosim
