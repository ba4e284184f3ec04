#pragma once

#include <stdexcept>
#include <string>

namespace wrisk {

/// Base class for every error raised by the library. The kind maps onto the
/// command-line exit codes (1 config, 2 data, 3 fit, 4 model version).
class Error : public std::runtime_error {
public:
    enum class Kind { Config = 1, Data = 2, Fit = 3, ModelVersion = 4 };

    Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
    Kind kind_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(Kind::Config, what) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(Kind::Data, what) {}
};

class FitError : public Error {
public:
    explicit FitError(const std::string& what) : Error(Kind::Fit, what) {}
};

class ModelVersionError : public Error {
public:
    explicit ModelVersionError(const std::string& what) : Error(Kind::ModelVersion, what) {}
};

} // namespace wrisk
