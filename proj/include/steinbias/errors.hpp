#pragma once

#include <stdexcept>
#include <string>

namespace steinbias {

/// Base for every library error; carries a short category tag for reports.
class Error : public std::runtime_error {
public:
    Error(std::string category, const std::string& what)
        : std::runtime_error(what), category_(std::move(category)) {}
    const std::string& category() const noexcept { return category_; }

private:
    std::string category_;
};

class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& what) : Error("dimension", what) {}
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error("validation", what) {}
};

/// Enumeration or table size exceeds the configured cap.
class SizeError : public Error {
public:
    explicit SizeError(const std::string& what) : Error("size", what) {}
};

/// Instance has no randomness to bias (zero variance, all weights zero, zero mean).
class DegenerateError : public Error {
public:
    explicit DegenerateError(const std::string& what) : Error("degenerate", what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("config", what) {}
};

}  // namespace steinbias
