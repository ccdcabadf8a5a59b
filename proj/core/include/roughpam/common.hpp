#pragma once

#include <stdexcept>
#include <string>

namespace roughpam {

inline constexpr double kPi = 3.14159265358979323846;

// Invalid parameters or configuration content. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double achieved_error)
        : std::runtime_error(what), achieved_error_(achieved_error) {}
    double achieved_error() const noexcept { return achieved_error_; }

private:
    double achieved_error_;
};

class InstabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Results store inconsistency. Maps to CLI exit code 4.
class IntegrityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace roughpam
