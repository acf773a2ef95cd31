#pragma once

#include <stdexcept>
#include <string>

namespace twolevel {

/// Invalid user-facing configuration. `field` names the offending entry
/// (dotted path, e.g. "pulse.x").
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& what)
        : std::invalid_argument(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A numerical guard tripped (non-finite values, oracle norm drift).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace twolevel
