// errors.hpp: error categories the CLI maps to exit codes: configuration
// problems (exit 2) versus data problems (exit 3). Anything else is internal.

#pragma once

#include <stdexcept>
#include <string>

namespace loadshare {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace loadshare
