#pragma once

#include <stdexcept>
#include <string>

namespace wallmem {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid user input: config files, schedule tables, overrides, CLI arguments.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace wallmem
