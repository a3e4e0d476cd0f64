#pragma once

#include <stdexcept>
#include <string>

namespace ssrforge {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input data: CSV/schema problems, degenerate targets, too few instances.
class DataError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration or parameters.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace ssrforge
