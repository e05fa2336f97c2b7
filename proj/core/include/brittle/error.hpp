#pragma once

#include <stdexcept>
#include <string>

namespace brittle {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite or otherwise unusable arguments to a kernel.
struct InvalidInputError : Error {
    using Error::Error;
};

// Coplanar / ill-conditioned / sub-floor-volume element.
struct DegenerateElementError : Error {
    using Error::Error;
};

// Malformed mesh or scene file.
struct ParseError : Error {
    ParseError(const std::string& path, int line, const std::string& what)
        : Error(path + ":" + std::to_string(line) + ": " + what), line_number(line) {}
    int line_number;
};

// Semantically invalid scene or mesh (bad material values, bad orientation, ...).
struct ValidationError : Error {
    using Error::Error;
};

// Bad runtime configuration (zero-mass free node, non-positive dt, ...).
struct ConfigError : Error {
    using Error::Error;
};

// Non-finite simulation state.
struct DivergedError : Error {
    using Error::Error;
};

}  // namespace brittle
