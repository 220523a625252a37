#pragma once

#include <stdexcept>
#include <string>

namespace hgain {

/// Raised when an exact 128-bit computation would wrap.
class OverflowError : public std::overflow_error {
public:
    explicit OverflowError(const std::string& what) : std::overflow_error(what) {}
};

/// Raised when a digit expansion is too short for the requested operation.
class PrecisionError : public std::out_of_range {
public:
    explicit PrecisionError(const std::string& what) : std::out_of_range(what) {}
};

}  // namespace hgain
