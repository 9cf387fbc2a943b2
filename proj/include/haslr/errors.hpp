#pragma once

#include <stdexcept>
#include <string>

namespace haslr {

// I/O failures (missing files, unreadable rasters, unwritable paths).
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite values encountered inside a numeric routine.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace haslr
