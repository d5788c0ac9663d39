#pragma once

#include <stdexcept>
#include <string>

namespace rsif {

/// Base error for every failure raised by the library (bad input files,
/// inapplicable distances, schema mismatches, corrupt models).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rsif
