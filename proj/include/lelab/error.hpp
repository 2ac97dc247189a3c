#pragma once

#include <stdexcept>
#include <string>

namespace lelab {

/// Bad user input: malformed config, invalid geometry, parameter out of range.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical procedure failed to deliver its contract (non-convergence,
/// breakdown, iteration cap).
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace lelab
