#pragma once

#include <stdexcept>
#include <string>

namespace annealed_ldp {

// Bad user-supplied data (model definitions, configs, grids).
struct validation_error : std::invalid_argument {
    explicit validation_error(const std::string& what) : std::invalid_argument(what) {}
};

// Argument outside the mathematical domain of an operation.
struct domain_error : std::domain_error {
    explicit domain_error(const std::string& what) : std::domain_error(what) {}
};

// Problem size exceeds a configured cap (exact enumerations).
struct resource_error : std::runtime_error {
    explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

// Solver failed where it provably should not; message carries diagnostics.
struct internal_error : std::runtime_error {
    explicit internal_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace annealed_ldp
