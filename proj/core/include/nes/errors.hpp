#pragma once

#include <stdexcept>
#include <string>

namespace nes {

// Thrown when an iterative scheme fails to reach its tolerance (quadrature,
// root finding, xi' solve, ...).  Input validation problems use
// std::invalid_argument instead; the CLI maps the two to different exit codes.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}
