#pragma once

#include <stdexcept>

namespace casispec {

// Bad configuration or schema violation. CLI exit code 2.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data. CLI exit code 3.
struct input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A quadrature or series failed to converge within its budget. CLI exit code 4.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace casispec
