#pragma once

#include <stdexcept>

namespace maglev {

// unreadable files or malformed input data
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// invalid or inconsistent run configuration
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// a numeric fit that did not converge or left its model class
struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace maglev
