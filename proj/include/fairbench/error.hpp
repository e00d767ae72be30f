#pragma once

#include <stdexcept>
#include <string>

namespace fairbench {

/// Error raised for invalid inputs, bad configuration, or unusable data.
/// Messages name the offending field/column/method where one exists.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fairbench
