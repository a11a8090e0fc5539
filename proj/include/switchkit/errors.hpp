#pragma once

#include <stdexcept>
#include <string>

namespace switchkit {

// Precondition violations on caller-supplied values use std::invalid_argument.
// Mathematical domain violations (e.g. a bound that becomes vacuous) use
// std::domain_error. The two types below cover the remaining failure modes.

/// A computation needed more work than its configured cap allows.
class resource_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical procedure could not produce a trustworthy result.
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace switchkit
