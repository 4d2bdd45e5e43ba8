#pragma once

#include <stdexcept>
#include <string>

namespace pe {

struct InvalidConfig : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotOnBoundary : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TerminalState : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TerminalProximity : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsupportedDimension : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace pe
