#pragma once

#include <stdexcept>
#include <string>

namespace shapes {

// Error taxonomy used across the library. All are runtime conditions caused by
// bad inputs or solver limits, never internal logic bugs (those assert).

struct GridMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct EmptyShape : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct BadMove : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct MassMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InsufficientCapacity : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Reserved: cannot occur for equal-mass instances, kept for the capacitated path.
struct Infeasible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TooLarge : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Window audit still failing after the maximum number of enlargements.
struct WindowOverflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct VolumeViolation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct BadSchedule : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Unrepresentable : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct BadEpsilon : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SeparationViolation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct BadInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Text-format parse failure; carries the 1-based line number.
struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_, const std::string& what_)
        : std::runtime_error("line " + std::to_string(line_) + ": " + what_), line(line_) {}
};

}  // namespace shapes
