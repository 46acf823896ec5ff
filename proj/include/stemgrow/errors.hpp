#pragma once

#include <stdexcept>
#include <string>

namespace stemgrow {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// API misuse: violated precondition, mismatched lengths, wrong call context.
struct UsageError : Error {
    explicit UsageError(const std::string& what) : Error(what) {}
};

// Invalid configuration input; `key` names the offending entry when known.
struct ConfigError : Error {
    explicit ConfigError(const std::string& what, std::string key_ = {})
        : Error(what), key(std::move(key_)) {}
    std::string key;
};

// Signed-distance gradient does not exist at the query point
// (sphere center, or equidistance locus of a union).
struct DegenerateGradientError : Error {
    explicit DegenerateGradientError(const std::string& what) : Error(what) {}
};

// The single-point multiplier denominator fell below the singularity floor:
// the configuration is at or near the breakdown set (B).
struct BreakdownProximityError : Error {
    explicit BreakdownProximityError(const std::string& what) : Error(what) {}
};

// Push-out exhausted max_iter with residual penetration above tolerance.
struct PushFailureError : Error {
    PushFailureError(const std::string& what, double residual_depth_)
        : Error(what), residual_depth(residual_depth_) {}
    double residual_depth;
};

// The moving-frame Volterra solve degenerated (chords nearly orthogonal to
// tangents, or the fixed-point sweep failed to contract).
struct IllConditionedFrameError : Error {
    explicit IllConditionedFrameError(const std::string& what) : Error(what) {}
};

}  // namespace stemgrow
