#pragma once

#include <stdexcept>
#include <string>

namespace spinfb {

// Covariance-mode propagation was requested for a configuration whose
// feedback clamp makes the map non-Gaussian.
struct ClampNotGaussian : std::logic_error {
    using std::logic_error::logic_error;
};

// kappa = 0: the second-probe variance does not depend on the gain.
struct DegenerateChannel : std::domain_error {
    using std::domain_error::domain_error;
};

struct InsufficientData : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Conditioning column has zero variance.
struct DegenerateColumn : std::domain_error {
    using std::domain_error::domain_error;
};

// Atom-noise excess in a denominator is not positive.
struct NoAtomSignal : std::domain_error {
    using std::domain_error::domain_error;
};

struct InvalidJ : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidProjection : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SizeExceeded : std::length_error {
    using std::length_error::length_error;
};

struct ConfigError : std::runtime_error {
    std::string field;
    ConfigError(const std::string& field_name, const std::string& message)
        : std::runtime_error(message), field(field_name) {}
};

}  // namespace spinfb
