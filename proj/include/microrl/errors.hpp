#pragma once

#include <stdexcept>
#include <string>

namespace microrl {

/// Invalid scenario, trainer or plan configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Caller broke the simulator's step/observe protocol.
struct ProtocolError : std::logic_error {
    using std::logic_error::logic_error;
};

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Vector or parameter length does not match the network layout.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Non-finite TD error or parameters during training.
struct NumericDivergence : NumericError {
    NumericDivergence(int episode, int tick, const std::string& what)
        : NumericError("numeric divergence at episode " + std::to_string(episode) + ", tick " +
                       std::to_string(tick) + ": " + what),
          episode(episode),
          tick(tick) {}
    int episode;
    int tick;
};

/// Checkpoint file is missing, truncated or malformed.
struct CheckpointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parameters could not be handed from one curriculum stage to the next.
struct TransferError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace microrl
