#pragma once

#include <stdexcept>
#include <string>

namespace subrecoil {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Basis index component outside the truncated Hilbert space.
struct BoundsError : Error {
    using Error::Error;
};

// Antisymmetrization of a doubly occupied momentum state vanishes.
struct PauliExclusionError : Error {
    using Error::Error;
};

// Requested wave packet does not fit the momentum truncation.
struct TruncationError : Error {
    using Error::Error;
};

// Operator or density matrix would exceed the configured memory budget.
struct CapacityError : Error {
    using Error::Error;
};

// Adaptive stepper failed to make progress.
struct IntegrationError : Error {
    using Error::Error;
};

// Norm grew between jumps; the effective Hamiltonian is not contractive.
struct NonContractivityError : Error {
    using Error::Error;
};

struct NormalizationError : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

// One or more trajectories of an ensemble raised an error.
struct EnsembleError : Error {
    using Error::Error;
};

}  // namespace subrecoil
