// errors.hpp: exception types shared by all nlent modules

#pragma once

#include <stdexcept>
#include <string>

namespace nlent {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidDimension : Error {
    using Error::Error;
};

struct LayoutMismatch : Error {
    using Error::Error;
};

// A state or operator does not fit in the configured Fock cutoff.
struct TruncationInsufficient : Error {
    using Error::Error;
};

// Hierarchy order beyond the tabulated commutator polynomials (m > 9).
struct UnsupportedOrder : Error {
    using Error::Error;
};

struct DegenerateState : Error {
    using Error::Error;
};

// A quantity that must be real/Hermitian/consistent carries a residue above tolerance.
struct NumericalConsistency : Error {
    using Error::Error;
};

struct IntegratorFailure : Error {
    IntegratorFailure(const std::string& what, double achieved_residual)
        : Error(what), residual(achieved_residual) {}
    double residual;
};

struct ConfigError : Error {
    using Error::Error;
};

} // namespace nlent
