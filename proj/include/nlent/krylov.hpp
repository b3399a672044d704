// krylov.hpp: Lanczos approximation of exp(-i H t) v for sparse Hermitian H

#pragma once

#include "nlent/fock.hpp"

namespace nlent::krylov {

struct Options {
    int krylov_dim = 30;
    // Accepted local error per substep, estimated a posteriori from the
    // residual of the Lanczos projection.
    double tolerance = 1e-9;
};

struct Stats {
    int substeps = 0;
    long matvecs = 0;
    double max_local_error = 0.0;
};

// Returns exp(-i H t) psi. t may be negative. H must be Hermitian; only the
// stored matrix is used, no check is made here.
StateVector propagate(const SparseMatrix& hamiltonian, const StateVector& psi, double t,
                      const Options& options = {}, Stats* stats = nullptr);

} // namespace nlent::krylov
