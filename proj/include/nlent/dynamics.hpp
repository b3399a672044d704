// dynamics.hpp: SPDC interaction Hamiltonians and closed-system evolution
//
// The interaction H = i kappa (a^dag^k b^dag^l p - a^k b^l p^dag) (hbar = 1)
// is evolved in the dimensionless strength xi = kappa t alpha_p.

#pragma once

#include "nlent/fock.hpp"
#include "nlent/krylov.hpp"

#include <functional>
#include <string>
#include <vector>

namespace nlent {

struct InteractionSpec {
    int k = 1;
    int l = 2;
    double kappa = 1.0;
    ModeLayout layout = ModeLayout::three_mode(2, 2, 2);
};

struct EvolutionConfig {
    std::vector<double> xi_grid;  // strictly increasing, starting at 0
    double alpha_p = 1.0;
    double kappa = 1.0;           // converts xi to time, t = xi / (kappa alpha_p)
    double tolerance = 1e-9;
    int krylov_dim = 30;
    // Top-two-Fock-level population above which a point is flagged.
    double truncation_guard = 1e-6;
};

// Fully quantum pump on a (pump, A, B) layout; requires k + l >= 3.
TruncatedOperator build_hamiltonian(const InteractionSpec& spec);

// Parametric (classical pump) bilinear oracle on an (A, B) layout:
// H = i kappa alpha_p (a^dag b^dag - a b). Requires k = l = 1.
TruncatedOperator build_classical_pump_hamiltonian(const InteractionSpec& spec, double alpha_p);

struct TrajectoryPoint {
    double xi = 0.0;
    QuantumState state;
    std::vector<double> top_populations;  // per mode, two highest Fock levels
    bool truncation_flag = false;
};

struct EvolutionSummary {
    std::vector<std::string> warnings;
    double max_norm_deviation = 0.0;
    bool truncation_flag = false;
    krylov::Stats stats;
};

struct Trajectory {
    std::vector<TrajectoryPoint> points;
    EvolutionSummary summary;
};

// Visits the state at each xi of the grid in order. Mixed states are evolved
// through their eigen-decomposition. Throws IntegratorFailure when the local
// error cannot be met or the norm drifts by more than 1e-8.
EvolutionSummary evolve_streaming(const QuantumState& initial, const TruncatedOperator& hamiltonian,
                                  const EvolutionConfig& config,
                                  const std::function<void(TrajectoryPoint&&)>& visit);

Trajectory evolve(const QuantumState& initial, const TruncatedOperator& hamiltonian,
                  const EvolutionConfig& config);

// Uniform grid 0, step, 2 step, ... up to xi_max (inclusive within 1e-12).
std::vector<double> uniform_xi_grid(double xi_max, double step);

} // namespace nlent
