// dynamics.cpp: Hamiltonian construction and trajectory stepping

#include "nlent/dynamics.hpp"

#include "nlent/errors.hpp"


#include <cmath>
#include <sstream>
#include <string>

namespace nlent {

namespace {

constexpr double kNormDriftLimit = 1e-8;

DenseMatrix power(const DenseMatrix& m, int p)
{
    DenseMatrix out = DenseMatrix::Identity(m.rows(), m.cols());
    for (int i = 0; i < p; ++i) out = out * m;
    return out;
}

void validate_grid(const EvolutionConfig& config)
{
    if (config.xi_grid.empty() || config.xi_grid.front() != 0.0) {
        throw ConfigError("evolve: xi grid must start at 0");
    }
    for (std::size_t i = 1; i < config.xi_grid.size(); ++i) {
        if (!(config.xi_grid[i] > config.xi_grid[i - 1])) {
            throw ConfigError("evolve: xi grid must be strictly increasing");
        }
    }
    if (!(config.alpha_p > 0.0) || !(config.kappa > 0.0)) {
        throw ConfigError("evolve: alpha_p and kappa must be positive");
    }
}

} // namespace

TruncatedOperator build_hamiltonian(const InteractionSpec& spec)
{
    const ModeLayout& layout = spec.layout;
    if (!layout.has_pump()) throw LayoutMismatch("build_hamiltonian: needs a (pump, A, B) layout");
    if (spec.k < 1 || spec.l < 1 || spec.k + spec.l < 3) {
        throw InvalidDimension("build_hamiltonian: need k, l >= 1 and k + l >= 3");
    }
    if (spec.k >= layout.dim(layout.mode_a()) || spec.l >= layout.dim(layout.mode_b())) {
        throw InvalidDimension("build_hamiltonian: power exceeds the truncation of its mode");
    }
    const auto up_a = embed(power(creation(layout.dim(layout.mode_a())), spec.k), layout.mode_a(), layout);
    const auto up_b = embed(power(creation(layout.dim(layout.mode_b())), spec.l), layout.mode_b(), layout);
    const auto p = embed(annihilation(layout.dim(layout.pump())), layout.pump(), layout);

    const TruncatedOperator gain = up_a * up_b * p;
    TruncatedOperator h = (gain - gain.adjoint()) * cplx(0.0, spec.kappa);
    return h.mark_hermitian();
}

TruncatedOperator build_classical_pump_hamiltonian(const InteractionSpec& spec, double alpha_p)
{
    if (spec.k + spec.l >= 3) throw UnsupportedOrder("build_classical_pump_hamiltonian: only k = l = 1 is supported");
    if (spec.k != 1 || spec.l != 1) throw InvalidDimension("build_classical_pump_hamiltonian: need k = l = 1");
    const ModeLayout& layout = spec.layout;
    if (layout.has_pump()) throw LayoutMismatch("build_classical_pump_hamiltonian: needs an (A, B) layout");
    const auto up_a = embed(creation(layout.dim(layout.mode_a())), layout.mode_a(), layout);
    const auto up_b = embed(creation(layout.dim(layout.mode_b())), layout.mode_b(), layout);
    const TruncatedOperator gain = up_a * up_b;
    TruncatedOperator h = (gain - gain.adjoint()) * cplx(0.0, spec.kappa * alpha_p);
    return h.mark_hermitian();
}

EvolutionSummary evolve_streaming(const QuantumState& initial, const TruncatedOperator& hamiltonian,
                                  const EvolutionConfig& config,
                                  const std::function<void(TrajectoryPoint&&)>& visit)
{
    validate_grid(config);
    if (!(initial.layout() == hamiltonian.layout())) throw LayoutMismatch("evolve: state and Hamiltonian layouts differ");
    if (!hamiltonian.is_hermitian()) throw NumericalConsistency("evolve: Hamiltonian is not flagged Hermitian");

    const ModeLayout& layout = initial.layout();
    const krylov::Options kopts{config.krylov_dim, config.tolerance};
    EvolutionSummary summary;

    // Pure components and weights; a pure state is a single component.
    std::vector<QuantumState::Component> parts = initial.decomposition();

    const double time_scale = 1.0 / (config.kappa * config.alpha_p);
    double previous_xi = 0.0;
    for (double xi : config.xi_grid) {
        const double dt = (xi - previous_xi) * time_scale;
        double norm_dev = 0.0;
        for (auto& [w, c] : parts) {
            if (dt > 0.0) c = krylov::propagate(hamiltonian.matrix(), c, dt, kopts, &summary.stats);
            norm_dev = std::max(norm_dev, std::abs(c.norm() - 1.0));
        }
        previous_xi = xi;
        summary.max_norm_deviation = std::max(summary.max_norm_deviation, norm_dev);
        if (norm_dev > kNormDriftLimit) {
            throw IntegratorFailure("evolve: norm drift " + std::to_string(norm_dev) + " at xi = " + std::to_string(xi),
                                    norm_dev);
        }

        const double t = xi * time_scale;
        QuantumState state = [&]() {
            if (initial.is_pure()) return QuantumState::pure(layout, parts.front().second, t);
            return QuantumState::ensemble(layout, parts, t);
        }();

        TrajectoryPoint point{xi, std::move(state), {}, false};
        point.top_populations = point.state.top_level_populations();
        for (std::size_t m = 0; m < point.top_populations.size(); ++m) {
            if (point.top_populations[m] >= config.truncation_guard) {
                point.truncation_flag = true;
                std::ostringstream msg;
                msg << "truncation guard: mode " << m << " top-level population " << point.top_populations[m]
                    << " at xi = " << xi;
                summary.warnings.push_back(msg.str());
            }
        }
        summary.truncation_flag = summary.truncation_flag || point.truncation_flag;
        visit(std::move(point));
    }
    return summary;
}

Trajectory evolve(const QuantumState& initial, const TruncatedOperator& hamiltonian, const EvolutionConfig& config)
{
    Trajectory out;
    out.summary = evolve_streaming(initial, hamiltonian, config,
                                   [&](TrajectoryPoint&& p) { out.points.push_back(std::move(p)); });
    return out;
}

std::vector<double> uniform_xi_grid(double xi_max, double step)
{
    if (!(step > 0.0) || !(xi_max >= 0.0)) throw ConfigError("uniform_xi_grid: need step > 0 and xi_max >= 0");
    std::vector<double> grid;
    for (long i = 0;; ++i) {
        const double xi = static_cast<double>(i) * step;
        if (xi > xi_max + 1e-12) break;
        grid.push_back(xi);
    }
    return grid;
}

} // namespace nlent
