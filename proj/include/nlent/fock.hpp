// fock.hpp: truncated multimode Fock space: layouts, operators, states
//
// Basis ordering is row-major over the modes of a layout. For the standard
// three-mode layout (pump, A, B) the basis index of |p, a, b> is
//     (p * dim_A + a) * dim_B + b.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

namespace nlent {

using cplx = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

class ModeLayout {
public:
    // dims are per-mode truncation dimensions (photon cutoff + 1). When has_pump
    // is set, mode 0 is the pump and modes 1, 2 are A, B; otherwise modes 0, 1
    // are A, B.
    ModeLayout(std::vector<int> dims, bool has_pump);

    static ModeLayout three_mode(int pump_dim, int a_dim, int b_dim);
    static ModeLayout two_mode(int a_dim, int b_dim);

    const std::vector<int>& dims() const { return dims_; }
    int dim(int mode) const;
    int modes() const { return static_cast<int>(dims_.size()); }
    std::size_t total() const { return total_; }
    bool has_pump() const { return has_pump_; }

    int pump() const;  // throws LayoutMismatch when the layout has no pump
    int mode_a() const { return has_pump_ ? 1 : 0; }
    int mode_b() const { return has_pump_ ? 2 : 1; }

    // Number of basis states spanned by the modes after `mode`.
    std::size_t stride(int mode) const;

    // Fock index of `mode` inside a global basis index.
    int occupation(std::size_t index, int mode) const;

    bool operator==(const ModeLayout& other) const {
        return dims_ == other.dims_ && has_pump_ == other.has_pump_;
    }

private:
    std::vector<int> dims_;
    bool has_pump_;
    std::size_t total_ = 1;
};

class TruncatedOperator {
public:
    TruncatedOperator(ModeLayout layout, SparseMatrix data);

    static TruncatedOperator identity(const ModeLayout& layout);
    static TruncatedOperator zero(const ModeLayout& layout);

    const ModeLayout& layout() const { return layout_; }
    const SparseMatrix& matrix() const { return data_; }

    // max |M - M^dagger| over stored entries
    double hermiticity_residual() const;
    bool is_hermitian() const { return hermitian_; }
    // Sets the Hermitian flag; throws NumericalConsistency when the residual
    // is >= 1e-12.
    TruncatedOperator& mark_hermitian();

    TruncatedOperator adjoint() const;
    StateVector apply(const StateVector& v) const;

    TruncatedOperator operator*(const TruncatedOperator& rhs) const;
    TruncatedOperator operator+(const TruncatedOperator& rhs) const;
    TruncatedOperator operator-(const TruncatedOperator& rhs) const;
    TruncatedOperator operator*(cplx s) const;

private:
    void require_same_layout(const TruncatedOperator& rhs) const;

    ModeLayout layout_;
    SparseMatrix data_;
    bool hermitian_ = false;
};

TruncatedOperator commutator(const TruncatedOperator& x, const TruncatedOperator& y);

// Pure (vector) or mixed (density matrix) state on a layout.
class QuantumState {
public:
    using SingleMode = std::variant<StateVector, DenseMatrix>;
    // rho = sum_i w_i |phi_i><phi_i|
    using Component = std::pair<double, StateVector>;

    static QuantumState pure(ModeLayout layout, StateVector psi, double time = 0.0);
    static QuantumState mixed(ModeLayout layout, DenseMatrix rho, double time = 0.0);
    // Mixture of normalized vectors with non-negative weights summing to 1.
    // Keeps the components, so decomposition() needs no eigensolve; the
    // density matrix is formed only when density() is called.
    static QuantumState ensemble(ModeLayout layout, std::vector<Component> parts, double time = 0.0);
    // Tensor product over the modes of the layout, in layout order. Pure when
    // every factor is a vector.
    static QuantumState product(ModeLayout layout, const std::vector<SingleMode>& factors);

    const ModeLayout& layout() const { return layout_; }
    bool is_pure() const { return std::holds_alternative<StateVector>(data_); }
    const StateVector& vector() const;
    const DenseMatrix& density() const;
    DenseMatrix density_matrix() const;  // |psi><psi| for pure states
    double time() const { return time_; }
    QuantumState with_time(double t) const;
    // Weighted pure components; eigenvectors of rho unless built as an ensemble.
    std::vector<Component> decomposition() const;
    bool has_components() const { return parts_ != nullptr; }

    // Population of each Fock level of `mode`.
    std::vector<double> populations(int mode) const;
    // Population of the two highest Fock levels of every mode.
    std::vector<double> top_level_populations() const;

private:
    QuantumState(ModeLayout layout, std::variant<StateVector, DenseMatrix> data, double time);

    ModeLayout layout_;
    std::variant<StateVector, DenseMatrix> data_;
    double time_;
    struct Ensemble {
        std::vector<Component> parts;
        mutable std::once_flag built;
        mutable DenseMatrix rho;  // filled on first density() call
    };
    std::shared_ptr<const Ensemble> parts_;
};

// Single-mode ladder operator: entries sqrt(n) at (n-1, n).
DenseMatrix annihilation(int dim);
DenseMatrix creation(int dim);
DenseMatrix number(int dim);

// op acting on `mode`, identity elsewhere.
TruncatedOperator embed(const DenseMatrix& op, int mode, const ModeLayout& layout);

struct CoherentOptions {
    bool allow_insufficient_truncation = false;
};

// Requires |alpha|^2 <= dim/4 unless overridden.
StateVector coherent_state(cplx alpha, int dim, CoherentOptions options = {});
DenseMatrix thermal_state(double n_th, int dim);
StateVector fock_state(int n, int dim);

} // namespace nlent
