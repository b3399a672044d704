// fock.cpp: truncated Fock-space layouts, operators and initial states

#include "nlent/fock.hpp"

#include "nlent/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace nlent {

namespace {

constexpr double kNormTolerance = 1e-8;
constexpr double kHermitianTolerance = 1e-12;
constexpr double kPositivityTolerance = 1e-10;

StateVector kron(const StateVector& x, const StateVector& y)
{
    StateVector out(x.size() * y.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        out.segment(i * y.size(), y.size()) = x(i) * y;
    }
    return out;
}

double max_abs(const SparseMatrix& m)
{
    double r = 0.0;
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
            r = std::max(r, std::abs(it.value()));
        }
    }
    return r;
}

void require_dim(int dim, const char* who)
{
    if (dim < 2) {
        throw InvalidDimension(std::string(who) + ": dimension must be >= 2, got " + std::to_string(dim));
    }
}

} // namespace

// ------------------------------- ModeLayout ---------------------------------

ModeLayout::ModeLayout(std::vector<int> dims, bool has_pump)
    : dims_(std::move(dims)), has_pump_(has_pump)
{
    const std::size_t expected = has_pump_ ? 3 : 2;
    if (dims_.size() != expected) {
        throw InvalidDimension("ModeLayout: expected " + std::to_string(expected) + " modes, got "
                               + std::to_string(dims_.size()));
    }
    for (int d : dims_) {
        require_dim(d, "ModeLayout");
        total_ *= static_cast<std::size_t>(d);
    }
}

ModeLayout ModeLayout::three_mode(int pump_dim, int a_dim, int b_dim)
{
    return ModeLayout({pump_dim, a_dim, b_dim}, true);
}

ModeLayout ModeLayout::two_mode(int a_dim, int b_dim)
{
    return ModeLayout({a_dim, b_dim}, false);
}

int ModeLayout::dim(int mode) const
{
    if (mode < 0 || mode >= modes()) {
        throw LayoutMismatch("ModeLayout: mode index " + std::to_string(mode) + " out of range");
    }
    return dims_[static_cast<std::size_t>(mode)];
}

int ModeLayout::pump() const
{
    if (!has_pump_) throw LayoutMismatch("ModeLayout: layout has no pump mode");
    return 0;
}

std::size_t ModeLayout::stride(int mode) const
{
    std::size_t s = 1;
    for (int m = mode + 1; m < modes(); ++m) s *= static_cast<std::size_t>(dims_[static_cast<std::size_t>(m)]);
    return s;
}

int ModeLayout::occupation(std::size_t index, int mode) const
{
    return static_cast<int>((index / stride(mode)) % static_cast<std::size_t>(dim(mode)));
}

// ---------------------------- TruncatedOperator -----------------------------

TruncatedOperator::TruncatedOperator(ModeLayout layout, SparseMatrix data)
    : layout_(std::move(layout)), data_(std::move(data))
{
    const auto n = static_cast<Eigen::Index>(layout_.total());
    if (data_.rows() != n || data_.cols() != n) {
        throw LayoutMismatch("TruncatedOperator: matrix is " + std::to_string(data_.rows()) + "x"
                             + std::to_string(data_.cols()) + ", layout needs " + std::to_string(n));
    }
    data_.makeCompressed();
}

TruncatedOperator TruncatedOperator::identity(const ModeLayout& layout)
{
    const auto n = static_cast<Eigen::Index>(layout.total());
    SparseMatrix id(n, n);
    id.setIdentity();
    TruncatedOperator op(layout, std::move(id));
    op.hermitian_ = true;
    return op;
}

TruncatedOperator TruncatedOperator::zero(const ModeLayout& layout)
{
    const auto n = static_cast<Eigen::Index>(layout.total());
    TruncatedOperator op(layout, SparseMatrix(n, n));
    op.hermitian_ = true;
    return op;
}

double TruncatedOperator::hermiticity_residual() const
{
    SparseMatrix diff = data_ - SparseMatrix(data_.adjoint());
    return max_abs(diff);
}

TruncatedOperator& TruncatedOperator::mark_hermitian()
{
    const double r = hermiticity_residual();
    if (r >= kHermitianTolerance) {
        throw NumericalConsistency("TruncatedOperator: Hermiticity residual " + std::to_string(r));
    }
    hermitian_ = true;
    return *this;
}

TruncatedOperator TruncatedOperator::adjoint() const
{
    TruncatedOperator op(layout_, SparseMatrix(data_.adjoint()));
    op.hermitian_ = hermitian_;
    return op;
}

StateVector TruncatedOperator::apply(const StateVector& v) const
{
    if (v.size() != data_.cols()) {
        throw LayoutMismatch("TruncatedOperator::apply: vector size mismatch");
    }
    return data_ * v;
}

void TruncatedOperator::require_same_layout(const TruncatedOperator& rhs) const
{
    if (!(layout_ == rhs.layout_)) throw LayoutMismatch("TruncatedOperator: layouts differ");
}

TruncatedOperator TruncatedOperator::operator*(const TruncatedOperator& rhs) const
{
    require_same_layout(rhs);
    return TruncatedOperator(layout_, SparseMatrix(data_ * rhs.data_));
}

TruncatedOperator TruncatedOperator::operator+(const TruncatedOperator& rhs) const
{
    require_same_layout(rhs);
    TruncatedOperator op(layout_, SparseMatrix(data_ + rhs.data_));
    op.hermitian_ = hermitian_ && rhs.hermitian_;
    return op;
}

TruncatedOperator TruncatedOperator::operator-(const TruncatedOperator& rhs) const
{
    require_same_layout(rhs);
    TruncatedOperator op(layout_, SparseMatrix(data_ - rhs.data_));
    op.hermitian_ = hermitian_ && rhs.hermitian_;
    return op;
}

TruncatedOperator TruncatedOperator::operator*(cplx s) const
{
    TruncatedOperator op(layout_, SparseMatrix(data_ * s));
    op.hermitian_ = hermitian_ && s.imag() == 0.0;
    return op;
}

TruncatedOperator commutator(const TruncatedOperator& x, const TruncatedOperator& y)
{
    return x * y - y * x;
}

// ------------------------------- QuantumState -------------------------------

QuantumState::QuantumState(ModeLayout layout, std::variant<StateVector, DenseMatrix> data, double time)
    : layout_(std::move(layout)), data_(std::move(data)), time_(time)
{
}

QuantumState QuantumState::pure(ModeLayout layout, StateVector psi, double time)
{
    if (static_cast<std::size_t>(psi.size()) != layout.total()) {
        throw LayoutMismatch("QuantumState::pure: vector size does not match layout");
    }
    const double norm = psi.norm();
    if (std::abs(norm - 1.0) > kNormTolerance) {
        throw NumericalConsistency("QuantumState::pure: norm " + std::to_string(norm) + " deviates from 1");
    }
    return QuantumState(std::move(layout), std::move(psi), time);
}

QuantumState QuantumState::mixed(ModeLayout layout, DenseMatrix rho, double time)
{
    const auto n = static_cast<Eigen::Index>(layout.total());
    if (rho.rows() != n || rho.cols() != n) {
        throw LayoutMismatch("QuantumState::mixed: density matrix size does not match layout");
    }
    const double tr = rho.trace().real();
    if (std::abs(tr - 1.0) > kNormTolerance || std::abs(rho.trace().imag()) > kNormTolerance) {
        throw NumericalConsistency("QuantumState::mixed: trace " + std::to_string(tr) + " deviates from 1");
    }
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm > kNormTolerance) {
        throw NumericalConsistency("QuantumState::mixed: density matrix is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kPositivityTolerance) {
        throw NumericalConsistency("QuantumState::mixed: negative eigenvalue "
                                   + std::to_string(es.eigenvalues().minCoeff()));
    }
    return QuantumState(std::move(layout), std::move(rho), time);
}

QuantumState QuantumState::ensemble(ModeLayout layout, std::vector<Component> parts, double time)
{
    if (parts.empty()) throw NumericalConsistency("QuantumState::ensemble: no components");
    const auto n = static_cast<Eigen::Index>(layout.total());
    double total = 0.0;
    for (const auto& [w, phi] : parts) {
        if (phi.size() != n) throw LayoutMismatch("QuantumState::ensemble: vector size does not match layout");
        if (!(w >= 0.0)) throw NumericalConsistency("QuantumState::ensemble: negative weight");
        if (std::abs(phi.norm() - 1.0) > kNormTolerance) {
            throw NumericalConsistency("QuantumState::ensemble: component norm deviates from 1");
        }
        total += w;
    }
    if (std::abs(total - 1.0) > kNormTolerance) {
        throw NumericalConsistency("QuantumState::ensemble: weights sum to " + std::to_string(total));
    }
    QuantumState state(std::move(layout), DenseMatrix(), time);
    auto e = std::make_shared<Ensemble>();
    e->parts = std::move(parts);
    state.parts_ = std::move(e);
    return state;
}

std::vector<QuantumState::Component> QuantumState::decomposition() const
{
    if (is_pure()) return {{1.0, vector()}};
    if (parts_) return parts_->parts;
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(density());
    std::vector<Component> out;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        if (es.eigenvalues()(i) > 1e-15) out.emplace_back(es.eigenvalues()(i), es.eigenvectors().col(i));
    }
    return out;
}

QuantumState QuantumState::product(ModeLayout layout, const std::vector<SingleMode>& factors)
{
    if (static_cast<int>(factors.size()) != layout.modes()) {
        throw LayoutMismatch("QuantumState::product: one factor per mode required");
    }
    for (int m = 0; m < layout.modes(); ++m) {
        const auto& f = factors[static_cast<std::size_t>(m)];
        const Eigen::Index size = std::holds_alternative<StateVector>(f)
            ? std::get<StateVector>(f).size()
            : std::get<DenseMatrix>(f).rows();
        if (size != layout.dim(m)) {
            throw LayoutMismatch("QuantumState::product: factor " + std::to_string(m) + " has dimension "
                                 + std::to_string(size) + ", layout expects " + std::to_string(layout.dim(m)));
        }
    }
    const bool all_pure = std::all_of(factors.begin(), factors.end(),
                                      [](const SingleMode& f) { return std::holds_alternative<StateVector>(f); });
    if (all_pure) {
        StateVector psi = std::get<StateVector>(factors.front());
        for (std::size_t m = 1; m < factors.size(); ++m) psi = kron(psi, std::get<StateVector>(factors[m]));
        return pure(std::move(layout), std::move(psi));
    }
    // Mixed factors are decomposed mode by mode; the product of the parts is the full ensemble.
    auto parts_of = [](const SingleMode& f) -> std::vector<Component> {
        if (std::holds_alternative<StateVector>(f)) return {{1.0, std::get<StateVector>(f)}};
        const auto& rho = std::get<DenseMatrix>(f);
        if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kNormTolerance) {
            throw NumericalConsistency("QuantumState::product: factor is not Hermitian");
        }
        Eigen::SelfAdjointEigenSolver<DenseMatrix> es(rho);
        if (es.eigenvalues().minCoeff() < -kPositivityTolerance) {
            throw NumericalConsistency("QuantumState::product: factor has a negative eigenvalue");
        }
        std::vector<Component> out;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
            if (es.eigenvalues()(i) > 1e-15) out.emplace_back(es.eigenvalues()(i), es.eigenvectors().col(i));
        }
        return out;
    };
    std::vector<Component> parts = parts_of(factors.front());
    for (std::size_t m = 1; m < factors.size(); ++m) {
        std::vector<Component> next;
        for (const auto& [w, phi] : parts) {
            for (const auto& [v, chi] : parts_of(factors[m])) {
                if (w * v > 1e-15) next.emplace_back(w * v, kron(phi, chi));
            }
        }
        parts = std::move(next);
    }
    return ensemble(std::move(layout), std::move(parts));
}

const StateVector& QuantumState::vector() const
{
    if (!is_pure()) throw LayoutMismatch("QuantumState::vector: state is mixed");
    return std::get<StateVector>(data_);
}

const DenseMatrix& QuantumState::density() const
{
    if (is_pure()) throw LayoutMismatch("QuantumState::density: state is pure");
    if (parts_) {
        std::call_once(parts_->built, [this] {
            // rho = W W^dag with columns sqrt(w_i) phi_i
            const auto& parts = parts_->parts;
            DenseMatrix w(static_cast<Eigen::Index>(layout_.total()), static_cast<Eigen::Index>(parts.size()));
            for (std::size_t i = 0; i < parts.size(); ++i) {
                w.col(static_cast<Eigen::Index>(i)) = std::sqrt(parts[i].first) * parts[i].second;
            }
            parts_->rho = w * w.adjoint();
        });
        return parts_->rho;
    }
    return std::get<DenseMatrix>(data_);
}

DenseMatrix QuantumState::density_matrix() const
{
    if (is_pure()) {
        const auto& v = vector();
        return v * v.adjoint();
    }
    return density();
}

QuantumState QuantumState::with_time(double t) const
{
    QuantumState out(layout_, data_, t);
    out.parts_ = parts_;
    return out;
}

std::vector<double> QuantumState::populations(int mode) const
{
    const int d = layout_.dim(mode);
    std::vector<double> pop(static_cast<std::size_t>(d), 0.0);
    const std::size_t n = layout_.total();
    if (is_pure()) {
        const auto& v = vector();
        for (std::size_t i = 0; i < n; ++i) {
            pop[static_cast<std::size_t>(layout_.occupation(i, mode))] += std::norm(v(static_cast<Eigen::Index>(i)));
        }
    } else if (parts_) {
        for (const auto& [w, phi] : parts_->parts) {
            for (std::size_t i = 0; i < n; ++i) {
                pop[static_cast<std::size_t>(layout_.occupation(i, mode))] += w * std::norm(phi(static_cast<Eigen::Index>(i)));
            }
        }
    } else {
        const auto& rho = density();
        for (std::size_t i = 0; i < n; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            pop[static_cast<std::size_t>(layout_.occupation(i, mode))] += rho(ii, ii).real();
        }
    }
    return pop;
}

std::vector<double> QuantumState::top_level_populations() const
{
    std::vector<double> out;
    for (int m = 0; m < layout_.modes(); ++m) {
        const auto pop = populations(m);
        out.push_back(pop[pop.size() - 1] + pop[pop.size() - 2]);
    }
    return out;
}

// ------------------------------ single mode ---------------------------------

DenseMatrix annihilation(int dim)
{
    require_dim(dim, "annihilation");
    DenseMatrix a = DenseMatrix::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

DenseMatrix creation(int dim)
{
    return annihilation(dim).adjoint();
}

DenseMatrix number(int dim)
{
    require_dim(dim, "number");
    DenseMatrix n = DenseMatrix::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) n(k, k) = static_cast<double>(k);
    return n;
}

TruncatedOperator embed(const DenseMatrix& op, int mode, const ModeLayout& layout)
{
    const int d = layout.dim(mode);
    if (op.rows() != d || op.cols() != d) {
        throw LayoutMismatch("embed: operator is " + std::to_string(op.rows()) + "x" + std::to_string(op.cols())
                             + " but mode " + std::to_string(mode) + " has dimension " + std::to_string(d));
    }
    const std::size_t right = layout.stride(mode);
    const std::size_t left = layout.total() / (right * static_cast<std::size_t>(d));

    std::vector<Eigen::Triplet<cplx>> entries;
    std::vector<std::pair<int, int>> nz;
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) {
            if (op(r, c) != cplx(0.0)) nz.emplace_back(r, c);
        }
    }
    entries.reserve(left * right * nz.size());
    for (std::size_t L = 0; L < left; ++L) {
        for (const auto& [r, c] : nz) {
            const std::size_t row0 = (L * static_cast<std::size_t>(d) + static_cast<std::size_t>(r)) * right;
            const std::size_t col0 = (L * static_cast<std::size_t>(d) + static_cast<std::size_t>(c)) * right;
            for (std::size_t R = 0; R < right; ++R) {
                entries.emplace_back(static_cast<Eigen::Index>(row0 + R), static_cast<Eigen::Index>(col0 + R), op(r, c));
            }
        }
    }
    const auto n = static_cast<Eigen::Index>(layout.total());
    SparseMatrix m(n, n);
    m.setFromTriplets(entries.begin(), entries.end());
    TruncatedOperator out(layout, std::move(m));
    if ((op - op.adjoint()).cwiseAbs().maxCoeff() < kHermitianTolerance) out.mark_hermitian();
    return out;
}

StateVector coherent_state(cplx alpha, int dim, CoherentOptions options)
{
    require_dim(dim, "coherent_state");
    const double mean = std::norm(alpha);
    if (!options.allow_insufficient_truncation && mean > dim / 4.0) {
        throw TruncationInsufficient("coherent_state: |alpha|^2 = " + std::to_string(mean)
                                     + " exceeds dim/4 = " + std::to_string(dim / 4.0));
    }
    StateVector v(dim);
    // log-space amplitudes avoid overflow of alpha^n / sqrt(n!)
    const double log_abs = mean > 0.0 ? std::log(std::abs(alpha)) : 0.0;
    const double phase = std::arg(alpha);
    for (int n = 0; n < dim; ++n) {
        if (mean == 0.0) {
            v(n) = n == 0 ? 1.0 : 0.0;
            continue;
        }
        const double log_mag = -mean / 2.0 + n * log_abs - 0.5 * std::lgamma(n + 1.0);
        v(n) = std::polar(std::exp(log_mag), n * phase);
    }
    v /= v.norm();
    return v;
}

DenseMatrix thermal_state(double n_th, int dim)
{
    require_dim(dim, "thermal_state");
    if (!(n_th >= 0.0)) throw InvalidDimension("thermal_state: mean occupation must be >= 0");
    DenseMatrix rho = DenseMatrix::Zero(dim, dim);
    const double ratio = n_th / (1.0 + n_th);
    double w = 1.0;
    double total = 0.0;
    for (int n = 0; n < dim; ++n) {
        rho(n, n) = w;
        total += w;
        w *= ratio;
    }
    return rho / total;
}

StateVector fock_state(int n, int dim)
{
    require_dim(dim, "fock_state");
    if (n < 0 || n >= dim) throw InvalidDimension("fock_state: level outside truncation");
    StateVector v = StateVector::Zero(dim);
    v(n) = 1.0;
    return v;
}

} // namespace nlent
