// krylov.cpp: adaptive short-iterate Lanczos exponential stepping

#include "nlent/krylov.hpp"

#include "nlent/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace nlent::krylov {

namespace {

struct LanczosBasis {
    Eigen::MatrixXcd vectors;   // N x m, orthonormal columns
    Eigen::VectorXd alpha;
    Eigen::VectorXd beta;       // beta(j) couples vectors j and j+1
    double residual = 0.0;      // beta after the last vector
    bool invariant = false;     // happy breakdown: exact within the subspace
    int size = 0;
};

LanczosBasis build_basis(const SparseMatrix& h, const StateVector& start, int max_dim, long& matvecs)
{
    const Eigen::Index n = start.size();
    const int m_max = static_cast<int>(std::min<Eigen::Index>(max_dim, n));
    LanczosBasis basis;
    basis.vectors.resize(n, m_max);
    basis.alpha.resize(m_max);
    basis.beta.resize(m_max);
    basis.vectors.col(0) = start / start.norm();

    double scale = 0.0;
    StateVector w(n);
    for (int j = 0; j < m_max; ++j) {
        w.noalias() = h * basis.vectors.col(j);
        ++matvecs;
        const double a = basis.vectors.col(j).dot(w).real();
        w -= a * basis.vectors.col(j);
        if (j > 0) w -= basis.beta(j - 1) * basis.vectors.col(j - 1);
        // second pass against the two most recent vectors
        const cplx c0 = basis.vectors.col(j).dot(w);
        w -= c0 * basis.vectors.col(j);
        if (j > 0) {
            const cplx c1 = basis.vectors.col(j - 1).dot(w);
            w -= c1 * basis.vectors.col(j - 1);
        }
        const double b = w.norm();
        basis.alpha(j) = a;
        basis.beta(j) = b;
        basis.size = j + 1;
        scale = std::max(scale, std::abs(a) + b);
        if (b <= 1e-13 * std::max(scale, 1.0)) {
            basis.invariant = true;
            basis.residual = 0.0;
            break;
        }
        if (j + 1 < m_max) {
            basis.vectors.col(j + 1) = w / b;
        } else {
            basis.residual = b;
        }
    }
    if (basis.size == n) basis.invariant = true;
    return basis;
}

// Small projected problem: exp(-i s T) e1 from the eigendecomposition of T.
class ProjectedExponential {
public:
    explicit ProjectedExponential(const LanczosBasis& basis)
    {
        const int m = basis.size;
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
        for (int j = 0; j < m; ++j) {
            t(j, j) = basis.alpha(j);
            if (j + 1 < m) t(j, j + 1) = t(j + 1, j) = basis.beta(j);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
        eigenvalues_ = es.eigenvalues();
        eigenvectors_ = es.eigenvectors();
    }

    Eigen::VectorXcd operator()(double s) const
    {
        Eigen::VectorXcd coeff(eigenvalues_.size());
        for (Eigen::Index i = 0; i < eigenvalues_.size(); ++i) {
            coeff(i) = std::polar(eigenvectors_(0, i), -s * eigenvalues_(i));
        }
        return eigenvectors_.cast<cplx>() * coeff;
    }

private:
    Eigen::VectorXd eigenvalues_;
    Eigen::MatrixXd eigenvectors_;
};

} // namespace

StateVector propagate(const SparseMatrix& hamiltonian, const StateVector& psi, double t,
                      const Options& options, Stats* stats)
{
    if (hamiltonian.rows() != psi.size() || hamiltonian.cols() != psi.size()) {
        throw LayoutMismatch("krylov::propagate: Hamiltonian and state sizes differ");
    }
    if (options.krylov_dim < 2) throw InvalidDimension("krylov::propagate: krylov_dim must be >= 2");

    Stats local;
    StateVector current = psi;
    const double direction = t < 0.0 ? -1.0 : 1.0;
    double remaining = std::abs(t);
    const double min_step = std::abs(t) * 1e-13;
    double step = remaining;
    const double order = static_cast<double>(options.krylov_dim);

    while (remaining > 0.0) {
        const double norm = current.norm();
        if (norm == 0.0) break;
        const LanczosBasis basis = build_basis(hamiltonian, current, options.krylov_dim, local.matvecs);
        const ProjectedExponential expo(basis);

        step = std::min(step, remaining);
        Eigen::VectorXcd y;
        double err = 0.0;
        for (;;) {
            y = expo(direction * step);
            err = basis.invariant ? 0.0 : norm * basis.residual * std::abs(y(basis.size - 1));
            if (err <= options.tolerance) break;
            step *= std::clamp(0.9 * std::pow(options.tolerance / err, 1.0 / order), 0.05, 0.9);
            if (step < min_step) {
                throw IntegratorFailure("krylov::propagate: step size underflow, local error "
                                            + std::to_string(err),
                                        err);
            }
        }
        current = norm * (basis.vectors.leftCols(basis.size) * y);
        remaining -= step;
        if (remaining < min_step) remaining = 0.0;
        ++local.substeps;
        local.max_local_error = std::max(local.max_local_error, err);

        const double growth = err > 0.0 ? 0.9 * std::pow(options.tolerance / err, 1.0 / order) : 4.0;
        step *= std::clamp(growth, 1.0, 4.0);
    }

    if (stats) {
        stats->substeps += local.substeps;
        stats->matvecs += local.matvecs;
        stats->max_local_error = std::max(stats->max_local_error, local.max_local_error);
    }
    return current;
}

} // namespace nlent::krylov
