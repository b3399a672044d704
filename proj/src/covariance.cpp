// covariance.cpp: V^{kl} assembly, standard form, higher cumulants

#include "nlent/covariance.hpp"

#include "nlent/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

namespace nlent {

Eigen::Matrix4d HigherOrderCovariance::F() const
{
    Eigen::Vector4d d(f_kA, f_kA, f_lB, f_lB);
    return d.asDiagonal();
}

HigherOrderCovariance build_covariance(const QuantumState& state, const QuadratureSet& ops)
{
    const auto r = ops.vector();
    const Moments m = moments({r.begin(), r.end()}, state);
    HigherOrderCovariance cov;
    for (int i = 0; i < 4; ++i) {
        cov.first_moments(i) = m.mean(i);
        for (int j = 0; j < 4; ++j) cov.V(i, j) = m.second(i, j).real() - m.mean(i) * m.mean(j);
    }
    const double asym = (cov.V - cov.V.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-10 * std::max(1.0, cov.V.cwiseAbs().maxCoeff())) {
        throw NumericalConsistency("build_covariance: V asymmetric by " + std::to_string(asym));
    }
    cov.V = (cov.V + cov.V.transpose()) * 0.5;
    cov.f_kA = expectation(ops.f_a, state).real();
    cov.f_lB = expectation(ops.f_b, state).real();
    cov.n = ops.n;
    cov.k = ops.k;
    cov.l = ops.l;
    return cov;
}

HigherOrderCovariance build_covariance(const QuantumState& state, int n, int k, int l)
{
    return build_covariance(state, quadrature_set(n, k, l, state.layout()));
}

Eigen::Matrix4d mirror_reflect(const Eigen::Matrix4d& V)
{
    Eigen::Matrix4d out = V;
    out.row(3) *= -1.0;
    out.col(3) *= -1.0;
    return out;
}

HigherOrderCovariance mirror_reflect(const HigherOrderCovariance& cov)
{
    HigherOrderCovariance out = cov;
    out.V = mirror_reflect(cov.V);
    out.first_moments(3) = -cov.first_moments(3);
    return out;
}

Invariants invariants(const Eigen::Matrix4d& V)
{
    return Invariants{V.topLeftCorner<2, 2>().determinant(), V.bottomRightCorner<2, 2>().determinant(),
                      V.topRightCorner<2, 2>().determinant(), V.determinant()};
}

Eigen::Matrix4d StandardForm::matrix() const
{
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    m(0, 0) = m(1, 1) = a;
    m(2, 2) = m(3, 3) = b;
    m(0, 2) = m(2, 0) = c1;
    m(1, 3) = m(3, 1) = c2;
    return m;
}

namespace {

// (det M)^{1/4} M^{-1/2} for symmetric positive definite M; determinant one.
Eigen::Matrix2d williamson_scaling(const Eigen::Matrix2d& m, const char* block)
{
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
    const Eigen::Vector2d w = es.eigenvalues();
    if (!(w(0) > 1e-13 * std::max(1.0, std::abs(w(1))))) {
        throw DegenerateState(std::string("standard_form: block ") + block + " is not positive definite (eigenvalues "
                              + std::to_string(w(0)) + ", " + std::to_string(w(1)) + ")");
    }
    const double scale = std::pow(w(0) * w(1), 0.25);
    const Eigen::Vector2d inv_sqrt = w.cwiseSqrt().cwiseInverse();
    return scale * es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
}

} // namespace

StandardForm standard_form(const Eigen::Matrix4d& V, double f_kA, double f_lB)
{
    const Eigen::Matrix2d A = V.topLeftCorner<2, 2>();
    const Eigen::Matrix2d B = V.bottomRightCorner<2, 2>();
    const Eigen::Matrix2d C = V.topRightCorner<2, 2>();
    const Eigen::Matrix2d SA = williamson_scaling(A, "A");
    const Eigen::Matrix2d SB = williamson_scaling(B, "B");

    Eigen::JacobiSVD<Eigen::Matrix2d> svd(SA * C * SB.transpose(), Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix2d R1 = svd.matrixU();
    Eigen::Matrix2d R2 = svd.matrixV();
    Eigen::Vector2d d = svd.singularValues();
    // Keep both sides proper rotations; the smaller value absorbs the sign.
    if (R1.determinant() < 0) {
        R1.col(1) *= -1.0;
        d(1) = -d(1);
    }
    if (R2.determinant() < 0) {
        R2.col(1) *= -1.0;
        d(1) = -d(1);
    }

    StandardForm sf;
    sf.a = std::sqrt(A.determinant());
    sf.b = std::sqrt(B.determinant());
    sf.c1 = d(0);
    sf.c2 = d(1);
    sf.f_k = f_kA;
    sf.f_l = f_lB;
    sf.S_A = R1.transpose() * SA;
    sf.S_B = R2.transpose() * SB;
    if (sf.b < sf.a) {
        std::swap(sf.a, sf.b);
        std::swap(sf.f_k, sf.f_l);
        sf.parties_swapped = true;
    }
    return sf;
}

namespace {

struct LinearQuadratures {
    std::array<TruncatedOperator, 4> ops;

    const TruncatedOperator& operator[](Quadrature q) const { return ops[static_cast<std::size_t>(q)]; }
};

LinearQuadratures linear_quadratures(const ModeLayout& layout)
{
    auto [qa, pa] = nonlinear_quadratures(layout.mode_a(), 1, layout);
    auto [qb, pb] = nonlinear_quadratures(layout.mode_b(), 1, layout);
    return LinearQuadratures{{std::move(qa), std::move(pa), std::move(qb), std::move(pb)}};
}

double hermitian_expectation(TruncatedOperator op, const QuantumState& state)
{
    op.mark_hermitian();
    return expectation(op, state).real();
}

// Average of <X_s1 ... X_sm> over all orderings of the given factors.
double symmetrized_moment(const std::vector<const TruncatedOperator*>& factors,
                          const std::vector<QuantumState::Component>& parts)
{
    std::vector<int> order(factors.size());
    std::iota(order.begin(), order.end(), 0);
    const std::size_t half = factors.size() / 2;
    cplx total = 0.0;
    int count = 0;
    do {
        for (const auto& [w, phi] : parts) {
            // <phi| X_1 ... X_m |phi> = (X_h ... X_1 phi)^dag (X_{h+1} ... X_m phi)
            StateVector left = phi;
            for (std::size_t i = 0; i < half; ++i) left = factors[static_cast<std::size_t>(order[i])]->matrix() * left;
            StateVector right = phi;
            for (std::size_t i = factors.size(); i-- > half;) {
                right = factors[static_cast<std::size_t>(order[i])]->matrix() * right;
            }
            total += w * left.dot(right);
        }
        ++count;
    } while (std::next_permutation(order.begin(), order.end()));
    return total.real() / count;
}

} // namespace

Eigen::Matrix2d coskewness_block(const QuantumState& state)
{
    const ModeLayout& layout = state.layout();
    if (!layout.has_pump()) throw LayoutMismatch("coskewness_block: needs the three-mode (pump, A, B) layout");
    const LinearQuadratures lq = linear_quadratures(layout);
    const auto& qa = lq[Quadrature::qA];
    const auto& pa = lq[Quadrature::pA];
    const auto& qb = lq[Quadrature::qB];
    const auto& pb = lq[Quadrature::pB];
    const TruncatedOperator qb2 = qb * qb - pb * pb;
    const TruncatedOperator pb2 = qb * pb + pb * qb;
    Eigen::Matrix2d out;
    out(0, 0) = hermitian_expectation(qa * qb2, state);
    out(0, 1) = hermitian_expectation(qa * pb2, state);
    out(1, 0) = hermitian_expectation(pa * qb2, state);
    out(1, 1) = hermitian_expectation(pa * pb2, state);
    return out;
}

double cokurtosis(const QuantumState& state, Quadrature x, Quadrature y, Quadrature z, Quadrature w)
{
    const LinearQuadratures lq = linear_quadratures(state.layout());
    const auto parts = state.decomposition();
    const TruncatedOperator* X = &lq[x];
    const TruncatedOperator* Y = &lq[y];
    const TruncatedOperator* Z = &lq[z];
    const TruncatedOperator* W = &lq[w];
    const auto pair = [&](const TruncatedOperator* u, const TruncatedOperator* v) {
        return symmetrized_moment({u, v}, parts);
    };
    return symmetrized_moment({X, Y, Z, W}, parts) - pair(X, Y) * pair(Z, W) - pair(X, Z) * pair(Y, W)
           - pair(X, W) * pair(Y, Z);
}

} // namespace nlent
