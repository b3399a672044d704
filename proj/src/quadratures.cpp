// quadratures.cpp: nonlinear quadratures, f_m table, moments

#include "nlent/quadratures.hpp"

#include "nlent/errors.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

namespace nlent {

namespace {

// Rows of [Q^m, P^m] = i f_m(N), ascending powers of N.
const std::array<std::vector<Rational>, kMaxQuadratureOrder>& f_table()
{
    static const std::array<std::vector<Rational>, kMaxQuadratureOrder> table = {{
        {{1, 2}},
        {{1, 1}, {2, 1}},
        {{3, 1}, {9, 2}, {9, 2}},
        {{12, 1}, {28, 1}, {12, 1}, {8, 1}},
        {{60, 1}, {125, 1}, {275, 2}, {25, 1}, {25, 2}},
        {{360, 1}, {942, 1}, {675, 1}, {480, 1}, {45, 1}, {18, 1}},
        {{2520, 1}, {6174, 1}, {7448, 1}, {5145, 2}, {2695, 2}, {147, 2}, {49, 2}},
        {{20160, 1}, {57312, 1}, {52528, 1}, {40208, 1}, {7840, 1}, {3248, 1}, {112, 1}, {32, 1}},
        {{181440, 1}, {493128, 1}, {641142, 1}, {302778, 1}, {336609, 2}, {20412, 1}, {6993, 1}, {162, 1}, {81, 2}},
    }};
    return table;
}

void require_order(int m)
{
    if (m < 1 || m > kMaxQuadratureOrder) {
        throw UnsupportedOrder("quadrature order m = " + std::to_string(m) + " outside the tabulated range 1..9");
    }
}

std::once_flag table_checked;

template <class T>
double commutator_residual_impl(int m, int dim, const FPolynomial& f)
{
    using std::abs;
    using std::sqrt;
    const auto idx = [dim](int r, int c) { return static_cast<std::size_t>(r) * static_cast<std::size_t>(dim) + static_cast<std::size_t>(c); };
    const std::size_t n2 = static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim);

    // A = a^m (real), Q = (A + A^T) / 2, K = (A^T - A) / 2 with P = i K,
    // so [Q, P] = i (Q K - K Q).
    std::vector<T> a(n2, T(0));
    for (int n = 0; n + m < dim; ++n) {
        T prod(1);
        for (int j = 1; j <= m; ++j) prod *= T(n + j);
        a[idx(n, n + m)] = sqrt(prod);
    }
    std::vector<T> q(n2), k(n2);
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
            q[idx(r, c)] = (a[idx(r, c)] + a[idx(c, r)]) / 2;
            k[idx(r, c)] = (a[idx(c, r)] - a[idx(r, c)]) / 2;
        }
    }
    const int safe = dim - m - 1;
    T worst(0);
    for (int r = 0; r <= safe; ++r) {
        for (int c = 0; c <= safe; ++c) {
            T qk(0), kq(0);
            for (int s = 0; s < dim; ++s) {
                qk += q[idx(r, s)] * k[idx(s, c)];
                kq += k[idx(r, s)] * q[idx(s, c)];
            }
            T expected(0);
            if (r == c) expected = T(f.twice_at(r)) / 2;
            worst = std::max<T>(worst, abs(qk - kq - expected));
        }
    }
    return static_cast<double>(worst);
}

} // namespace

double FPolynomial::operator()(double n) const
{
    double acc = 0.0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * n + it->value();
    return acc;
}

long long FPolynomial::twice_at(long long n) const
{
    long long acc = 0;
    long long power = 1;
    for (const auto& c : coefficients) {
        acc += c.num * (2 / c.den) * power;
        power *= n;
    }
    return acc;
}

long long ladder_commutator_diagonal(int m, long long n)
{
    long long rising = 1;
    long long falling = 1;
    for (int j = 0; j < m; ++j) {
        rising *= n + 1 + j;
        falling *= n - j;
    }
    if (n < m) falling = 0;
    return rising - falling;
}

void verify_f_table(int n_max)
{
    const auto& table = f_table();
    for (int m = 1; m <= kMaxQuadratureOrder; ++m) {
        const FPolynomial f{m, table[static_cast<std::size_t>(m - 1)]};
        for (long long n = 0; n <= n_max; ++n) {
            const long long expected = ladder_commutator_diagonal(m, n);
            const long long got = f.twice_at(n);
            if (got != expected) {
                throw NumericalConsistency("f_" + std::to_string(m) + " table row disagrees with [a^m, a^dag^m] at N = "
                                           + std::to_string(n) + ": 2 f = " + std::to_string(got)
                                           + ", commutator gives " + std::to_string(expected));
            }
        }
    }
}

FPolynomial f_polynomial(int m)
{
    require_order(m);
    std::call_once(table_checked, [] { verify_f_table(); });
    return FPolynomial{m, f_table()[static_cast<std::size_t>(m - 1)]};
}

double commutator_table_residual(int m, int dim, Precision precision)
{
    const FPolynomial f = f_polynomial(m);
    if (dim < m + 2) throw InvalidDimension("commutator_table_residual: dim must exceed m + 1");
    if (precision == Precision::Quad) {
        return commutator_residual_impl<boost::multiprecision::cpp_bin_float_quad>(m, dim, f);
    }
    return commutator_residual_impl<double>(m, dim, f);
}

std::pair<DenseMatrix, DenseMatrix> single_mode_quadratures(int dim, int m)
{
    if (m < 1) throw InvalidDimension("single_mode_quadratures: m must be >= 1");
    if (m >= dim) {
        throw InvalidDimension("single_mode_quadratures: power " + std::to_string(m) + " needs dim > m, got "
                               + std::to_string(dim));
    }
    DenseMatrix a = DenseMatrix::Zero(dim, dim);
    for (int n = 0; n + m < dim; ++n) {
        double prod = 1.0;
        for (int j = 1; j <= m; ++j) prod *= static_cast<double>(n + j);
        a(n, n + m) = std::sqrt(prod);
    }
    DenseMatrix q = (a + a.adjoint()) * 0.5;
    DenseMatrix p = (a.adjoint() - a) * cplx(0.0, 0.5);
    return {std::move(q), std::move(p)};
}

std::pair<TruncatedOperator, TruncatedOperator> nonlinear_quadratures(int mode, int m, const ModeLayout& layout)
{
    auto [q, p] = single_mode_quadratures(layout.dim(mode), m);
    auto q_op = embed(q, mode, layout);
    auto p_op = embed(p, mode, layout);
    q_op.mark_hermitian();
    p_op.mark_hermitian();
    return {std::move(q_op), std::move(p_op)};
}

TruncatedOperator f_operator(int m, int mode, const ModeLayout& layout)
{
    const FPolynomial f = f_polynomial(m);
    const int d = layout.dim(mode);
    DenseMatrix diag = DenseMatrix::Zero(d, d);
    for (int n = 0; n < d; ++n) diag(n, n) = f(static_cast<double>(n));
    auto op = embed(diag, mode, layout);
    op.mark_hermitian();
    return op;
}

namespace {

cplx trace_product(const SparseMatrix& op, const DenseMatrix& rho)
{
    cplx acc = 0.0;
    for (int r = 0; r < op.outerSize(); ++r) {
        for (SparseMatrix::InnerIterator it(op, r); it; ++it) acc += it.value() * rho(it.col(), it.row());
    }
    return acc;
}

void require_layout(const TruncatedOperator& op, const QuantumState& state, const char* who)
{
    if (!(op.layout() == state.layout())) throw LayoutMismatch(std::string(who) + ": operator and state layouts differ");
}

void check_real(cplx value, const char* who)
{
    if (std::abs(value.imag()) >= 1e-10 * std::max(1.0, std::abs(value))) {
        throw NumericalConsistency(std::string(who) + ": imaginary residue " + std::to_string(value.imag())
                                   + " on a Hermitian expectation");
    }
}

} // namespace

cplx expectation(const TruncatedOperator& op, const QuantumState& state)
{
    require_layout(op, state, "expectation");
    cplx value;
    if (state.is_pure()) {
        const auto& psi = state.vector();
        value = psi.dot(op.matrix() * psi);
    } else if (state.has_components()) {
        value = 0.0;
        for (const auto& [w, phi] : state.decomposition()) value += w * phi.dot(op.matrix() * phi);
    } else {
        value = trace_product(op.matrix(), state.density());
    }
    if (op.is_hermitian()) check_real(value, "expectation");
    return value;
}

double symmetrized_covariance(const TruncatedOperator& x, const TruncatedOperator& y, const QuantumState& state)
{
    if (!x.is_hermitian() || !y.is_hermitian()) {
        throw NumericalConsistency("symmetrized_covariance: operators must be Hermitian");
    }
    const TruncatedOperator xy = x * y;
    const TruncatedOperator yx = y * x;
    const cplx anti = (expectation(xy, state) + expectation(yx, state)) * 0.5;
    check_real(anti, "symmetrized_covariance");
    const double mx = expectation(x, state).real();
    const double my = expectation(y, state).real();
    return anti.real() - mx * my;
}

QuadratureSet quadrature_set(int n, int k, int l, const ModeLayout& layout)
{
    if (n < 1 || k < 1 || l < 1) throw InvalidDimension("quadrature_set: n, k, l must be >= 1");
    const int ma = n * k;
    const int mb = n * l;
    require_order(ma);
    require_order(mb);
    auto [qa, pa] = nonlinear_quadratures(layout.mode_a(), ma, layout);
    auto [qb, pb] = nonlinear_quadratures(layout.mode_b(), mb, layout);
    return QuadratureSet{n, k, l, std::move(qa), std::move(pa), std::move(qb), std::move(pb),
                         f_operator(ma, layout.mode_a(), layout), f_operator(mb, layout.mode_b(), layout)};
}

Moments moments(const std::vector<const TruncatedOperator*>& ops, const QuantumState& state)
{
    const auto count = static_cast<Eigen::Index>(ops.size());
    Moments out{Eigen::VectorXd(count), Eigen::MatrixXcd(count, count)};
    for (const auto* op : ops) {
        require_layout(*op, state, "moments");
        if (!op->is_hermitian()) throw NumericalConsistency("moments: operators must be Hermitian");
    }
    if (state.is_pure() || state.has_components()) {
        // <R_i R_j> = sum_w w (R_i phi)^dag (R_j phi) for Hermitian R_i
        Eigen::VectorXcd mean = Eigen::VectorXcd::Zero(count);
        out.second.setZero();
        std::vector<StateVector> images(ops.size());
        for (const auto& [w, phi] : state.decomposition()) {
            for (std::size_t i = 0; i < ops.size(); ++i) images[i] = ops[i]->matrix() * phi;
            for (Eigen::Index i = 0; i < count; ++i) {
                mean(i) += w * phi.dot(images[static_cast<std::size_t>(i)]);
                for (Eigen::Index j = 0; j < count; ++j) {
                    out.second(i, j) += w * images[static_cast<std::size_t>(i)].dot(images[static_cast<std::size_t>(j)]);
                }
            }
        }
        for (Eigen::Index i = 0; i < count; ++i) {
            check_real(mean(i), "moments");
            out.mean(i) = mean(i).real();
        }
        return out;
    }
    const auto& rho = state.density();
    std::vector<DenseMatrix> images;
    images.reserve(ops.size());
    for (const auto* op : ops) images.push_back(op->matrix() * rho);
    for (Eigen::Index i = 0; i < count; ++i) {
        const cplx m = images[static_cast<std::size_t>(i)].trace();
        check_real(m, "moments");
        out.mean(i) = m.real();
        for (Eigen::Index j = 0; j < count; ++j) {
            out.second(i, j) = trace_product(ops[static_cast<std::size_t>(i)]->matrix(), images[static_cast<std::size_t>(j)]);
        }
    }
    return out;
}

} // namespace nlent
