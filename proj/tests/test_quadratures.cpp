#include "nlent/dynamics.hpp"
#include "nlent/errors.hpp"
#include "nlent/quadratures.hpp"

#include <doctest.h>

#include <cmath>

using namespace nlent;

TEST_CASE("f_m table values")
{
    CHECK(f_polynomial(1)(0.0) == doctest::Approx(0.5));
    CHECK(f_polynomial(1)(7.0) == doctest::Approx(0.5));
    CHECK(f_polynomial(2)(0.0) == doctest::Approx(1.0));
    CHECK(f_polynomial(3)(1.0) == doctest::Approx(12.0));
    CHECK(f_polynomial(3).twice_at(1) == 24);
    for (int m = 1; m <= kMaxQuadratureOrder; ++m) CHECK(f_polynomial(m).coefficients.size() == static_cast<std::size_t>(m));
}

TEST_CASE("f_m table matches the exact ladder commutator")
{
    CHECK_NOTHROW(verify_f_table(40));
    for (int m = 1; m <= kMaxQuadratureOrder; ++m) {
        const auto f = f_polynomial(m);
        for (long long n = 0; n <= 25; ++n) CHECK(f.twice_at(n) == ladder_commutator_diagonal(m, n));
    }
    CHECK(ladder_commutator_diagonal(2, 0) == 2);
    CHECK(ladder_commutator_diagonal(1, 5) == 1);
}

TEST_CASE("orders outside the table are refused")
{
    CHECK_THROWS_AS(f_polynomial(10), UnsupportedOrder);
    CHECK_THROWS_AS(f_polynomial(0), UnsupportedOrder);
    CHECK_THROWS_AS(quadrature_set(4, 1, 3, ModeLayout::three_mode(3, 10, 20)), UnsupportedOrder);
}

TEST_CASE("commutator check in quad precision")
{
    for (int m = 1; m <= kMaxQuadratureOrder; ++m) {
        const int dim = 3 * m + 8;
        CHECK(commutator_table_residual(m, dim, Precision::Quad) < 1e-10);
    }
}

TEST_CASE("commutator check in double precision, relative to the largest entry")
{
    for (int m = 1; m <= kMaxQuadratureOrder; ++m) {
        const int dim = 3 * m + 8;
        const double scale = f_polynomial(m)(static_cast<double>(dim - m - 1));
        CHECK(commutator_table_residual(m, dim, Precision::Double) < 1e-13 * scale);
    }
}

TEST_CASE("f_operator diagonal")
{
    const auto layout = ModeLayout::two_mode(4, 3);
    const auto f2 = f_operator(2, 0, layout);
    CHECK(f2.is_hermitian());
    // f_2 = 2N + 1 on mode A, identity on B
    const DenseMatrix d = f2.matrix();
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 3; ++b) {
            const int i = a * 3 + b;
            CHECK(std::abs(d(i, i) - cplx(2.0 * a + 1.0, 0.0)) < 1e-14);
        }
    }
    CHECK(std::abs(d.trace() - cplx(3.0 * (1 + 3 + 5 + 7), 0.0)) < 1e-12);
}

TEST_CASE("<f_1> = 1/2 and <f_m> >= f_m(0)")
{
    const auto layout = ModeLayout::three_mode(5, 6, 7);
    const auto state = QuantumState::product(layout, {coherent_state(0.7, 5), thermal_state(0.4, 6), coherent_state(0.5, 7)});
    CHECK(expectation(f_operator(1, 1, layout), state).real() == doctest::Approx(0.5));
    for (int m = 1; m <= 5; ++m) {
        const double fm = expectation(f_operator(m, 1, layout), state).real();
        CHECK(fm >= f_polynomial(m)(0.0) - 1e-12);
    }
}

TEST_CASE("quadratures reject m >= dim")
{
    CHECK_THROWS_AS(single_mode_quadratures(3, 3), InvalidDimension);
    CHECK_NOTHROW(single_mode_quadratures(4, 3));
}

TEST_CASE("expectation basics")
{
    const auto layout = ModeLayout::two_mode(30, 3);
    const auto state = QuantumState::product(layout, {coherent_state(cplx(1.0, 0.5), 30), fock_state(0, 3)});
    CHECK(std::abs(expectation(TruncatedOperator::identity(layout), state) - 1.0) < 1e-12);
    const auto n = embed(number(30), 0, layout);
    CHECK(expectation(n, state).real() == doctest::Approx(1.25).epsilon(1e-9));
    const auto other = ModeLayout::two_mode(3, 3);
    CHECK_THROWS_AS(expectation(TruncatedOperator::identity(other), state), LayoutMismatch);
}

TEST_CASE("symmetrized covariance on the vacuum")
{
    const auto layout = ModeLayout::three_mode(3, 4, 5);
    const auto vac = QuantumState::product(layout, {fock_state(0, 3), fock_state(0, 4), fock_state(0, 5)});
    auto [q1, p1] = nonlinear_quadratures(1, 1, layout);
    auto [q2, p2] = nonlinear_quadratures(2, 2, layout);
    CHECK(symmetrized_covariance(q1, q2, vac) == doctest::Approx(0.0));
    CHECK(symmetrized_covariance(q1, q1, vac) == doctest::Approx(0.25));
    CHECK(symmetrized_covariance(q2, q2, vac) == doctest::Approx(0.5));
    CHECK(symmetrized_covariance(p2, p2, vac) >= 0.0);
    auto a = embed(annihilation(4), 1, layout);
    CHECK_THROWS_AS(symmetrized_covariance(a, q1, vac), NumericalConsistency);
}

TEST_CASE("parity: a -> -a flips Q^m, P^m by (-1)^m")
{
    const int dim = 9;
    DenseMatrix parity = DenseMatrix::Zero(dim, dim);
    for (int n = 0; n < dim; ++n) parity(n, n) = (n % 2 == 0) ? 1.0 : -1.0;
    for (int m = 1; m <= 4; ++m) {
        auto [q, p] = single_mode_quadratures(dim, m);
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        CHECK((parity * q * parity - sign * q).cwiseAbs().maxCoeff() < 1e-14);
        CHECK((parity * p * parity - sign * p).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("first moments vanish along SPDC trajectories")
{
    const auto layout = ModeLayout::three_mode(12, 9, 17);
    const double alpha_p = 1.5;
    const auto h = build_hamiltonian({1, 2, 1.0, layout});
    EvolutionConfig cfg;
    cfg.xi_grid = uniform_xi_grid(1.0, 0.25);
    cfg.alpha_p = alpha_p;
    const auto initial = QuantumState::product(layout, {coherent_state(alpha_p, 12), fock_state(0, 9), fock_state(0, 17)});
    const auto traj = evolve(initial, h, cfg);
    for (int n = 1; n <= 3; ++n) {
        const auto ops = quadrature_set(n, 1, 2, layout);
        const auto r = ops.vector();
        for (const auto& p : traj.points) {
            const Moments mo = moments({r.begin(), r.end()}, p.state);
            CHECK(mo.mean.cwiseAbs().maxCoeff() < 1e-8);
        }
    }
}

TEST_CASE("moments agree between pure and density-matrix paths")
{
    const auto layout = ModeLayout::three_mode(3, 5, 6);
    const auto pure = QuantumState::product(layout, {coherent_state(0.3, 3), coherent_state(cplx(0.4, 0.2), 5), coherent_state(0.3, 6)});
    const auto mixed = QuantumState::mixed(layout, pure.density_matrix());
    const auto ops = quadrature_set(1, 1, 2, layout);
    const auto r = ops.vector();
    const Moments a = moments({r.begin(), r.end()}, pure);
    const Moments b = moments({r.begin(), r.end()}, mixed);
    CHECK((a.mean - b.mean).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((a.second - b.second).cwiseAbs().maxCoeff() < 1e-12);
}
