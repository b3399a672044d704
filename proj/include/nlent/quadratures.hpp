// quadratures.hpp: nonlinear quadratures Q^m, P^m, commutator polynomials f_m
// and moment evaluation against states
//
//   Q^m = (a^m + a^dag^m) / 2,   P^m = i (a^dag^m - a^m) / 2,
//   [Q^m, P^m] = i f_m(N).
//
// f_m is tabulated for m = 1..9 only; higher orders are refused.

#pragma once

#include "nlent/fock.hpp"

#include <Eigen/Dense>

#include <array>
#include <utility>
#include <vector>

namespace nlent {

constexpr int kMaxQuadratureOrder = 9;

struct Rational {
    long long num = 0;
    long long den = 1;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct FPolynomial {
    int order = 1;
    std::vector<Rational> coefficients;  // ascending powers of N

    double operator()(double n) const;
    // Exact value at integer N as a rational with the common denominator 2.
    long long twice_at(long long n) const;
};

// Throws UnsupportedOrder outside 1..9. The first call cross-checks the whole
// table against the exact ladder commutator and throws NumericalConsistency
// on any mismatch.
FPolynomial f_polynomial(int m);

// <n| [a^m, a^dag^m] |n> = (n+1)...(n+m) - n(n-1)...(n-m+1), exact.
long long ladder_commutator_diagonal(int m, long long n);

// Compares the tabulated polynomials with ladder_commutator_diagonal for
// N = 0..n_max; throws NumericalConsistency naming the first bad order.
void verify_f_table(int n_max = 40);

enum class Precision { Double, Quad };

// max |[Q^m, P^m] - i f_m(N)| on the truncation-safe block (Fock indices
// <= dim - m - 1) of a single mode, with matrices built and multiplied in
// the requested precision.
double commutator_table_residual(int m, int dim, Precision precision);

// Single-mode (Q^m, P^m); m >= dim is rejected.
std::pair<DenseMatrix, DenseMatrix> single_mode_quadratures(int dim, int m);

std::pair<TruncatedOperator, TruncatedOperator> nonlinear_quadratures(int mode, int m, const ModeLayout& layout);

// f_m evaluated on the number operator of `mode`; diagonal.
TruncatedOperator f_operator(int m, int mode, const ModeLayout& layout);

// tr(op rho) or <psi|op|psi>. For Hermitian op the imaginary part must stay
// below 1e-10 relative to max(1, |value|), else NumericalConsistency.
cplx expectation(const TruncatedOperator& op, const QuantumState& state);

// <{dX, dY}> / 2 for Hermitian X, Y.
double symmetrized_covariance(const TruncatedOperator& x, const TruncatedOperator& y, const QuantumState& state);

// R = (Q^{nk}_A, P^{nk}_A, Q^{nl}_B, P^{nl}_B) and the f-operators of Omega.
struct QuadratureSet {
    int n = 1;
    int k = 1;
    int l = 1;
    TruncatedOperator q_a, p_a, q_b, p_b;
    TruncatedOperator f_a, f_b;

    std::array<const TruncatedOperator*, 4> vector() const { return {&q_a, &p_a, &q_b, &p_b}; }
};

QuadratureSet quadrature_set(int n, int k, int l, const ModeLayout& layout);

// First and second moments of a list of Hermitian operators:
// mean_i = <R_i>, second_ij = <R_i R_j>.
struct Moments {
    Eigen::VectorXd mean;
    Eigen::MatrixXcd second;
};

Moments moments(const std::vector<const TruncatedOperator*>& ops, const QuantumState& state);

} // namespace nlent
