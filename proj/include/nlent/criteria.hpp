// criteria.hpp: separability conditions on higher-order covariance matrices
//
// All matrix conditions use the state expectation <Omega> =
// diag(adiag(f_kA, -f_kA), adiag(f_lB, -f_lB)) in place of the operator-valued
// commutator matrix. The invariant inequalities are written with
// det J -> f^2/4, the scale at which they coincide with det(V + i<Omega>/2).

#pragma once

#include "nlent/covariance.hpp"
#include "nlent/fock.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>

namespace nlent {

enum class Verdict { Entangled, Separable, Boundary };

constexpr double kVerdictBand = 1e-9;

const char* to_string(Verdict v);
// Entangled below -band, Boundary within +-band, Separable above.
Verdict classify(double value, double band = kVerdictBand);

// V + (i/2)<Omega>
Eigen::Matrix4cd uncertainty_matrix(const Eigen::Matrix4d& V, double f_kA, double f_lB);

// Minimum eigenvalue of V + (i/2)<Omega>; >= 0 for physical states.
double uncertainty_margin(const HigherOrderCovariance& cov);

// det A det B + (alpha beta - det C)^2 - tr(A J C J B J C^T J) - beta^2 det A - alpha^2 det B
// with alpha = f_kA/2, beta = f_lB/2, J = adiag(1, -1). Equals det(V + i<Omega>/2).
double inequality7_margin(const HigherOrderCovariance& cov);
// Same with |det C|; negative exactly when the partial transpose is unphysical.
double inequality8_margin(const HigherOrderCovariance& cov);

// Minimum eigenvalue of mirror_reflect(V) + (i/2)<Omega>.
double witness_nu_minus(const HigherOrderCovariance& cov);

// det(V - F/2), F = diag(f_kA, f_kA, f_lB, f_lB).
double lemma1_check(const Eigen::Matrix4d& V, double f_kA, double f_lB);
inline double lemma1_check(const HigherOrderCovariance& cov) { return lemma1_check(cov.V, cov.f_kA, cov.f_lB); }

// Local scaling diag(x th_k, 1/(x th_k), th_l/x, x/th_l), th_k = y1/f_k,
// th_l = y2/f_l, applied to a det C > 0 standard form, followed by separate
// diagonalization of the Q-Q and P-P blocks. Targets: lambda_minus = f_k/2
// (Q block) and lambda_prime_minus = f_l/2 (P block).
//
// Literal: the targets as stated, in the units of V.
// Normalized: the same construction after rescaling each party by 1/sqrt(f),
// where the commutators of both parties coincide and the targets become 1/2.
enum class Lemma2Frame { Literal, Normalized };

struct Lemma2Result {
    double lambda_plus = 0.0;
    double lambda_minus = 0.0;
    double lambda_prime_plus = 0.0;
    double lambda_prime_minus = 0.0;
    double x = 1.0;
    double y1 = 1.0;
    double y2 = 1.0;
    double target_k = 0.0;  // f_k/2, or 1/2 in the normalized frame
    double target_l = 0.0;
    bool closed_form_ok = false;
    bool used_fallback = false;
    bool success = false;     // both targets met within 1e-6
    double residual = 0.0;    // |lambda_minus - target_k| + |lambda_prime_minus - target_l|
    // max over local scalings of lambda_minus * lambda_prime_minus relative
    // to target_k * target_l; below one the targets cannot be met.
    double reachable_ratio = 0.0;
    Eigen::Matrix4d transformed = Eigen::Matrix4d::Zero();  // diag(l+, l-, l'+, l'-)
    Eigen::Vector4d f_diag = Eigen::Vector4d::Zero();       // F for lemma1 on `transformed`
};

// Requires c1 >= c2 > 0 (det C > 0); throws DegenerateState otherwise.
Lemma2Result lemma2_transform(const StandardForm& sf, Lemma2Frame frame = Lemma2Frame::Literal);

// det C = 0 case (c2 = 0): scaling diag(sqrt(2a/f_k), sqrt(f_k/2a), sqrt(2b/f_l),
// sqrt(f_l/2b)) applied to the standard form.
Eigen::Matrix4d lemma2_zero_det_c(const StandardForm& sf);

// Nha-Zubairy comparator on the (pump, A, B) layout:
//   Var(L1) Var(L2) - <N_B + 3/4>^2 - SymCov(L1, L2)^2,
//   L1 = Q^1_A - Q^2_B, L2 = P^1_A + P^2_B.
double nha_zubairy(const QuantumState& state);

struct WitnessReport {
    int n = 1;
    int k = 1;
    int l = 1;
    double nu_minus = 0.0;
    double ineq7_margin = 0.0;
    double ineq8_margin = 0.0;
    double lemma1_value = 0.0;
    double detC = 0.0;
    double uncertainty = 0.0;
    std::optional<double> nz;
    Verdict verdict = Verdict::Boundary;  // from nu_minus
    // nu_minus and ineq8_margin agree on entangled vs not (outside the band).
    bool consistent = true;
};

WitnessReport evaluate(const HigherOrderCovariance& cov, std::optional<double> nz = std::nullopt);

} // namespace nlent
