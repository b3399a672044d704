// covariance.hpp: higher-order covariance matrices V^{kl}, invariants,
// standard form, mirror reflection, coskewness and cokurtosis
//
// V is ordered (Q_A, P_A, Q_B, P_B) and split as [[A, C], [C^T, B]].

#pragma once

#include "nlent/fock.hpp"
#include "nlent/quadratures.hpp"

#include <Eigen/Dense>

namespace nlent {

struct HigherOrderCovariance {
    Eigen::Matrix4d V = Eigen::Matrix4d::Zero();
    double f_kA = 0.0;  // <f_{nk}(N_A)>
    double f_lB = 0.0;  // <f_{nl}(N_B)>
    Eigen::Vector4d first_moments = Eigen::Vector4d::Zero();
    int n = 1;
    int k = 1;
    int l = 1;

    Eigen::Matrix2d A() const { return V.topLeftCorner<2, 2>(); }
    Eigen::Matrix2d B() const { return V.bottomRightCorner<2, 2>(); }
    Eigen::Matrix2d C() const { return V.topRightCorner<2, 2>(); }
    // F = diag(f_kA, f_kA, f_lB, f_lB)
    Eigen::Matrix4d F() const;
};

// Symmetrized covariance of (Q^{nk}_A, P^{nk}_A, Q^{nl}_B, P^{nl}_B).
HigherOrderCovariance build_covariance(const QuantumState& state, int n, int k, int l);
// Same, with operators built once and reused across many states.
HigherOrderCovariance build_covariance(const QuantumState& state, const QuadratureSet& ops);

// Lambda V Lambda with Lambda = diag(1, 1, 1, -1).
HigherOrderCovariance mirror_reflect(const HigherOrderCovariance& cov);
Eigen::Matrix4d mirror_reflect(const Eigen::Matrix4d& V);

struct Invariants {
    double I1 = 0.0;  // det A
    double I2 = 0.0;  // det B
    double I3 = 0.0;  // det C
    double I4 = 0.0;  // det V
};

Invariants invariants(const Eigen::Matrix4d& V);
inline Invariants invariants(const HigherOrderCovariance& cov) { return invariants(cov.V); }

struct StandardForm {
    double a = 0.0;
    double b = 0.0;
    double c1 = 0.0;  // c1 >= |c2|
    double c2 = 0.0;  // carries sign(det C)
    double f_k = 0.0;  // f attached to the party holding a
    double f_l = 0.0;
    // Local maps with S_A A S_A^T = a I, S_B B S_B^T = b I, S_A C S_B^T = diag(c1, c2),
    // expressed on the original parties (before any swap).
    Eigen::Matrix2d S_A = Eigen::Matrix2d::Identity();
    Eigen::Matrix2d S_B = Eigen::Matrix2d::Identity();
    // Set when the parties were exchanged to arrange b >= a.
    bool parties_swapped = false;

    // diag(a, a, b, b) with c1, c2 on the Q-Q and P-P couplings.
    Eigen::Matrix4d matrix() const;
};

// Throws DegenerateState unless A and B are positive definite.
StandardForm standard_form(const Eigen::Matrix4d& V, double f_kA, double f_lB);
inline StandardForm standard_form(const HigherOrderCovariance& cov) { return standard_form(cov.V, cov.f_kA, cov.f_lB); }

// Linear quadratures q = (a + a^dag)/2, p = i(a^dag - a)/2 of either party.
enum class Quadrature { qA, pA, qB, pB };

// Third-order block of V^{12} written through linear quadratures:
//   [[<q_A (q_B^2 - p_B^2)>, <q_A (q_B p_B + p_B q_B)>],
//    [<p_A (q_B^2 - p_B^2)>, <p_A (q_B p_B + p_B q_B)>]]
// Requires a layout with a pump mode.
Eigen::Matrix2d coskewness_block(const QuantumState& state);

// <XYZW> - <XY><ZW> - <XZ><YW> - <XW><YZ> with every product averaged over all
// orderings of its factors.
double cokurtosis(const QuantumState& state, Quadrature x, Quadrature y, Quadrature z, Quadrature w);

} // namespace nlent
