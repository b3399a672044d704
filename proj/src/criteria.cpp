// criteria.cpp: uncertainty relations, invariant inequalities, witness,
// constructive separability checks and the Nha-Zubairy comparator

#include "nlent/criteria.hpp"

#include "nlent/errors.hpp"
#include "nlent/quadratures.hpp"

#include <Eigen/Eigenvalues>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace nlent {

const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::Entangled: return "entangled";
    case Verdict::Separable: return "separable";
    case Verdict::Boundary: return "boundary";
    }
    return "boundary";
}

Verdict classify(double value, double band)
{
    if (value < -band) return Verdict::Entangled;
    if (value > band) return Verdict::Separable;
    return Verdict::Boundary;
}

Eigen::Matrix4cd uncertainty_matrix(const Eigen::Matrix4d& V, double f_kA, double f_lB)
{
    Eigen::Matrix4cd s = V.cast<cplx>();
    const cplx half_i(0.0, 0.5);
    s(0, 1) += half_i * f_kA;
    s(1, 0) -= half_i * f_kA;
    s(2, 3) += half_i * f_lB;
    s(3, 2) -= half_i * f_lB;
    return s;
}

namespace {

double min_eigenvalue(const Eigen::Matrix4cd& m)
{
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

// The margin is a difference of quartic terms that cancel exactly on saturating
// states (vacuum at order 9 reaches ~1e19), so it is formed in quad precision.
using Quad = boost::multiprecision::cpp_bin_float_quad;
using Quad2 = std::array<std::array<Quad, 2>, 2>;

Quad2 to_quad(const Eigen::Matrix2d& m)
{
    return {{{Quad(m(0, 0)), Quad(m(0, 1))}, {Quad(m(1, 0)), Quad(m(1, 1))}}};
}

Quad2 mul(const Quad2& x, const Quad2& y)
{
    Quad2 out;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) out[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
    }
    return out;
}

Quad det(const Quad2& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

double invariant_margin(const HigherOrderCovariance& cov, bool absolute_det_c)
{
    const Quad2 A = to_quad(cov.A());
    const Quad2 B = to_quad(cov.B());
    const Quad2 C = to_quad(cov.C());
    const Quad2 Ct = {{{C[0][0], C[1][0]}, {C[0][1], C[1][1]}}};
    const Quad2 J = {{{Quad(0), Quad(1)}, {Quad(-1), Quad(0)}}};
    const Quad alpha = Quad(cov.f_kA) / 2;
    const Quad beta = Quad(cov.f_lB) / 2;
    const Quad det_a = det(A);
    const Quad det_b = det(B);
    const Quad det_c = absolute_det_c ? abs(det(C)) : det(C);
    const Quad2 t = mul(mul(mul(mul(mul(mul(mul(A, J), C), J), B), J), Ct), J);
    const Quad twist = t[0][0] + t[1][1];
    const Quad gap = alpha * beta - det_c;
    const Quad margin = det_a * det_b + gap * gap - twist - beta * beta * det_a - alpha * alpha * det_b;
    return static_cast<double>(margin);
}

} // namespace

double uncertainty_margin(const HigherOrderCovariance& cov)
{
    return min_eigenvalue(uncertainty_matrix(cov.V, cov.f_kA, cov.f_lB));
}

double inequality7_margin(const HigherOrderCovariance& cov) { return invariant_margin(cov, false); }

double inequality8_margin(const HigherOrderCovariance& cov) { return invariant_margin(cov, true); }

double witness_nu_minus(const HigherOrderCovariance& cov)
{
    return min_eigenvalue(uncertainty_matrix(mirror_reflect(cov.V), cov.f_kA, cov.f_lB));
}

double lemma1_check(const Eigen::Matrix4d& V, double f_kA, double f_lB)
{
    const Eigen::Vector4d half_f(f_kA / 2.0, f_kA / 2.0, f_lB / 2.0, f_lB / 2.0);
    return (V - Eigen::Matrix4d(half_f.asDiagonal())).determinant();
}

namespace {

// Eigenvalues (larger, smaller) of [[p, r], [r, q]]; the smaller one through
// det / larger to avoid cancellation.
std::pair<double, double> eig2(double p, double q, double r)
{
    const double mean = 0.5 * (p + q);
    const double half_gap = std::sqrt(0.25 * (p - q) * (p - q) + r * r);
    const double hi = mean + half_gap;
    const double lo = hi > 0.0 ? (p * q - r * r) / hi : mean - half_gap;
    return {hi, lo};
}

struct Lemma2Frame4 {
    double a, b, c1, c2, fk, fl;
};

struct Lambdas {
    double plus, minus, prime_plus, prime_minus;
};

// Eigenvalues of the Q-Q and P-P blocks after the scaling u = x th_k, v = th_l / x.
Lambdas lambdas_uv(const Lemma2Frame4& s, double u, double v)
{
    const auto [qp, qm] = eig2(s.a * u * u, s.b * v * v, s.c1 * u * v);
    const auto [pp, pm] = eig2(s.a / (u * u), s.b / (v * v), s.c2 / (u * v));
    return {qp, qm, pp, pm};
}

Lambdas lambdas_xy(const Lemma2Frame4& s, double x, double y1, double y2)
{
    const double th_k = y1 / s.fk;
    const double th_l = y2 / s.fl;
    return lambdas_uv(s, x * th_k, th_l / x);
}

struct ClosedForm {
    double x, y1, y2;
};

ClosedForm closed_form_scalings(const Lemma2Frame4& s)
{
    const double a = s.a, b = s.b, c1 = s.c1, c2 = s.c2, fk = s.fk, fl = s.fl;
    const double th_k = 1.0 / fk;
    const double th_l = 1.0 / fl;
    const double x = std::pow(a * c1 + b * c2, 0.25) * std::sqrt(th_l) / (std::pow(b * c1 + a * c2, 0.25) * std::sqrt(th_k));
    const double x2 = x * x;
    const double x4 = x2 * x2;
    const double fk2 = fk * fk, fl2 = fl * fl;
    const double m1 = 2.0 * (8.0 * a * b * b * fl * x4 - 8.0 * b * c1 * c1 * fl * x4 - 2.0 * a * fk * fl2 * x4);
    const double m2 = -16.0 * a * a * b * b * fk2 * x2 + 16.0 * a * b * c1 * c1 * fk2 * x2 + 16.0 * a * b * c2 * c2 * fk2 * x2
                      - 16.0 * c1 * c1 * c2 * c2 * fk2 * x2 + 4.0 * a * a * fk2 * fk * fl * x2
                      - 4.0 * b * b * fk2 * fk * fl * x2 + fk2 * fk2 * fl2 * x2;
    const double m3 = m2 * m2
                      - 2.0 * (8.0 * a * b * b * std::pow(fk, 5) - 8.0 * b * c2 * c2 * std::pow(fk, 5) - 2.0 * a * std::pow(fk, 6) * fl) * m1;
    const double m4 = 2.0 * (8.0 * a * a * b - 8.0 * a * c1 * c1 - 2.0 * b * fk * fl);
    const double m5_inner = -16.0 * a * a * b * b * fl * x2 + 16.0 * a * b * c1 * c1 * fl * x2 + 16.0 * a * b * c2 * c2 * fl * x2
                            - 16.0 * c1 * c1 * c2 * c2 * fl * x2 - 4.0 * a * a * fk * fl2 * x2 + 4.0 * b * b * fk * fl2 * x2
                            + fk2 * fl2 * fl * x2;
    const double m5 = m5_inner * m5_inner;
    const double m6 = m5 * m5
                      - 2.0 * (8.0 * a * a * b * fk * fl2 * fl * x4 - 8.0 * a * c2 * c2 * fk * fl2 * fl * x4
                               - 2.0 * b * fk2 * fl2 * fl2 * x4) * m4;
    const double y1 = std::sqrt(m2 / m1 + std::sqrt(m3) / m1);
    const double y2 = std::sqrt(m5 / m4 + std::sqrt(m6) / m4);
    return {x, y1, y2};
}

double golden_max(const std::function<double(double)>& h, double lo, double hi)
{
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - g * (hi - lo);
    double x2 = lo + g * (hi - lo);
    double h1 = h(x1), h2 = h(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(lo)); ++it) {
        if (h1 < h2) {
            lo = x1;
            x1 = x2;
            h1 = h2;
            x2 = lo + g * (hi - lo);
            h2 = h(x2);
        } else {
            hi = x2;
            x2 = x1;
            h2 = h1;
            x1 = hi - g * (hi - lo);
            h1 = h(x1);
        }
    }
    return 0.5 * (lo + hi);
}

void fill(Lemma2Result& r, const Lambdas& lam)
{
    r.lambda_plus = lam.plus;
    r.lambda_minus = lam.minus;
    r.lambda_prime_plus = lam.prime_plus;
    r.lambda_prime_minus = lam.prime_minus;
    r.residual = std::abs(lam.minus - r.target_k) + std::abs(lam.prime_minus - r.target_l);
    r.transformed = Eigen::Vector4d(lam.plus, lam.minus, lam.prime_plus, lam.prime_minus).asDiagonal();
}

constexpr double kLemma2Tolerance = 1e-6;

} // namespace

Lemma2Result lemma2_transform(const StandardForm& sf, Lemma2Frame frame)
{
    if (!(sf.c2 > 0.0) || sf.c1 < sf.c2) {
        throw DegenerateState("lemma2_transform: needs c1 >= c2 > 0 (det C > 0), got c1 = " + std::to_string(sf.c1)
                              + ", c2 = " + std::to_string(sf.c2));
    }
    if (!(sf.f_k > 0.0) || !(sf.f_l > 0.0)) throw DegenerateState("lemma2_transform: f values must be positive");

    Lemma2Frame4 s{sf.a, sf.b, sf.c1, sf.c2, sf.f_k, sf.f_l};
    if (frame == Lemma2Frame::Normalized) {
        const double g = std::sqrt(sf.f_k * sf.f_l);
        s = Lemma2Frame4{sf.a / sf.f_k, sf.b / sf.f_l, sf.c1 / g, sf.c2 / g, 1.0, 1.0};
    }

    Lemma2Result r;
    r.target_k = s.fk / 2.0;
    r.target_l = s.fl / 2.0;
    r.f_diag = Eigen::Vector4d(s.fk, s.fk, s.fl, s.fl);

    const double target = r.target_k * r.target_l;
    const auto q_of = [&](double tau) { return lambdas_uv(s, std::exp(tau), std::exp(-tau)).minus; };
    const auto p_of = [&](double tau) { return lambdas_uv(s, std::exp(tau), std::exp(-tau)).prime_minus; };
    const std::function<double(double)> h = [&](double tau) { return q_of(tau) * p_of(tau); };

    // Scan the scaling ratio for the best achievable product lambda_- lambda'_-.
    const double span = 12.0;
    const int steps = 2400;
    double best_tau = -span;
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= steps; ++i) {
        const double tau = -span + 2.0 * span * i / steps;
        const double v = h(tau);
        if (v > best) {
            best = v;
            best_tau = tau;
        }
    }
    const double step = 2.0 * span / steps;
    best_tau = golden_max(h, best_tau - step, best_tau + step);
    best = h(best_tau);
    r.reachable_ratio = best / target;

    const ClosedForm cf = closed_form_scalings(s);
    if (std::isfinite(cf.x) && std::isfinite(cf.y1) && std::isfinite(cf.y2) && cf.x > 0 && cf.y1 > 0 && cf.y2 > 0) {
        const Lambdas lam = lambdas_xy(s, cf.x, cf.y1, cf.y2);
        const double res = std::abs(lam.minus - r.target_k) + std::abs(lam.prime_minus - r.target_l);
        if (std::isfinite(res) && res <= kLemma2Tolerance) {
            r.x = cf.x;
            r.y1 = cf.y1;
            r.y2 = cf.y2;
            r.closed_form_ok = true;
            r.success = true;
            fill(r, lam);
            return r;
        }
    }

    // Only u = x y1/f_k and v = y2/(f_l x) enter; with u = s e^tau, v = s e^-tau
    // lambda_- = s^2 q(tau) and lambda'_- = p(tau)/s^2, so tau solves q p = target
    // and s fixes lambda_- on its target.
    r.used_fallback = true;
    double tau = best_tau;
    if (best >= target) {
        double lo = best_tau;
        double hi = best_tau + 1.0;
        while (h(hi) >= target && hi < best_tau + 200.0) hi += 1.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (h(mid) >= target) lo = mid;
            else hi = mid;
            if (hi - lo < 1e-15 * std::max(1.0, std::abs(lo))) break;
        }
        tau = lo;
    }
    const double q = q_of(tau);
    const double p = p_of(tau);
    double s2 = r.target_k / q;
    // When the targets are out of reach, pin whichever side leaves the smaller miss.
    if (best < target && std::abs(r.target_l - p / s2) > std::abs(r.target_k - q * p / r.target_l)) s2 = p / r.target_l;
    const double u = std::sqrt(s2) * std::exp(tau);
    const double v = std::sqrt(s2) * std::exp(-tau);
    r.x = 1.0;
    r.y1 = u * s.fk;
    r.y2 = v * s.fl;
    fill(r, lambdas_uv(s, u, v));
    r.success = r.residual <= kLemma2Tolerance;
    return r;
}

Eigen::Matrix4d lemma2_zero_det_c(const StandardForm& sf)
{
    if (!(sf.a > 0.0) || !(sf.b > 0.0) || !(sf.f_k > 0.0) || !(sf.f_l > 0.0)) {
        throw DegenerateState("lemma2_zero_det_c: a, b, f_k, f_l must be positive");
    }
    const Eigen::Vector4d d(std::sqrt(2.0 * sf.a / sf.f_k), std::sqrt(sf.f_k / (2.0 * sf.a)), std::sqrt(2.0 * sf.b / sf.f_l),
                            std::sqrt(sf.f_l / (2.0 * sf.b)));
    return d.asDiagonal() * sf.matrix() * d.asDiagonal();
}

double nha_zubairy(const QuantumState& state)
{
    const ModeLayout& layout = state.layout();
    if (!layout.has_pump()) throw LayoutMismatch("nha_zubairy: needs the three-mode (pump, A, B) layout");
    auto [qa, pa] = nonlinear_quadratures(layout.mode_a(), 1, layout);
    auto [qb2, pb2] = nonlinear_quadratures(layout.mode_b(), 2, layout);
    TruncatedOperator l1 = qa - qb2;
    TruncatedOperator l2 = pa + pb2;
    l1.mark_hermitian();
    l2.mark_hermitian();
    const TruncatedOperator nb = embed(number(layout.dim(layout.mode_b())), layout.mode_b(), layout);
    const double bound = expectation(nb, state).real() + 0.75;
    const double cross = symmetrized_covariance(l1, l2, state);
    return symmetrized_covariance(l1, l1, state) * symmetrized_covariance(l2, l2, state) - bound * bound - cross * cross;
}

WitnessReport evaluate(const HigherOrderCovariance& cov, std::optional<double> nz)
{
    WitnessReport r;
    r.n = cov.n;
    r.k = cov.k;
    r.l = cov.l;
    r.nu_minus = witness_nu_minus(cov);
    r.ineq7_margin = inequality7_margin(cov);
    r.ineq8_margin = inequality8_margin(cov);
    r.lemma1_value = lemma1_check(cov);
    r.detC = cov.C().determinant();
    r.uncertainty = uncertainty_margin(cov);
    r.nz = nz;
    r.verdict = classify(r.nu_minus);
    const Verdict by_ineq8 = classify(r.ineq8_margin);
    if (r.verdict != Verdict::Boundary && by_ineq8 != Verdict::Boundary) {
        r.consistent = (r.verdict == Verdict::Entangled) == (by_ineq8 == Verdict::Entangled);
    }
    return r;
}

} // namespace nlent
