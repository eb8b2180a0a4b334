#ifndef MYSTERY_THETA_HPP
#define MYSTERY_THETA_HPP

// Jacobi theta functions theta_1..theta_4(z | tau), q = exp(i pi tau):
//
//   theta_1 = 2 sum_{n>=0} (-1)^n q^{(n+1/2)^2} sin((2n+1) z)
//   theta_2 = 2 sum_{n>=0}        q^{(n+1/2)^2} cos((2n+1) z)
//   theta_3 = 1 + 2 sum_{n>=1}        q^{n^2} cos(2n z)
//   theta_4 = 1 + 2 sum_{n>=1} (-1)^n q^{n^2} cos(2n z)
//
// plus the lattice maps tau -> tau + 1, tau -> 2 tau and tau -> -1/tau, and
// the five-stage theta representation of the sine-transform integral along
// the lattice chain t -> t+1 -> (t+1)/2 -> -2/(t+1) -> tau.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <mystery/elliptic.hpp>
#include <mystery/errors.hpp>

namespace mystery
{

using cplx = std::complex<double>;

/// Lattices with Im(tau) at or below this are rejected: |q| is too close to 1.
inline constexpr double min_lattice_imag = 0.05;

/// Default truncation tolerance for the q-series.
inline constexpr double default_theta_tol = 1e-15;

/// Cap on the number of q-series terms.
inline constexpr int max_theta_terms = 10000;

namespace detail
{

inline void check_lattice(cplx tau)
{
    if (!(tau.imag() > 0.0)) {
        std::ostringstream oss;
        oss << "theta: lattice parameter must have positive imaginary part, got " << tau;
        throw std::domain_error(oss.str());
    }
    if (tau.imag() <= min_lattice_imag) {
        std::ostringstream oss;
        oss << "theta: Im(tau) = " << tau.imag() << " is below the supported minimum " << min_lattice_imag;
        throw std::domain_error(oss.str());
    }
}

} // namespace detail

/**
 * theta_index(z | tau) by direct q-series.
 *
 * The n-th term is bounded by 2 exp(-pi Im(tau) m^2 + 2 m |Im z|) with m = n
 * (theta_3, theta_4) or n + 1/2 (theta_1, theta_2). Past the peak of that
 * envelope the bounds decrease with shrinking ratios, so the tail after term m
 * is at most bound(m+1) / (1 - ratio(m+1)); summation stops once that drops
 * below tol * (|partial sum| + tol).
 *
 * Each term is formed as a single exponential, so large |Im z| does not
 * overflow as long as the term itself is representable.
 */
inline cplx theta(int index, cplx z, cplx tau, double tol = default_theta_tol)
{
    if (index < 1 || index > 4) {
        throw std::domain_error("theta: index must be 1, 2, 3 or 4");
    }
    if (!(tol >= 1e-15)) {
        throw std::domain_error("theta: tolerance must be at least 1e-15");
    }
    detail::check_lattice(tau);

    const cplx i_pi_tau = cplx(0.0, std::numbers::pi) * tau;
    const double b = std::numbers::pi * tau.imag();
    const double y = std::abs(z.imag());
    const bool half = index <= 2;
    const cplx iz(-z.imag(), z.real());

    auto envelope = [&](double m) { return 2.0 * std::exp(-b * m * m + 2.0 * m * y); };
    auto ratio = [&](double m) { return std::exp(-b * (2.0 * m + 1.0) + 2.0 * y); };

    cplx sum = half ? cplx(0.0) : cplx(1.0);
    for (int n = half ? 0 : 1; n <= max_theta_terms; ++n) {
        const double m = half ? n + 0.5 : n;
        const cplx base = i_pi_tau * (m * m);
        const cplx ep = std::exp(base + 2.0 * m * iz);
        const cplx em = std::exp(base - 2.0 * m * iz);
        const double sign = (index == 1 || index == 4) && (n % 2 == 1) ? -1.0 : 1.0;
        cplx term;
        if (index == 1) {
            // 2 sin(w) = -i (e^{iw} - e^{-iw})
            term = sign * cplx(0.0, -1.0) * (ep - em);
        } else {
            term = sign * (ep + em);
        }
        sum += term;

        const double r = ratio(m + 1.0);
        if (r < 1.0 && ratio(m) < 1.0) {
            const double tail = envelope(m + 1.0) / (1.0 - r);
            if (tail <= tol * (std::abs(sum) + tol)) {
                return sum;
            }
        }
    }
    std::ostringstream oss;
    oss << "theta: series for index " << index << " at z = " << z << ", tau = " << tau << " needs more than "
        << max_theta_terms << " terms";
    throw convergence_error(oss.str());
}

/// All four theta functions at one (z, tau).
struct ThetaQuad {
    cplx z;
    cplx tau;
    std::array<cplx, 4> values; // theta_1 .. theta_4

    cplx operator[](int index) const
    {
        return values.at(static_cast<std::size_t>(index - 1));
    }
};

inline ThetaQuad theta_quad(cplx z, cplx tau, double tol = default_theta_tol)
{
    return {z, tau, {theta(1, z, tau, tol), theta(2, z, tau, tol), theta(3, z, tau, tol), theta(4, z, tau, tol)}};
}

/**
 * tau -> tau + direction (direction = +1 or -1), same z:
 *
 *   theta_1(z | tau+1) = e^{i pi/4} theta_1(z | tau)
 *   theta_2(z | tau+1) = e^{i pi/4} theta_2(z | tau)
 *   theta_3(z | tau+1) = theta_4(z | tau)
 *   theta_4(z | tau+1) = theta_3(z | tau)
 */
inline ThetaQuad transform_shift(const ThetaQuad &q, int direction = 1)
{
    if (direction != 1 && direction != -1) {
        throw std::domain_error("transform_shift: direction must be +1 or -1");
    }
    const cplx phase = std::polar(1.0, direction * std::numbers::pi / 4.0);
    return {q.z, q.tau + static_cast<double>(direction), {phase * q[1], phase * q[2], q[4], q[3]}};
}

/**
 * tau -> -1/tau with z -> z * (-1/tau). With tau' = -1/tau and
 * A = sqrt(-i tau) exp(-i tau' z^2 / pi) (principal root):
 *
 *   theta_1(z tau' | tau') = i A theta_1(z | tau)
 *   theta_2(z tau' | tau') =   A theta_4(z | tau)
 *   theta_3(z tau' | tau') =   A theta_3(z | tau)
 *   theta_4(z tau' | tau') =   A theta_2(z | tau)
 */
inline ThetaQuad transform_inversion(const ThetaQuad &q)
{
    detail::check_lattice(q.tau);
    const cplx minus_i_tau = cplx(0.0, -1.0) * q.tau;
    // Im(tau) > 0 puts -i tau in the right half-plane, away from the branch cut.
    if (!(minus_i_tau.real() > 0.0)) {
        throw std::domain_error("transform_inversion: -i tau left the right half-plane");
    }
    const cplx tau_new = -1.0 / q.tau;
    const cplx z_new = q.z * tau_new;
    const cplx a = std::sqrt(minus_i_tau) * std::exp(cplx(0.0, -1.0) * tau_new * q.z * q.z / std::numbers::pi);
    return {z_new, tau_new, {cplx(0.0, 1.0) * a * q[1], a * q[4], a * q[3], a * q[2]}};
}

/// Quantities at (2z | 2tau) recovered from the four thetas at (z | tau).
struct DoubledLattice {
    cplx z;                  // 2 z
    cplx tau;                // 2 tau
    cplx theta1;             // theta_1(2z | 2tau)
    cplx theta4;             // theta_4(2z | 2tau)
    cplx theta2_theta3_zero; // theta_2(0 | 2tau) theta_3(0 | 2tau)
    cplx theta4_zero;        // theta_4(0 | 2tau)
};

/**
 * Landen-type halving between the lattices 2 tau and tau:
 *
 *   theta_1(2z | 2tau) theta_4(0 | 2tau) = theta_1(z | tau) theta_2(z | tau)
 *   theta_4(2z | 2tau) theta_4(0 | 2tau) = theta_3(z | tau) theta_4(z | tau)
 *   theta_2(0 | 2tau) theta_3(0 | 2tau)  = theta_2(0 | tau)^2 / 2
 *   theta_4(0 | 2tau)^2                  = theta_3(0 | tau) theta_4(0 | tau)
 *
 * \p at_z holds the thetas at (z | tau), \p at_zero those at (0 | tau). The
 * square root takes the principal branch; it is the correct one whenever
 * Re(theta_3 theta_4 (0|tau)) > 0, which is checked.
 */
inline DoubledLattice transform_half(const ThetaQuad &at_z, const ThetaQuad &at_zero)
{
    const cplx prod = at_zero[3] * at_zero[4];
    if (!(prod.real() > 0.0)) {
        throw std::domain_error("transform_half: theta_3 theta_4 (0|tau) has non-positive real part");
    }
    const cplx th4_0 = std::sqrt(prod);
    return {2.0 * at_z.z,
            2.0 * at_z.tau,
            at_z[1] * at_z[2] / th4_0,
            at_z[3] * at_z[4] / th4_0,
            0.5 * at_zero[2] * at_zero[2],
            th4_0};
}

/// Lattice parameters of the transformation chain.
struct ThetaChainParams {
    cplx tau; // i K'/K
    cplx t;   // (1 + tau) / (1 - tau)
    cplx t1;  // t + 1
    cplx t2;  // t1 / 2
    cplx t3;  // -1 / t2
    cplx t4;  // t3 + 1, equal to tau
};

inline ThetaChainParams chain_params(const ModulusData &m)
{
    ThetaChainParams p{};
    p.tau = cplx(0.0, m.K_prime / m.K);
    p.t = (1.0 + p.tau) / (1.0 - p.tau);
    p.t1 = p.t + 1.0;
    p.t2 = p.t1 / 2.0;
    p.t3 = -1.0 / p.t2;
    p.t4 = p.t3 + 1.0;
    if (std::abs(p.t4 - p.tau) > 1e-13 * std::abs(p.tau)) {
        std::ostringstream oss;
        oss << "chain_params: chain does not close, t4 = " << p.t4 << ", tau = " << p.tau;
        throw std::logic_error(oss.str());
    }
    return p;
}

/**
 * Stage-th theta expression for the sine-transform integral at
 * u = v K (1 + tau) / 2. Every stage equals sn(u)/cd(u); stage s lives on
 * lattice t, t1, t2, t3, tau for s = 0..4 and is evaluated there directly.
 *
 *   0: -(pi i)/(K(1-tau))  th2 th4 (0|t)  th1(w0|t)/th3(w0|t),        w0 = pi t v/2
 *   1: -pi/(K(1-tau))      th2 th3 (0|t1) th1(w0|t1)/th4(w0|t1)
 *   2: -pi/(2K(1-tau))     th2(0|t2)^2    th1 th2 / (th3 th4) (w2|t2), w2 = pi t v/4
 *   3: -pi/(2K)            th4(0|t3)^2    th1 th4 / (th3 th2) (w3|t3), w3 = w2 t3
 *   4: -pi/(2K)            th3(0|tau)^2   th1 th3 / (th4 th2) (w3|tau)
 */
inline cplx chain_expression(int stage, double v, const ModulusData &m, double tol = default_theta_tol)
{
    if (!(std::abs(v) < 1.0)) {
        throw std::domain_error("chain_expression: v must lie in (-1, 1)");
    }
    const auto p = chain_params(m);
    const double pi = std::numbers::pi;
    const cplx one_minus_tau = 1.0 - p.tau;
    const cplx w0 = pi * p.t * v / 2.0;
    const cplx w2 = pi * p.t * v / 4.0;
    const cplx w3 = w2 * p.t3;
    auto th = [tol](int i, cplx z, cplx tau) { return theta(i, z, tau, tol); };

    switch (stage) {
    case 0:
        return -(cplx(0.0, pi) / (m.K * one_minus_tau)) * th(2, 0.0, p.t) * th(4, 0.0, p.t) * th(1, w0, p.t)
               / th(3, w0, p.t);
    case 1:
        return -(pi / (m.K * one_minus_tau)) * th(2, 0.0, p.t1) * th(3, 0.0, p.t1) * th(1, w0, p.t1)
               / th(4, w0, p.t1);
    case 2: {
        const cplx c = th(2, 0.0, p.t2);
        return -(pi / (2.0 * m.K * one_minus_tau)) * c * c * th(1, w2, p.t2) * th(2, w2, p.t2)
               / (th(3, w2, p.t2) * th(4, w2, p.t2));
    }
    case 3: {
        const cplx c = th(4, 0.0, p.t3);
        return -(pi / (2.0 * m.K)) * c * c * th(1, w3, p.t3) * th(4, w3, p.t3) / (th(3, w3, p.t3) * th(2, w3, p.t3));
    }
    case 4: {
        const cplx c = th(3, 0.0, p.tau);
        return -(pi / (2.0 * m.K)) * c * c * th(1, w3, p.tau) * th(3, w3, p.tau)
               / (th(4, w3, p.tau) * th(2, w3, p.tau));
    }
    default:
        throw std::domain_error("chain_expression: stage must be in 0..4");
    }
}

/**
 * The stage values reached by applying the lattice maps instead of evaluating
 * each stage directly: stage 1 from stage-0 thetas by a shift, stage 1 again
 * from stage-2 thetas by halving, stage 3 from stage-2 thetas by inversion,
 * stage 4 from stage-3 thetas by a shift. Only the lattices t and t2 are
 * summed as q-series.
 */
struct ChainTransformValues {
    cplx stage1_from_shift;
    cplx stage1_from_half;
    cplx stage3_from_inversion;
    cplx stage4_from_shift;
};

inline ChainTransformValues chain_via_transforms(double v, const ModulusData &m, double tol = default_theta_tol)
{
    if (!(std::abs(v) < 1.0)) {
        throw std::domain_error("chain_via_transforms: v must lie in (-1, 1)");
    }
    const auto p = chain_params(m);
    const double pi = std::numbers::pi;
    const cplx one_minus_tau = 1.0 - p.tau;
    const cplx w0 = pi * p.t * v / 2.0;
    const cplx w2 = pi * p.t * v / 4.0;

    ChainTransformValues out{};

    const auto q0 = transform_shift(theta_quad(w0, p.t, tol));
    const auto q0_zero = transform_shift(theta_quad(0.0, p.t, tol));
    out.stage1_from_shift = -(pi / (m.K * one_minus_tau)) * q0_zero[2] * q0_zero[3] * q0[1] / q0[4];

    const auto q2 = theta_quad(w2, p.t2, tol);
    const auto q2_zero = theta_quad(0.0, p.t2, tol);
    const auto d = transform_half(q2, q2_zero);
    out.stage1_from_half = -(pi / (m.K * one_minus_tau)) * d.theta2_theta3_zero * d.theta1 / d.theta4;

    const auto q3 = transform_inversion(q2);
    const auto q3_zero = transform_inversion(q2_zero);
    out.stage3_from_inversion =
        -(pi / (2.0 * m.K)) * q3_zero[4] * q3_zero[4] * q3[1] * q3[4] / (q3[3] * q3[2]);

    const auto q4 = transform_shift(q3);
    const auto q4_zero = transform_shift(q3_zero);
    out.stage4_from_shift = -(pi / (2.0 * m.K)) * q4_zero[3] * q4_zero[3] * q4[1] * q4[3] / (q4[4] * q4[2]);
    return out;
}

/// Jacobi functions and the constants k, k', K rebuilt from theta functions at tau = i K'/K.
struct ThetaJacobi {
    JacobiTriple<cplx> triple;
    double k;
    double k_prime;
    double K;
};

/**
 * With zeta = pi u / (2K) and theta constants at z = 0:
 *
 *   sn = th3/th2 * th1(zeta)/th4(zeta),  cn = th4/th2 * th2(zeta)/th4(zeta),
 *   dn = th4/th3 * th3(zeta)/th4(zeta),
 *   k = th2^2/th3^2,  k' = th4^2/th3^2,  K = (pi/2) th3^2.
 */
inline ThetaJacobi jacobi_via_theta(cplx u, const ModulusData &m, double tol = default_theta_tol)
{
    const cplx tau(0.0, m.K_prime / m.K);
    const double th2 = theta(2, 0.0, tau, tol).real();
    const double th3 = theta(3, 0.0, tau, tol).real();
    const double th4 = theta(4, 0.0, tau, tol).real();
    const cplx zeta = std::numbers::pi * u / (2.0 * m.K);
    const auto q = theta_quad(zeta, tau, tol);

    ThetaJacobi out{};
    out.triple.sn = th3 / th2 * q[1] / q[4];
    out.triple.cn = th4 / th2 * q[2] / q[4];
    out.triple.dn = th4 / th3 * q[3] / q[4];
    out.k = th2 * th2 / (th3 * th3);
    out.k_prime = th4 * th4 / (th3 * th3);
    out.K = std::numbers::pi / 2.0 * th3 * th3;
    return out;
}

/// sn(u)/cd(u) = th1 th3 / (th2 th4) at zeta = pi u / (2K).
inline cplx sn_over_cd_via_theta(cplx u, const ModulusData &m, double tol = default_theta_tol)
{
    const cplx tau(0.0, m.K_prime / m.K);
    const auto q = theta_quad(std::numbers::pi * u / (2.0 * m.K), tau, tol);
    return q[1] * q[3] / (q[2] * q[4]);
}

} // namespace mystery

#endif
