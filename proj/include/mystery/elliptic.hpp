#ifndef MYSTERY_ELLIPTIC_HPP
#define MYSTERY_ELLIPTIC_HPP

// Complete elliptic integral of the first kind and the Jacobi elliptic
// functions sn, cn, dn for real and complex argument.
//
// K(k) is computed from the arithmetic-geometric mean, the real Jacobi
// functions from the descending Landen (AGM) recursion of the amplitude, and
// the complex ones from the addition decomposition u = x + iy, which only
// needs real kernels at modulus k (for x) and k' (for y).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include <mystery/errors.hpp>

namespace mystery
{

/// The quadruple (k, k', K, K') that every formula in this library depends on.
struct ModulusData {
    double k;
    double k_prime;
    double K;
    double K_prime;
};

/// Values of sn, cn, dn at one point. cd = cn/dn is derived.
template <typename T>
struct JacobiTriple {
    T sn;
    T cn;
    T dn;

    T cd() const
    {
        return cn / dn;
    }
};

namespace detail
{

inline void check_modulus(double k, const char *fn)
{
    if (!(k > 0.0 && k < 1.0)) {
        std::ostringstream oss;
        oss << fn << ": modulus must lie in (0, 1), got " << k;
        throw std::domain_error(oss.str());
    }
}

// sqrt(1 - k^2) without the cancellation of 1 - k*k near k = 1.
inline double complement(double k)
{
    return std::sqrt((1.0 - k) * (1.0 + k));
}

inline double agm_unchecked(double a, double b)
{
    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (int i = 0; i < 64 && std::abs(a - b) > eps * a; ++i) {
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return a == b ? a : 0.5 * (a + b);
}

// Jacobi functions of real u at modulus k with complement kp supplied by the
// caller, so that jacobi at modulus k' does not lose the digits of k.
inline JacobiTriple<double> jacobi_real_impl(double u, double k, double kp)
{
    constexpr double eps = std::numeric_limits<double>::epsilon();
    constexpr int max_stages = 64;

    std::array<double, max_stages + 1> a{};
    std::array<double, max_stages + 1> c{};
    a[0] = 1.0;
    c[0] = k;
    double b = kp;
    int n = 0;
    while (std::abs(c[n]) > eps * a[n] && n < max_stages) {
        a[n + 1] = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = std::sqrt(a[n] * b);
        ++n;
    }

    double phi = std::ldexp(a[n] * u, n);
    for (int j = n; j > 0; --j) {
        phi = 0.5 * (phi + std::asin(c[j] / a[j] * std::sin(phi)));
    }

    const double sn = std::sin(phi);
    const double cn = std::cos(phi);
    // 1 - k^2 sn^2 = k'^2 + k^2 cn^2, a sum of non-negative terms.
    const double dn = std::sqrt(kp * kp + k * k * cn * cn);
    return {sn, cn, dn};
}

} // namespace detail

/// Arithmetic-geometric mean of two positive reals.
inline double agm(double a, double b)
{
    if (!(a > 0.0 && b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
        throw std::domain_error("agm: arguments must be positive and finite");
    }
    return detail::agm_unchecked(a, b);
}

/// K(k) = pi / (2 agm(1, k')).
inline double complete_K(double k)
{
    detail::check_modulus(k, "complete_K");
    return std::numbers::pi / (2.0 * detail::agm_unchecked(1.0, detail::complement(k)));
}

inline ModulusData modulus_data(double k)
{
    detail::check_modulus(k, "modulus_data");
    const double kp = detail::complement(k);
    return {k, kp, std::numbers::pi / (2.0 * detail::agm_unchecked(1.0, kp)),
            std::numbers::pi / (2.0 * detail::agm_unchecked(1.0, k))};
}

/// sn, cn, dn of a real argument. Accurate to about 1e-13 relative for |u| <= 4K.
inline JacobiTriple<double> jacobi_real(double u, double k)
{
    detail::check_modulus(k, "jacobi_real");
    if (!std::isfinite(u)) {
        throw std::domain_error("jacobi_real: non-finite argument");
    }
    return detail::jacobi_real_impl(u, k, detail::complement(k));
}

inline JacobiTriple<double> jacobi_real(double u, const ModulusData &m)
{
    if (!std::isfinite(u)) {
        throw std::domain_error("jacobi_real: non-finite argument");
    }
    return detail::jacobi_real_impl(u, m.k, m.k_prime);
}

/// Default distance kept from the edges of the rectangle |Re u| < K, |Im u| < K'.
inline double default_pole_margin(const ModulusData &m)
{
    return 1e-3 * std::min(m.K, m.K_prime);
}

/**
 * sn, cn, dn at u = x + iy inside the open rectangle |x| < K, |y| < K'.
 *
 * With s, c, d = sn, cn, dn(x, k) and s1, c1, d1 = sn, cn, dn(y, k'):
 *
 *   sn(u) = (s d1 + i c d s1 c1) / D
 *   cn(u) = (c c1 - i s d s1 d1) / D
 *   dn(u) = (d c1 d1 - i k^2 s c s1) / D,      D = c1^2 + k^2 s^2 s1^2.
 *
 * Points within \p margin of the rectangle edges raise pole_proximity_error;
 * the edges carry the poles of sn at +-iK' and the zeros of cn at +-K.
 */
inline JacobiTriple<std::complex<double>> jacobi_complex(std::complex<double> u, const ModulusData &m,
                                                         std::optional<double> margin = std::nullopt)
{
    const double delta = margin.value_or(default_pole_margin(m));
    const double x = u.real();
    const double y = u.imag();
    if (!std::isfinite(x) || !std::isfinite(y)) {
        throw std::domain_error("jacobi_complex: non-finite argument");
    }
    if (std::abs(y) >= m.K_prime - delta) {
        std::ostringstream oss;
        oss << "jacobi_complex: u = " << u << " lies within " << delta << " of the pole of sn at "
            << (y > 0 ? "+" : "-") << "iK' (K' = " << m.K_prime << ")";
        throw pole_proximity_error(oss.str());
    }
    if (std::abs(x) >= m.K - delta) {
        std::ostringstream oss;
        oss << "jacobi_complex: u = " << u << " lies within " << delta << " of the zero of cn at "
            << (x > 0 ? "+" : "-") << "K (K = " << m.K << ")";
        throw pole_proximity_error(oss.str());
    }

    const auto [s, c, d] = detail::jacobi_real_impl(x, m.k, m.k_prime);
    if (y == 0.0) {
        return {{s, 0.0}, {c, 0.0}, {d, 0.0}};
    }
    const auto [s1, c1, d1] = detail::jacobi_real_impl(y, m.k_prime, m.k);
    const double k2 = m.k * m.k;
    const double den = c1 * c1 + k2 * s * s * s1 * s1;
    return {{s * d1 / den, c * d * s1 * c1 / den},
            {c * c1 / den, -s * d * s1 * d1 / den},
            {d * c1 * d1 / den, -k2 * s * c * s1 / den}};
}

/// sn(u)/cd(u) = sn(u) dn(u) / cn(u), the right-hand side of the sine-transform identity.
inline std::complex<double> sn_over_cd(std::complex<double> u, const ModulusData &m,
                                       std::optional<double> margin = std::nullopt)
{
    const auto t = jacobi_complex(u, m, margin);
    if (std::abs(t.cn) < std::numeric_limits<double>::min() * 1e10) {
        std::ostringstream oss;
        oss << "sn_over_cd: cn vanishes at u = " << u;
        throw pole_proximity_error(oss.str());
    }
    return t.sn * t.dn / t.cn;
}

} // namespace mystery

#endif
