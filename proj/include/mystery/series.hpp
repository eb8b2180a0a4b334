#ifndef MYSTERY_SERIES_HPP
#define MYSTERY_SERIES_HPP

// Series side of the sine-transform identity:
//
//  * the residue series. Shifting the contour of
//      I = (1/K) int_L sin(zv(1+tau)) dz / (cos(z(1+tau)) cos(z(1-tau)))
//    past the first-quadrant poles z_n = pi (n - 1/2)/(1 - tau) (the shifted
//    contours pass through the midpoints w_n = pi n/(1 - tau)) leaves
//      I = 2 pi i/(K(1-tau)) sum_{n>=1} (-1)^n sin(pi(n-1/2) t v)/cos(pi(n-1/2) t),
//    t = (1+tau)/(1-tau);
//  * the Fourier series of sn/dn;
//  * Taylor coefficients of sn, cn, dn and sn dn/cn about 0, from which the
//    moments of the weight follow: m_n = (-1)^n (2n+1)! [u^{2n+1}] sn dn/cn.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include <mystery/elliptic.hpp>
#include <mystery/errors.hpp>
#include <mystery/theta.hpp>

namespace mystery
{

using rational = boost::multiprecision::cpp_rational;

/// Cap on residue / Fourier series terms.
inline constexpr int max_series_terms = 100000;

/// One term of the residue series: the pole z_n and (-1)^n sin(a v)/cos(a)/(1-tau), a = pi(n-1/2)t.
struct ResidueSeriesTerm {
    int n;
    cplx z_n;
    cplx term;
};

namespace detail
{

// sin(a v)/cos(a) for Im(a) > 0, |v| < 1, written with decaying exponentials only.
inline cplx sin_over_cos(cplx a, double v)
{
    const cplx ia(-a.imag(), a.real());
    return (std::exp(ia * (1.0 + v)) - std::exp(ia * (1.0 - v))) / (cplx(0.0, 1.0) * (std::exp(2.0 * ia) + 1.0));
}

} // namespace detail

inline ResidueSeriesTerm residue_term(int n, double v, const ModulusData &m)
{
    if (n < 1) {
        throw std::domain_error("residue_term: n must be >= 1");
    }
    const auto p = chain_params(m);
    const double pi = std::numbers::pi;
    const cplx a = pi * (n - 0.5) * p.t;
    const double sign = n % 2 == 0 ? 1.0 : -1.0;
    return {n, pi * (n - 0.5) / (1.0 - p.tau), sign * detail::sin_over_cos(a, v) / (1.0 - p.tau)};
}

/**
 * The residue series for I at u = v (K + iK')/2. With r = exp(-pi Im(t)(1-|v|))
 * and b_j = Im(pi (j - 1/2) t), the tail after term n is bounded by
 *   2 exp(-b_{n+1}(1-|v|)) / ((1 - r)(1 - exp(-2 b_{n+1})))
 * and summation stops when that bound times the prefactor is below
 * tol * max(1, |I|).
 */
inline cplx residue_series_I(double v, const ModulusData &m, double tol = 1e-15)
{
    if (!(std::abs(v) < 1.0)) {
        throw std::domain_error("residue_series_I: v must lie in (-1, 1)");
    }
    if (!(tol > 0.0)) {
        throw std::domain_error("residue_series_I: tol must be positive");
    }
    const auto p = chain_params(m);
    const double pi = std::numbers::pi;
    const cplx prefactor = cplx(0.0, 2.0 * pi) / (m.K * (1.0 - p.tau));
    const double decay = 1.0 - std::abs(v);
    const double r = std::exp(-pi * p.t.imag() * decay);

    cplx sum = 0.0;
    for (int n = 1; n <= max_series_terms; ++n) {
        const cplx a = pi * (n - 0.5) * p.t;
        sum += (n % 2 == 0 ? 1.0 : -1.0) * detail::sin_over_cos(a, v);

        const double b_next = pi * (n + 0.5) * p.t.imag();
        const double tail = 2.0 * std::exp(-b_next * decay) / ((1.0 - r) * (1.0 - std::exp(-2.0 * b_next)));
        if (std::abs(prefactor) * tail <= tol * std::max(1.0, std::abs(prefactor * sum))) {
            return prefactor * sum;
        }
    }
    std::ostringstream oss;
    oss << "residue_series_I: no convergence within " << max_series_terms << " terms for v = " << v;
    throw convergence_error(oss.str());
}

/// Both sides of pi sum (-1)^n sin(pi(n-1/2)zeta)/cosh(pi(n-1/2)K'/K) = -K k k' sn(K zeta)/dn(K zeta).
struct FourierCheck {
    double series;
    double elliptic;
};

inline FourierCheck fourier_check_sn_dn(double zeta, const ModulusData &m, double tol = 1e-16)
{
    if (!(std::abs(zeta) < 1.0)) {
        throw std::domain_error("fourier_check_sn_dn: zeta must lie in (-1, 1)");
    }
    const double pi = std::numbers::pi;
    const double nome_rate = pi * m.K_prime / m.K;
    const double r = std::exp(-nome_rate);

    double sum = 0.0;
    bool done = false;
    for (int n = 1; n <= max_series_terms; ++n) {
        const double x = (n - 0.5) * nome_rate;
        const double e = std::exp(-x);
        const double sech = 2.0 * e / (1.0 + e * e);
        sum += (n % 2 == 0 ? 1.0 : -1.0) * std::sin(pi * (n - 0.5) * zeta) * sech;
        const double tail = 2.0 * std::exp(-(n + 0.5) * nome_rate) / (1.0 - r);
        if (pi * tail <= tol * std::max(1.0, pi * std::abs(sum))) {
            done = true;
            break;
        }
    }
    if (!done) {
        throw convergence_error("fourier_check_sn_dn: series did not converge");
    }
    const auto j = jacobi_real(m.K * zeta, m);
    return {pi * sum, -m.K * m.k * m.k_prime * j.sn / j.dn};
}

// --- Power series -------------------------------------------------------

/// Truncated Taylor series a_0 + a_1 u + ... + a_N u^N about u = 0.
template <typename Coeff>
struct PowerSeries {
    std::vector<Coeff> coefficients;

    std::size_t order() const
    {
        return coefficients.empty() ? 0 : coefficients.size() - 1;
    }
    const Coeff &operator[](std::size_t i) const
    {
        return coefficients.at(i);
    }
};

/// Cauchy product truncated to the shorter order.
template <typename Coeff>
PowerSeries<Coeff> operator*(const PowerSeries<Coeff> &a, const PowerSeries<Coeff> &b)
{
    const std::size_t n = std::min(a.coefficients.size(), b.coefficients.size());
    PowerSeries<Coeff> out{std::vector<Coeff>(n, Coeff(0))};
    for (std::size_t i = 0; i < n; ++i) {
        Coeff acc(0);
        for (std::size_t j = 0; j <= i; ++j) {
            acc += a.coefficients[j] * b.coefficients[i - j];
        }
        out.coefficients[i] = std::move(acc);
    }
    return out;
}

/// a/b, requiring b_0 != 0: c_i = (a_i - sum_{j=1}^{i} b_j c_{i-j}) / b_0.
template <typename Coeff>
PowerSeries<Coeff> operator/(const PowerSeries<Coeff> &a, const PowerSeries<Coeff> &b)
{
    if (b.coefficients.empty() || b.coefficients[0] == Coeff(0)) {
        throw std::domain_error("PowerSeries: division by a series with zero constant term");
    }
    const std::size_t n = std::min(a.coefficients.size(), b.coefficients.size());
    PowerSeries<Coeff> out{std::vector<Coeff>(n, Coeff(0))};
    for (std::size_t i = 0; i < n; ++i) {
        Coeff acc = a.coefficients[i];
        for (std::size_t j = 1; j <= i; ++j) {
            acc -= b.coefficients[j] * out.coefficients[i - j];
        }
        out.coefficients[i] = acc / b.coefficients[0];
    }
    return out;
}

template <typename Coeff>
struct SnCnDnSeries {
    PowerSeries<Coeff> sn;
    PowerSeries<Coeff> cn;
    PowerSeries<Coeff> dn;
};

inline constexpr int max_taylor_order = 64;
/// Highest order computed in exact rational arithmetic by moments_from_taylor.
inline constexpr int max_exact_order = 40;

namespace detail
{

template <typename Coeff>
Coeff modulus_squared(double k)
{
    if constexpr (std::is_same_v<Coeff, rational>) {
        // Every double is a dyadic rational, so k^2 is exact here.
        const rational kr(k);
        return kr * kr;
    } else {
        return Coeff(k) * Coeff(k);
    }
}

} // namespace detail

/**
 * Taylor series of sn, cn, dn to order N for parameter m = k^2, from
 * s' = c d, c' = -s d, d' = -m s c with s(0) = 0, c(0) = d(0) = 1:
 *
 *   (n+1) s_{n+1} = sum_j c_j d_{n-j},  (n+1) c_{n+1} = -sum_j s_j d_{n-j},
 *   (n+1) d_{n+1} = -m sum_j s_j c_{n-j}.
 */
template <typename Coeff>
SnCnDnSeries<Coeff> taylor_sn_cn_dn_k2(const Coeff &k2, int order)
{
    if (!(k2 > Coeff(0) && k2 < Coeff(1))) {
        throw std::domain_error("taylor_sn_cn_dn: k^2 must lie in (0, 1)");
    }
    if (order < 0 || order > max_taylor_order) {
        throw std::domain_error("taylor_sn_cn_dn: order must lie in 0..64");
    }
    const auto len = static_cast<std::size_t>(order) + 1;
    std::vector<Coeff> s(len, Coeff(0)), c(len, Coeff(0)), d(len, Coeff(0));
    c[0] = Coeff(1);
    d[0] = Coeff(1);
    for (std::size_t n = 0; n + 1 < len; ++n) {
        Coeff ss(0), cc(0), dd(0);
        for (std::size_t j = 0; j <= n; ++j) {
            ss += c[j] * d[n - j];
            cc += s[j] * d[n - j];
            dd += s[j] * c[n - j];
        }
        const Coeff np1(static_cast<int>(n + 1));
        s[n + 1] = ss / np1;
        c[n + 1] = -cc / np1;
        d[n + 1] = -(k2 * dd) / np1;
    }
    return {{std::move(s)}, {std::move(c)}, {std::move(d)}};
}

/// As taylor_sn_cn_dn_k2 for modulus k; with Coeff = rational the coefficients are exact for the double k given.
template <typename Coeff = double>
SnCnDnSeries<Coeff> taylor_sn_cn_dn(double k, int order)
{
    detail::check_modulus(k, "taylor_sn_cn_dn");
    return taylor_sn_cn_dn_k2<Coeff>(detail::modulus_squared<Coeff>(k), order);
}

/// Taylor series of sn(u) dn(u)/cn(u) = sn(u)/cd(u).
template <typename Coeff = double>
PowerSeries<Coeff> taylor_sn_over_cd(double k, int order)
{
    const auto t = taylor_sn_cn_dn<Coeff>(k, order);
    return t.sn * t.dn / t.cn;
}

/// Exact moment m_n = (-1)^n (2n+1)! a_{2n+1} for a rational k^2; n <= 19.
inline rational moment_exact_k2(int n, const rational &k2)
{
    if (n < 0 || 2 * n + 1 > max_exact_order) {
        throw std::domain_error("moment_exact: n must lie in 0..19");
    }
    const auto t = taylor_sn_cn_dn_k2<rational>(k2, 2 * n + 1);
    const auto series = t.sn * t.dn / t.cn;
    boost::multiprecision::cpp_int fact = 1;
    for (int j = 2; j <= 2 * n + 1; ++j) {
        fact *= j;
    }
    rational mn = series[static_cast<std::size_t>(2 * n + 1)] * rational(fact);
    return n % 2 == 0 ? mn : rational(-mn);
}

/// Exact moment for the double k given.
inline rational moment_exact(int n, double k)
{
    detail::check_modulus(k, "moment_exact");
    return moment_exact_k2(n, detail::modulus_squared<rational>(k));
}

/// n-th moment of the weight from the Taylor coefficients of sn/cd; exact rationals up to order 40.
inline double moments_from_taylor(int n, double k)
{
    if (n < 0 || n > 30) {
        throw std::domain_error("moments_from_taylor: n must lie in 0..30");
    }
    if (2 * n + 1 <= max_exact_order) {
        return moment_exact(n, k).convert_to<double>();
    }
    const auto series = taylor_sn_over_cd<double>(k, 2 * n + 1);
    double fact = 1.0;
    for (int j = 2; j <= 2 * n + 1; ++j) {
        fact *= j;
    }
    const double mn = series[static_cast<std::size_t>(2 * n + 1)] * fact;
    return n % 2 == 0 ? mn : -mn;
}

} // namespace mystery

#endif
