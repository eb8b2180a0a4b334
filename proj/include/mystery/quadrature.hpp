#ifndef MYSTERY_QUADRATURE_HPP
#define MYSTERY_QUADRATURE_HPP

// Integration over the real line against the weight
//
//   w(x) = (1/2) / (cos(sqrt(x) K) + cosh(sqrt(x) K')),
//
// which is a probability density: for x < 0 it reads (1/2)/(cosh(sK) + cos(sK'))
// with s = sqrt(-x). The line is split at 0 and each half is mapped to s >= 0
// by x = +-s^2 (dx = 2s ds), which removes the sqrt(x) cusp; the integrand is
// then analytic in s and tanh-sinh quadrature on [0, S] applies.
//
// With the substitution x = (2z/K)^2 the sine transform of the weight becomes
// a contour integral of sin(zv(1+tau)) / (cos(z(1+tau)) cos(z(1-tau))) over
// the two half-lines (i inf, 0] and [0, inf); the s-variable used here is the
// same path parametrised by s = 2|z|/K.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <type_traits>
#include <utility>

#include <mystery/elliptic.hpp>
#include <mystery/errors.hpp>

namespace mystery
{

struct QuadratureConfig {
    double rel_tol = 1e-11;
    double abs_tol = 1e-13;
    int max_level = 12;
    /// Integrand envelope, relative to its peak, below which a half-line is cut.
    double tail_cut = 1e-16;
    /// Fraction of the rectangle half-widths kept clear in the sine transforms.
    double pole_margin = 0.02;

    void validate() const
    {
        if (!(rel_tol > 0.0 && abs_tol > 0.0 && tail_cut > 0.0 && pole_margin > 0.0 && pole_margin < 1.0)) {
            throw std::domain_error("QuadratureConfig: tolerances and margins must be positive");
        }
        if (max_level < 1 || max_level > 16) {
            throw std::domain_error("QuadratureConfig: max_level must lie in 1..16");
        }
    }
};

template <typename T>
struct QuadratureResult {
    T value;
    double error_estimate;
    int level;
    double cut_positive; // S on x >= 0
    double cut_negative; // S on x < 0
};

namespace detail
{

inline constexpr double tanh_sinh_tmax = 4.0;
inline constexpr int min_accept_level = 4;
/// Maximum bisection depth for panels that do not converge.
inline constexpr int max_panel_depth = 10;

template <typename T>
struct PanelResult {
    T value;
    double error;
    int level;
    bool converged;
};

/**
 * Tanh-sinh on [a, b] with step halving. Level L uses step 2^-L; each level
 * only evaluates the new (odd) nodes. Converged at the first level whose
 * estimate differs from the previous one by at most rel_tol |value| + abs_tol.
 */
template <typename F>
auto tanh_sinh_panel(F &g, double a, double b, double abs_tol, const QuadratureConfig &cfg)
{
    using T = std::invoke_result_t<F &, double>;
    const double width = b - a;
    const double half = 0.5 * width;
    const double pi_2 = 0.5 * std::numbers::pi;

    // Node pair at parameter t > 0: a + near and b - near, where the distance
    // to the nearer endpoint, width / (1 + exp(2y)), is formed directly.
    auto pair = [&](double t) -> T {
        const double y = pi_2 * std::sinh(t);
        const double e = std::exp(-2.0 * y);
        const double near = width * e / (1.0 + e);
        const double ch = std::cosh(y);
        const double w = half * pi_2 * std::cosh(t) / (ch * ch);
        if (!(w > 0.0)) {
            return T(0.0);
        }
        return w * (g(a + near) + g(b - near));
    };

    double h = 1.0;
    T sum = half * pi_2 * g(a + half);
    for (double t = 1.0; t <= tanh_sinh_tmax; t += 1.0) {
        sum += pair(t);
    }
    T estimate = h * sum;
    double diff = std::abs(estimate);

    for (int level = 1; level <= cfg.max_level; ++level) {
        h *= 0.5;
        for (double t = h; t <= tanh_sinh_tmax; t += 2.0 * h) {
            sum += pair(t);
        }
        const T next = h * sum;
        diff = std::abs(next - estimate);
        estimate = next;
        if (level >= min_accept_level && diff <= cfg.rel_tol * std::abs(estimate) + abs_tol) {
            return PanelResult<T>{estimate, diff, level, true};
        }
    }
    return PanelResult<T>{estimate, diff, cfg.max_level, false};
}

// Panels that fail to converge are bisected, sharing abs_tol by width.
template <typename F>
auto tanh_sinh_adaptive(F &g, double a, double b, double abs_tol, const QuadratureConfig &cfg, int depth)
{
    auto r = tanh_sinh_panel(g, a, b, abs_tol, cfg);
    if (r.converged || depth >= max_panel_depth) {
        return r;
    }
    const double mid = 0.5 * (a + b);
    const auto left = tanh_sinh_adaptive(g, a, mid, 0.5 * abs_tol, cfg, depth + 1);
    const auto right = tanh_sinh_adaptive(g, mid, b, 0.5 * abs_tol, cfg, depth + 1);
    return decltype(r){left.value + right.value, left.error + right.error, std::max(left.level, right.level),
                       left.converged && right.converged};
}

/// Adaptive tanh-sinh on [0, S]; never throws, the caller inspects converged.
template <typename F>
auto tanh_sinh(F &&g, double S, const QuadratureConfig &cfg)
{
    return tanh_sinh_adaptive(g, 0.0, S, cfg.abs_tol, cfg, 0);
}

/**
 * Cut point for a half-line integrand decaying like exp(-rate s). Starts from
 * S0 = -ln(tail_cut)/rate and extends S while the integrand near S is not yet
 * below tail_cut times its peak on [0, S]; the extension handles polynomial
 * prefactors such as the s^(2n+1) of moment integrands.
 */
template <typename F>
double choose_cut(F &g, double rate, double tail_cut)
{
    double S = -std::log(tail_cut) / rate;
    constexpr int samples = 64;
    constexpr int window = 16;
    for (int attempt = 0; attempt < 40; ++attempt) {
        double peak = 0.0;
        for (int j = 1; j <= samples; ++j) {
            peak = std::max(peak, static_cast<double>(std::abs(g(S * j / samples))));
        }
        double edge = 0.0;
        for (int j = 0; j < window; ++j) {
            edge = std::max(edge, static_cast<double>(std::abs(g(S * (0.9 + 0.1 * j / (window - 1))))));
        }
        peak = std::max(peak, static_cast<double>(std::abs(g(0.0))));
        if (edge <= tail_cut * peak || peak == 0.0) {
            return S;
        }
        S *= 1.25;
    }
    return S;
}

/// sin(s u) exp(-s rate), stable for large s whenever |Im u| < rate.
inline std::complex<double> damped_sin(double s, std::complex<double> u, double rate)
{
    const std::complex<double> isu(-s * u.imag(), s * u.real());
    return (std::exp(isu - s * rate) - std::exp(-isu - s * rate)) / std::complex<double>(0.0, 2.0);
}

/// sinh(s u) exp(-s rate), stable for large s whenever |Re u| < rate.
inline std::complex<double> damped_sinh(double s, std::complex<double> u, double rate)
{
    return 0.5 * (std::exp(s * u - s * rate) - std::exp(-s * u - s * rate));
}

/// (cos(s a) + cosh(s b)) exp(-s b), never overflowing.
inline double damped_denominator(double s, double a, double b)
{
    const double e = std::exp(-s * b);
    return std::cos(s * a) * e + 0.5 * (1.0 + e * e);
}

} // namespace detail

/// The density (1/2)/(cos(sqrt(x)K) + cosh(sqrt(x)K')), continued to x < 0 through real formulas.
inline double mystery_weight(double x, const ModulusData &m)
{
    if (!std::isfinite(x)) {
        throw std::domain_error("mystery_weight: x must be finite");
    }
    if (x >= 0.0) {
        const double s = std::sqrt(x);
        return 0.5 * std::exp(-s * m.K_prime) / detail::damped_denominator(s, m.K, m.K_prime);
    }
    const double s = std::sqrt(-x);
    return 0.5 * std::exp(-s * m.K) / detail::damped_denominator(s, m.K_prime, m.K);
}

/**
 * Integrates over s >= 0 the two half-line integrands obtained from x = s^2
 * (\p pos) and x = -s^2 (\p neg), Jacobians included, and adds them.
 * \p pos_rate and \p neg_rate are the exponential decay rates used to seed the
 * cut points.
 */
template <typename Pos, typename Neg>
auto integrate_half_lines(Pos &&pos, Neg &&neg, double pos_rate, double neg_rate, const QuadratureConfig &cfg)
{
    cfg.validate();
    using T = std::common_type_t<std::invoke_result_t<Pos &, double>, std::invoke_result_t<Neg &, double>>;
    if (!(pos_rate > 0.0 && neg_rate > 0.0)) {
        throw std::domain_error("integrate_half_lines: decay rates must be positive");
    }
    const double sp = detail::choose_cut(pos, pos_rate, cfg.tail_cut);
    const double sn = detail::choose_cut(neg, neg_rate, cfg.tail_cut);
    const auto rp = detail::tanh_sinh(pos, sp, cfg);
    const auto rn = detail::tanh_sinh(neg, sn, cfg);
    const T value = T(rp.value) + T(rn.value);
    const double error = rp.error + rn.error;
    if (!rp.converged || !rn.converged) {
        std::ostringstream oss;
        oss << "integrate_half_lines: no convergence after " << cfg.max_level << " levels and "
            << detail::max_panel_depth << " bisections (cuts " << sp << ", " << sn << "; error estimate " << error
            << ")";
        throw accuracy_error(oss.str(), std::complex<double>(value), error);
    }
    return QuadratureResult<T>{value, error, std::max(rp.level, rn.level), sp, sn};
}

/// (1/2) int_R f(x) dx / (cos(sqrt(x)K) + cosh(sqrt(x)K')) for f real- or complex-valued.
template <typename F>
auto integrate_weighted(F &&f, const ModulusData &m, const QuadratureConfig &cfg = {})
{
    auto pos = [&](double s) { return f(s * s) * (2.0 * s * mystery_weight(s * s, m)); };
    auto neg = [&](double s) { return f(-s * s) * (2.0 * s * mystery_weight(-s * s, m)); };
    return integrate_half_lines(pos, neg, m.K_prime, m.K, cfg).value;
}

namespace detail
{

inline void check_in_rectangle(std::complex<double> u, const ModulusData &m, double margin, const char *fn)
{
    if (!(std::abs(u.real()) < m.K * (1.0 - margin) && std::abs(u.imag()) < m.K_prime * (1.0 - margin))) {
        std::ostringstream oss;
        oss << fn << ": u = " << u << " is outside the rectangle |Re u| < " << m.K * (1.0 - margin)
            << ", |Im u| < " << m.K_prime * (1.0 - margin);
        throw std::domain_error(oss.str());
    }
}

} // namespace detail

/**
 * (1/2) int_R sin(sqrt(x) u)/sqrt(x) w(x) dx for complex u in the shrunken
 * rectangle. On x = s^2 the integrand is 2 sin(su) w; on x = -s^2 it is
 * 2 sinh(su) w. Growth exp(s|Im u|) (resp. exp(s|Re u|)) is absorbed into the
 * weight's decay before evaluation.
 */
inline std::complex<double> lhs_theorem1(std::complex<double> u, const ModulusData &m, const QuadratureConfig &cfg = {})
{
    cfg.validate();
    detail::check_in_rectangle(u, m, cfg.pole_margin, "lhs_theorem1");
    auto pos = [&](double s) {
        return detail::damped_sin(s, u, m.K_prime) / detail::damped_denominator(s, m.K, m.K_prime);
    };
    auto neg = [&](double s) {
        return detail::damped_sinh(s, u, m.K) / detail::damped_denominator(s, m.K_prime, m.K);
    };
    const double pos_rate = m.K_prime - std::abs(u.imag());
    const double neg_rate = m.K - std::abs(u.real());
    return integrate_half_lines(pos, neg, pos_rate, neg_rate, cfg).value;
}

/// Maximum moment order for the quadrature route.
inline constexpr int max_quadrature_moment = 12;

/// (1/2) int_R x^n dx / (cos(sqrt(x)K) + cosh(sqrt(x)K')).
inline double moment_quadrature(int n, const ModulusData &m, const QuadratureConfig &cfg = {})
{
    if (n < 0 || n > max_quadrature_moment) {
        throw std::domain_error("moment_quadrature: n must lie in 0..12");
    }
    const double sign = n % 2 == 0 ? 1.0 : -1.0;
    auto pos = [&](double s) { return 2.0 * std::pow(s, 2 * n + 1) * mystery_weight(s * s, m); };
    auto neg = [&](double s) { return sign * 2.0 * std::pow(s, 2 * n + 1) * mystery_weight(-s * s, m); };
    return integrate_half_lines(pos, neg, m.K_prime, m.K, cfg).value;
}

} // namespace mystery

#endif
