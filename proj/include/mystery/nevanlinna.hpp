#ifndef MYSTERY_NEVANLINNA_HPP
#define MYSTERY_NEVANLINNA_HPP

// The family of weights sharing the moments of the mystery weight:
//
//   D(x) = -(4/pi) sin(sqrt(x)K/2) sinh(sqrt(x)K'/2)
//   B(x) = C sin(sqrt(x)K/2) sinh(sqrt(x)K'/2) + cos(sqrt(x)K/2) cosh(sqrt(x)K'/2)
//   w(x; t, gamma) = (gamma/pi) / ((D - tB)^2 + gamma^2 B^2),   C = (2/pi) ln(k/k').
//
// Both D and B are even in sqrt(x), so for x = -s^2 they are evaluated through
// sqrt(x) = i s as real formulas:
//
//   D(-s^2) = (4/pi) sinh(sK/2) sin(sK'/2)
//   B(-s^2) = -C sinh(sK/2) sin(sK'/2) + cosh(sK/2) cos(sK'/2).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <mystery/elliptic.hpp>
#include <mystery/quadrature.hpp>

namespace mystery
{

struct WeightParams {
    double t;
    double gamma;

    void validate() const
    {
        if (!std::isfinite(t) || !(gamma > 0.0) || !std::isfinite(gamma)) {
            std::ostringstream oss;
            oss << "WeightParams: need finite t and gamma > 0, got t = " << t << ", gamma = " << gamma;
            throw std::domain_error(oss.str());
        }
    }
};

struct CanonicalParams {
    double C;
    double gamma_star;
    double t_star;

    WeightParams weight() const
    {
        return {t_star, gamma_star};
    }
};

inline CanonicalParams canonical_params(const ModulusData &m)
{
    const double C = 2.0 / std::numbers::pi * std::log(m.k / m.k_prime);
    const double gamma_star = 4.0 / (std::numbers::pi * (1.0 + C * C));
    return {C, gamma_star, -C * gamma_star};
}

namespace detail
{

// D and B multiplied by exp(-s r/2), where r = K' for x >= 0 and r = K for
// x < 0; the denominator of w is then O(1) for all s.
struct ScaledDB {
    double D;
    double B;
    double scale_sq; // exp(-s r), the square of the scale factor
};

inline ScaledDB scaled_db(double x, const ModulusData &m)
{
    const double C = canonical_params(m).C;
    const double pi = std::numbers::pi;
    if (x >= 0.0) {
        const double s = std::sqrt(x);
        const double e = std::exp(-s * m.K_prime);
        const double sinh_s = 0.5 * (1.0 - e); // sinh(sK'/2) exp(-sK'/2)
        const double cosh_s = 0.5 * (1.0 + e);
        const double sn = std::sin(0.5 * s * m.K);
        const double cs = std::cos(0.5 * s * m.K);
        return {-4.0 / pi * sn * sinh_s, C * sn * sinh_s + cs * cosh_s, e};
    }
    const double s = std::sqrt(-x);
    const double e = std::exp(-s * m.K);
    const double sinh_s = 0.5 * (1.0 - e); // sinh(sK/2) exp(-sK/2)
    const double cosh_s = 0.5 * (1.0 + e);
    const double sn = std::sin(0.5 * s * m.K_prime);
    const double cs = std::cos(0.5 * s * m.K_prime);
    return {4.0 / pi * sinh_s * sn, -C * sinh_s * sn + cosh_s * cs, e};
}

inline double scaled_weight_denominator(const ScaledDB &db, const WeightParams &p)
{
    const double a = db.D - p.t * db.B;
    const double g = p.gamma * db.B;
    const double den = a * a + g * g;
    if (!(den > 0.0)) {
        throw std::logic_error("weight_w: D and B vanish simultaneously");
    }
    return den;
}

} // namespace detail

inline double D_of_x(double x, const ModulusData &m)
{
    if (!std::isfinite(x)) {
        throw std::domain_error("D_of_x: x must be finite");
    }
    const double pi = std::numbers::pi;
    if (x >= 0.0) {
        const double s = std::sqrt(x);
        return -4.0 / pi * std::sin(0.5 * s * m.K) * std::sinh(0.5 * s * m.K_prime);
    }
    const double s = std::sqrt(-x);
    return 4.0 / pi * std::sinh(0.5 * s * m.K) * std::sin(0.5 * s * m.K_prime);
}

inline double B_of_x(double x, const ModulusData &m)
{
    if (!std::isfinite(x)) {
        throw std::domain_error("B_of_x: x must be finite");
    }
    const double C = canonical_params(m).C;
    if (x >= 0.0) {
        const double s = std::sqrt(x);
        const double a = 0.5 * s * m.K;
        const double b = 0.5 * s * m.K_prime;
        return C * std::sin(a) * std::sinh(b) + std::cos(a) * std::cosh(b);
    }
    const double s = std::sqrt(-x);
    const double a = 0.5 * s * m.K;
    const double b = 0.5 * s * m.K_prime;
    return -C * std::sinh(a) * std::sin(b) + std::cosh(a) * std::cos(b);
}

/// w(x; t, gamma), evaluated in a rescaled form that cannot overflow.
inline double weight_w(double x, const WeightParams &p, const ModulusData &m)
{
    p.validate();
    if (!std::isfinite(x)) {
        throw std::domain_error("weight_w: x must be finite");
    }
    const auto db = detail::scaled_db(x, m);
    return p.gamma / std::numbers::pi * db.scale_sq / detail::scaled_weight_denominator(db, p);
}

/**
 * int_R sin(sqrt(x)u)/sqrt(x) w(x; t, gamma) dx. The half-line integrands are
 * 2 sin(su) w(s^2) and 2 sinh(su) w(-s^2), with the exp(-sK') (resp. exp(-sK))
 * decay of w merged into the growing sine factor.
 */
inline std::complex<double> lhs_theorem2(std::complex<double> u, const WeightParams &p, const ModulusData &m,
                                         const QuadratureConfig &cfg = {})
{
    cfg.validate();
    p.validate();
    detail::check_in_rectangle(u, m, cfg.pole_margin, "lhs_theorem2");
    const double c = 2.0 * p.gamma / std::numbers::pi;
    auto pos = [&](double s) {
        const auto db = detail::scaled_db(s * s, m);
        return c * detail::damped_sin(s, u, m.K_prime) / detail::scaled_weight_denominator(db, p);
    };
    auto neg = [&](double s) {
        const auto db = detail::scaled_db(-s * s, m);
        return c * detail::damped_sinh(s, u, m.K) / detail::scaled_weight_denominator(db, p);
    };
    return integrate_half_lines(pos, neg, m.K_prime - std::abs(u.imag()), m.K - std::abs(u.real()), cfg).value;
}

/// int_R x^n w(x; t, gamma) dx by quadrature.
inline double moment_w(int n, const WeightParams &p, const ModulusData &m, const QuadratureConfig &cfg = {})
{
    if (n < 0 || n > max_quadrature_moment) {
        throw std::domain_error("moment_w: n must lie in 0..12");
    }
    p.validate();
    const double sign = n % 2 == 0 ? 1.0 : -1.0;
    auto pos = [&](double s) { return 2.0 * std::pow(s, 2 * n + 1) * weight_w(s * s, p, m); };
    auto neg = [&](double s) { return sign * 2.0 * std::pow(s, 2 * n + 1) * weight_w(-s * s, p, m); };
    return integrate_half_lines(pos, neg, m.K_prime, m.K, cfg).value;
}

struct MomentInvarianceReport {
    std::vector<WeightParams> params;
    /// moments[i][n] for params[i], n = 0..n_max.
    std::vector<std::vector<double>> moments;
    /// Largest |moments[i][n] - moments[j][n]| over all pairs, per n.
    std::vector<double> max_deviation;
};

inline constexpr int max_invariance_moment = 8;

inline MomentInvarianceReport moment_invariance_report(int n_max, const std::vector<WeightParams> &params,
                                                       const ModulusData &m, const QuadratureConfig &cfg = {})
{
    if (n_max < 0 || n_max > max_invariance_moment) {
        throw std::domain_error("moment_invariance_report: n_max must lie in 0..8");
    }
    MomentInvarianceReport report{params, {}, std::vector<double>(static_cast<std::size_t>(n_max) + 1, 0.0)};
    for (const auto &p : params) {
        std::vector<double> row;
        for (int n = 0; n <= n_max; ++n) {
            row.push_back(moment_w(n, p, m, cfg));
        }
        report.moments.push_back(std::move(row));
    }
    for (std::size_t n = 0; n <= static_cast<std::size_t>(n_max); ++n) {
        for (std::size_t i = 0; i < params.size(); ++i) {
            for (std::size_t j = i + 1; j < params.size(); ++j) {
                report.max_deviation[n] =
                    std::max(report.max_deviation[n], std::abs(report.moments[i][n] - report.moments[j][n]));
            }
        }
    }
    return report;
}

} // namespace mystery

#endif
