#include <cmath>
#include <complex>
#include <numbers>

#include <gtest/gtest.h>

#include <mystery/elliptic.hpp>
#include <mystery/quadrature.hpp>
#include <mystery/series.hpp>
#include <mystery/theta.hpp>

#include "oracles.hpp"

using namespace mystery;
using cd = std::complex<double>;

TEST(ResidueSeries, ZeroAtOrigin)
{
    EXPECT_EQ(residue_series_I(0.0, modulus_data(0.6)), cd(0.0, 0.0));
}

TEST(ResidueSeries, MatchesSnOverCd)
{
    const auto m = modulus_data(0.6);
    const cd v = residue_series_I(0.3, m);
    EXPECT_LE(std::abs(v - sn_over_cd(0.3 * cd(m.K, m.K_prime) / 2.0, m)), 1e-10);
    EXPECT_LE(std::abs(v - reference::sncd_v03_k06), 1e-14);
}

TEST(ResidueSeries, Antisymmetric)
{
    for (double k : {0.2, 0.7}) {
        const auto m = modulus_data(k);
        for (double v : {0.15, 0.5, 0.95}) {
            EXPECT_LE(std::abs(residue_series_I(-v, m) + residue_series_I(v, m)), 1e-15);
        }
    }
}

TEST(ResidueSeries, MatchesQuadratureOnGrid)
{
    for (double k : {0.2, 0.5, 0.8}) {
        const auto m = modulus_data(k);
        for (int i = -9; i <= 9; ++i) {
            if (i == 0) {
                continue;
            }
            const double v = i / 10.0;
            const cd q = lhs_theorem1(v * cd(m.K, m.K_prime) / 2.0, m);
            EXPECT_LE(std::abs(residue_series_I(v, m) - q), 1e-9) << k << " " << v;
        }
    }
}

TEST(ResidueSeries, GeometricTail)
{
    for (double k : {0.2, 0.5, 0.8}) {
        const auto m = modulus_data(k);
        const double im_t = chain_params(m).t.imag();
        for (double v : {0.2, 0.5, 0.8, 0.95, -0.6}) {
            const double ratio = std::exp(-std::numbers::pi * im_t * (1.0 - std::abs(v)));
            for (int n = 5; n < 40; ++n) {
                const double a = std::abs(residue_term(n, v, m).term);
                const double b = std::abs(residue_term(n + 1, v, m).term);
                if (a < 1e-290) {
                    break;
                }
                EXPECT_LE(b / a, ratio * 1.1) << k << " " << v << " " << n;
            }
        }
    }
}

TEST(ResidueSeries, TermPolesLieOnRay)
{
    const auto m = modulus_data(0.6);
    const auto p = chain_params(m);
    const auto t = residue_term(3, 0.4, m);
    EXPECT_EQ(t.n, 3);
    EXPECT_LE(std::abs(t.z_n - std::numbers::pi * 2.5 / (1.0 - p.tau)), 1e-15);
    EXPECT_GT(t.z_n.real(), 0.0);
    EXPECT_GT(t.z_n.imag(), 0.0);
}

TEST(ResidueSeries, Errors)
{
    const auto m = modulus_data(0.6);
    EXPECT_THROW(residue_series_I(1.0, m), std::domain_error);
    EXPECT_THROW(residue_series_I(0.3, m, 0.0), std::domain_error);
    EXPECT_THROW(residue_term(0, 0.3, m), std::domain_error);
}

TEST(FourierCheck, Origin)
{
    const auto f = fourier_check_sn_dn(0.0, modulus_data(0.7));
    EXPECT_EQ(f.series, 0.0);
    EXPECT_EQ(f.elliptic, 0.0);
}

TEST(FourierCheck, BothSidesAgree)
{
    const auto f = fourier_check_sn_dn(0.5, modulus_data(0.7));
    EXPECT_NEAR(f.series, f.elliptic, 1e-11);
    EXPECT_NEAR(f.series, reference::fourier_z05_k07, 1e-15);
}

TEST(FourierCheck, OddInZeta)
{
    const auto m = modulus_data(0.3);
    for (double z : {0.1, 0.45, 0.9}) {
        const auto a = fourier_check_sn_dn(z, m);
        const auto b = fourier_check_sn_dn(-z, m);
        EXPECT_EQ(a.series, -b.series);
        EXPECT_EQ(a.elliptic, -b.elliptic);
    }
}

TEST(FourierCheck, Grid)
{
    for (double k : {0.3, 0.7}) {
        const auto m = modulus_data(k);
        for (int i = 1; i <= 9; ++i) {
            const auto f = fourier_check_sn_dn(i / 10.0, m);
            EXPECT_LE(std::abs(f.series - f.elliptic), 1e-11) << k << " " << i;
        }
    }
    EXPECT_THROW(fourier_check_sn_dn(1.0, modulus_data(0.5)), std::domain_error);
}

TEST(PowerSeries, ProductAndQuotient)
{
    // (1 + u)^2 = 1 + 2u + u^2 and (1 + 2u + u^2)/(1 + u) = 1 + u.
    const PowerSeries<double> a{{1.0, 1.0, 0.0, 0.0}};
    const auto sq = a * a;
    EXPECT_EQ(sq.coefficients, (std::vector<double>{1.0, 2.0, 1.0, 0.0}));
    const auto back = sq / a;
    EXPECT_EQ(back.coefficients, a.coefficients);
    EXPECT_EQ(back.order(), 3u);
    const PowerSeries<double> z{{0.0, 1.0}};
    EXPECT_THROW(a / z, std::domain_error);
}

TEST(Taylor, LeadingTerms)
{
    const double k = 0.6;
    const auto t = taylor_sn_cn_dn(k, 7);
    EXPECT_EQ(t.sn[0], 0.0);
    EXPECT_EQ(t.sn[1], 1.0);
    EXPECT_NEAR(t.sn[3], -(1.0 + k * k) / 6.0, 1e-16);
    EXPECT_EQ(t.cn[0], 1.0);
    EXPECT_EQ(t.cn[2], -0.5);
    EXPECT_EQ(t.dn[0], 1.0);
    EXPECT_NEAR(t.dn[2], -k * k / 2.0, 1e-16);
    for (std::size_t i = 0; i <= 7; i += 2) {
        EXPECT_EQ(t.sn[i], 0.0);
    }
    for (std::size_t i = 1; i <= 7; i += 2) {
        EXPECT_EQ(t.cn[i], 0.0);
        EXPECT_EQ(t.dn[i], 0.0);
    }
}

TEST(Taylor, SnThirdDerivativeMatchesFiniteDifferences)
{
    for (double k : {0.3, 0.8}) {
        const auto m = modulus_data(k);
        auto f = [&](double x) { return jacobi_real(x, m).sn; };
        const double fd = oracle::central_derivative(f, 3, 0.2);
        EXPECT_NEAR(fd / 6.0, taylor_sn_cn_dn(k, 3).sn[3], 1e-7);
    }
}

TEST(Taylor, SnOverCdCoefficients)
{
    for (double k : {0.2, 0.6, 1.0 / std::numbers::sqrt2}) {
        const auto s = taylor_sn_over_cd(k, 21);
        EXPECT_EQ(s[1], 1.0);
        EXPECT_NEAR(s[3], (1.0 - 2.0 * k * k) / 3.0, 1e-16);
        for (std::size_t i = 0; i <= 21; i += 2) {
            EXPECT_EQ(s[i], 0.0);
        }
    }
}

TEST(Taylor, ThirdCoefficientMatchesFiniteDifferences)
{
    for (double k : {0.3, 0.6, 0.9}) {
        const auto m = modulus_data(k);
        auto f = [&](double x) { return sn_over_cd(cd(x, 0.0), m).real(); };
        EXPECT_NEAR(oracle::central_derivative(f, 3, 0.4) / 6.0, (1.0 - 2.0 * k * k) / 3.0, 1e-7) << k;
    }
}

TEST(Taylor, DerivativesMatchFiniteDifferences)
{
    for (double k : {0.3, 0.6, 0.9}) {
        const auto m = modulus_data(k);
        const auto s = taylor_sn_over_cd(k, 7);
        auto real_f = [&](double x) { return sn_over_cd(cd(x, 0.0), m).real(); };
        auto complex_f = [&](cd z) { return sn_over_cd(z, m); };
        double fact = 1.0;
        for (int n = 0; n <= 3; ++n) {
            const int order = 2 * n + 1;
            if (n > 0) {
                fact *= (2.0 * n) * (2.0 * n + 1.0);
            }
            const double exact = fact * s[static_cast<std::size_t>(order)];
            const double fd = order <= 3 ? oracle::central_derivative(real_f, order, 0.4)
                                         : oracle::circle_derivative(complex_f, order, 0.8).real();
            EXPECT_LE(std::abs(fd - exact), 1e-6 * std::abs(exact)) << k << " order " << order;
        }
    }
}

TEST(Taylor, ExactMatchesFloating)
{
    const auto e = taylor_sn_over_cd<rational>(0.6, 15);
    const auto f = taylor_sn_over_cd<double>(0.6, 15);
    for (std::size_t i = 0; i <= 15; ++i) {
        EXPECT_NEAR(e[i].convert_to<double>(), f[i], 1e-15 * std::max(1.0, std::abs(f[i])));
    }
}

TEST(Taylor, Errors)
{
    EXPECT_THROW(taylor_sn_cn_dn(0.5, -1), std::domain_error);
    EXPECT_THROW(taylor_sn_cn_dn(0.5, 65), std::domain_error);
    EXPECT_THROW(taylor_sn_cn_dn(1.2, 5), std::domain_error);
}

TEST(Moments, ZerothIsExactlyOne)
{
    for (double k : {0.1, 0.3, 0.77, 0.99}) {
        EXPECT_EQ(moment_exact(0, k), rational(1));
        EXPECT_EQ(moments_from_taylor(0, k), 1.0);
    }
}

TEST(Moments, FirstClosedForm)
{
    for (double k : {0.3, 0.5, 0.8, 0.9}) {
        EXPECT_NEAR(moments_from_taylor(1, k), 2.0 * (2.0 * k * k - 1.0), 1e-15);
    }
    EXPECT_NEAR(moments_from_taylor(1, 0.8), 0.56, 1e-15);
    EXPECT_NEAR(moments_from_taylor(1, 1.0 / std::numbers::sqrt2), 0.0, 1e-15);
}

TEST(Moments, ExactForThreeFourFiveTriangle)
{
    // k = 0.8 is not a dyadic rational, so compare at the exact double value.
    const double k = 0.8;
    const rational k2 = rational(k) * rational(k);
    EXPECT_EQ(moment_exact(1, k), rational(2) * (rational(2) * k2 - rational(1)));
}

TEST(Moments, MatchReferenceValues)
{
    for (const auto &row : reference::moments) {
        for (std::size_t n = 0; n < row.m.size(); ++n) {
            EXPECT_NEAR(moments_from_taylor(static_cast<int>(n), row.k), row.m[n], 1e-14 * std::max(1.0, std::abs(row.m[n])))
                << row.k << " " << n;
        }
    }
}

TEST(Moments, ExactAtRationalParameter)
{
    const long sc[] = {1, 0, 12, 0, 3024, 0, 4390848};
    for (int n = 0; n < 7; ++n) {
        EXPECT_EQ(moment_exact_k2(n, rational(1, 2)), rational(sc[n])) << n;
    }
    EXPECT_EQ(moment_exact_k2(1, rational(16, 25)), rational(14, 25));
    EXPECT_EQ(moment_exact_k2(2, rational(16, 25)), rational(7696, 625));
    EXPECT_THROW(moment_exact_k2(1, rational(1)), std::domain_error);
}

TEST(Moments, SelfComplementaryDoubleModulus)
{
    // 1/sqrt(2) is not exact in binary64; the odd moments are then only near 0.
    const double k = 1.0 / std::numbers::sqrt2;
    EXPECT_EQ(moments_from_taylor(0, k), 1.0);
    EXPECT_NEAR(moments_from_taylor(1, k), 0.0, 1e-15);
    EXPECT_NEAR(moments_from_taylor(2, k), 12.0, 1e-13);
    EXPECT_NEAR(moments_from_taylor(4, k), 3024.0, 1e-9);
}

TEST(Moments, FloatingPathBeyondExactOrder)
{
    const double a = moments_from_taylor(20, 0.6);
    const double b = moments_from_taylor(19, 0.6);
    EXPECT_TRUE(std::isfinite(a));
    EXPECT_GT(std::abs(a), std::abs(b));
    EXPECT_THROW(moments_from_taylor(31, 0.6), std::domain_error);
    EXPECT_THROW(moment_exact(20, 0.6), std::domain_error);
}
