#ifndef MYSTERY_HARNESS_HPP
#define MYSTERY_HARNESS_HPP

// Verification suites and report tables behind the command-line tool.
//
// Every suite produces a Table whose rows are computed independently (and
// possibly concurrently) but emitted in input order. Numbers are written with
// 17 significant digits in lowercase scientific notation, so identical
// configurations give byte-identical reports.

#include <array>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include <mystery/mystery.hpp>

namespace mystery::harness
{

/// Invalid configuration or usage; the tool maps it to exit code 2.
class config_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

namespace detail
{

inline std::string fmt_g(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

} // namespace detail

/// A point u = a K + i b K' given in quarter-period fractions.
struct UPoint {
    double a;
    double b;
};

enum class Format { csv, json };
enum class Suite { verify, moments, weights, theta_chain, all };

inline const char *suite_name(Suite s)
{
    switch (s) {
    case Suite::verify:
        return "verify";
    case Suite::moments:
        return "moments";
    case Suite::weights:
        return "weights";
    case Suite::theta_chain:
        return "theta-chain";
    case Suite::all:
        return "all";
    }
    return "?";
}

inline Suite parse_suite(const std::string &s)
{
    if (s == "verify") return Suite::verify;
    if (s == "moments") return Suite::moments;
    if (s == "weights") return Suite::weights;
    if (s == "theta-chain") return Suite::theta_chain;
    if (s == "all") return Suite::all;
    throw config_error("unknown suite '" + s + "' (expected verify|moments|weights|theta-chain|all)");
}

inline Format parse_format(const std::string &s)
{
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    throw config_error("unknown format '" + s + "' (expected csv|json)");
}

inline std::vector<double> default_u_fractions()
{
    return {-0.9, -0.45, 0.0, 0.45, 0.9};
}

struct RunConfig {
    /// Moduli for every suite; empty selects each suite's own default grid.
    std::vector<double> k_grid;
    std::vector<UPoint> u_grid;
    std::vector<double> v_grid;
    std::vector<double> zeta_grid;
    std::vector<WeightParams> weight_params{{0.0, 1.0}, {1.0, 0.5}, {-2.0, 3.0}};
    int moments_max = 6;
    /// Replaces every suite's pass threshold when set.
    std::optional<double> tol;
    Format format = Format::csv;
    std::string out;
    int jobs = 1;
    Suite suite = Suite::verify;
    double x_min = -50.0;
    double x_max = 50.0;
    int x_points = 200;
    QuadratureConfig quad{};

    RunConfig()
    {
        for (double a : default_u_fractions()) {
            for (double b : default_u_fractions()) {
                u_grid.push_back({a, b});
            }
        }
        for (int i = -9; i <= 9; ++i) {
            v_grid.push_back(i / 10.0);
        }
        for (int i = 1; i <= 9; ++i) {
            zeta_grid.push_back(i / 10.0);
        }
    }

    void validate() const
    {
        for (double k : k_grid) {
            if (!(k > 0.0 && k < 1.0)) {
                throw config_error("k = " + detail::fmt_g(k) + " is outside (0, 1)");
            }
        }
        for (const auto &u : u_grid) {
            if (!(std::abs(u.a) < 1.0 - quad.pole_margin && std::abs(u.b) < 1.0 - quad.pole_margin)) {
                std::ostringstream oss;
                oss << "u fraction (" << u.a << ", " << u.b << ") must satisfy |a|, |b| < 1 - pole_margin ("
                    << 1.0 - quad.pole_margin << ")";
                throw config_error(oss.str());
            }
        }
        for (double v : v_grid) {
            if (!(std::abs(v) < 1.0 - quad.pole_margin)) {
                throw config_error("v = " + detail::fmt_g(v) + " must satisfy |v| < 1 - pole_margin");
            }
        }
        for (double z : zeta_grid) {
            if (!(std::abs(z) < 1.0)) {
                throw config_error("zeta = " + detail::fmt_g(z) + " must satisfy |zeta| < 1");
            }
        }
        for (const auto &p : weight_params) {
            if (!(p.gamma > 0.0) || !std::isfinite(p.t) || !std::isfinite(p.gamma)) {
                throw config_error("weight parameters need finite t and gamma > 0");
            }
        }
        if (moments_max < 0 || moments_max > max_quadrature_moment) {
            throw config_error("moments_max must lie in 0..12");
        }
        if (tol && !(*tol > 0.0)) {
            throw config_error("tolerance must be positive");
        }
        if (jobs < 1) {
            throw config_error("jobs must be at least 1");
        }
        if (!(x_min < x_max) || x_points < 2) {
            throw config_error("weights grid needs x_min < x_max and at least 2 points");
        }
        try {
            quad.validate();
        } catch (const std::domain_error &e) {
            throw config_error(e.what());
        }
    }
};

// --- Tables ---------------------------------------------------------------

using Cell = std::variant<std::string, double, long long>;

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::size_t failures = 0;
};

inline std::string format_number(double x)
{
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

inline std::string format_cell_csv(const Cell &c)
{
    if (const auto *s = std::get_if<std::string>(&c)) {
        return *s;
    }
    if (const auto *d = std::get_if<double>(&c)) {
        return format_number(*d);
    }
    return std::to_string(std::get<long long>(c));
}

inline std::string json_string(const std::string &s)
{
    std::string out = "\"";
    for (char ch : s) {
        switch (ch) {
        case '"':
            out += "\\\"";
            break;
        case '\\':
            out += "\\\\";
            break;
        case '\n':
            out += "\\n";
            break;
        default:
            if (static_cast<unsigned char>(ch) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned>(ch));
                out += buf;
            } else {
                out += ch;
            }
        }
    }
    return out + "\"";
}

inline std::string format_cell_json(const Cell &c)
{
    if (const auto *s = std::get_if<std::string>(&c)) {
        return json_string(*s);
    }
    if (const auto *d = std::get_if<double>(&c)) {
        return std::isfinite(*d) ? format_number(*d) : "null";
    }
    return std::to_string(std::get<long long>(c));
}

inline void write_csv(const Table &t, std::ostream &os)
{
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        os << (i ? "," : "") << t.columns[i];
    }
    os << '\n';
    for (const auto &row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            os << (i ? "," : "") << format_cell_csv(row[i]);
        }
        os << '\n';
    }
}

inline void write_json(const Table &t, std::ostream &os)
{
    os << "[\n";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        os << "  {";
        for (std::size_t i = 0; i < t.columns.size(); ++i) {
            os << (i ? ", " : "") << json_string(t.columns[i]) << ": " << format_cell_json(t.rows[r][i]);
        }
        os << (r + 1 < t.rows.size() ? "},\n" : "}\n");
    }
    os << "]\n";
}

inline void write_table(const Table &t, Format f, std::ostream &os)
{
    if (f == Format::csv) {
        write_csv(t, os);
    } else {
        write_json(t, os);
    }
}

// --- Execution -------------------------------------------------------------

/// Evaluates fn(0..n-1) on up to \p jobs threads; results keep index order.
template <typename R>
std::vector<R> run_indexed(std::size_t n, int jobs, const std::function<R(std::size_t)> &fn)
{
    std::vector<R> out(n);
    const auto workers = static_cast<std::size_t>(std::max(1, jobs));
    if (workers == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = fn(i);
        }
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, n); ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                out[i] = fn(i);
            }
        });
    }
    pool.clear();
    return out;
}

namespace detail
{

inline std::vector<double> grid_or(const std::vector<double> &grid, std::vector<double> fallback)
{
    return grid.empty() ? std::move(fallback) : grid;
}

inline double threshold(const RunConfig &cfg, double suite_default)
{
    return cfg.tol.value_or(suite_default);
}

inline bool status_ok(double err, double bound)
{
    return std::isfinite(err) && err <= bound;
}

// One comparison row of the verify report.
struct Check {
    std::string case_id;
    std::string suite;
    double k = 0.0;
    std::complex<double> u{};
    std::complex<double> lhs{std::numeric_limits<double>::quiet_NaN(), 0.0};
    std::complex<double> rhs{std::numeric_limits<double>::quiet_NaN(), 0.0};
    double abs_err = std::numeric_limits<double>::quiet_NaN();
    double rel_err = std::numeric_limits<double>::quiet_NaN();
    bool pass = false;
    std::string error;
};

// Runs body(check) and fills errors and pass status; \p scale maps rhs to the
// multiplier of the tolerance, \p err overrides |lhs - rhs| when set.
inline Check run_check(Check c, double tol, const std::function<void(Check &)> &body,
                       const std::function<double(const Check &)> &scale)
{
    try {
        body(c);
        if (std::isnan(c.abs_err)) {
            c.abs_err = std::abs(c.lhs - c.rhs);
        }
        const double r = std::abs(c.rhs);
        c.rel_err = r > 0.0 ? c.abs_err / r : c.abs_err;
        c.pass = status_ok(c.abs_err, tol * scale(c));
    } catch (const std::exception &e) {
        c.error = e.what();
        c.pass = false;
    }
    return c;
}

inline double unit_scale(const Check &)
{
    return 1.0;
}

inline double one_plus_rhs(const Check &c)
{
    return 1.0 + std::abs(c.rhs);
}

inline double rhs_scale(const Check &c)
{
    const double r = std::abs(c.rhs);
    return r > 0.0 ? r : 1.0;
}

inline double max_one_rhs(const Check &c)
{
    return std::max(1.0, std::abs(c.rhs));
}

} // namespace detail

inline std::vector<double> mystery_k_grid()
{
    return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99};
}

/**
 * All identity checks: the unit mass, the sine-transform identity on the u
 * grid, residue series vs quadrature, theta-chain stage agreement and its
 * bridge to sn/cd, the sn/dn Fourier series, the weight coincidence at the
 * canonical parameters, the generalised identity for the weight family, and
 * Taylor vs quadrature moments plus moment invariance across the family.
 */
inline Table verify_table(const RunConfig &cfg, std::vector<std::string> *diagnostics = nullptr)
{
    using detail::Check;
    std::vector<std::function<Check()>> cases;
    const auto &qc = cfg.quad;

    for (double k : detail::grid_or(cfg.k_grid, mystery_k_grid())) {
        Check c{"mass/k=" + detail::fmt_g(k), "mass", k};
        const double tol = detail::threshold(cfg, 1e-10);
        cases.push_back([c, tol, &qc] {
            return detail::run_check(
                c, tol,
                [&qc](Check &c) {
                    const auto m = modulus_data(c.k);
                    c.lhs = integrate_weighted([](double) { return 1.0; }, m, qc);
                    c.rhs = 1.0;
                },
                detail::unit_scale);
        });
    }

    const auto thm_k = detail::grid_or(cfg.k_grid, {0.2, 0.5, 0.8});
    for (double k : thm_k) {
        for (const auto &up : cfg.u_grid) {
            Check c{"sine_transform/k=" + detail::fmt_g(k) + "/a=" + detail::fmt_g(up.a) + "/b=" + detail::fmt_g(up.b),
                    "sine_transform", k};
            const double tol = detail::threshold(cfg, 1e-8);
            cases.push_back([c, up, tol, &qc] {
                return detail::run_check(
                    c, tol,
                    [&](Check &c) {
                        const auto m = modulus_data(c.k);
                        c.u = {up.a * m.K, up.b * m.K_prime};
                        c.lhs = lhs_theorem1(c.u, m, qc);
                        c.rhs = sn_over_cd(c.u, m);
                    },
                    detail::one_plus_rhs);
            });
        }
    }

    for (double k : thm_k) {
        for (double v : cfg.v_grid) {
            const std::string id = "k=" + detail::fmt_g(k) + "/v=" + detail::fmt_g(v);
            const double tol_res = detail::threshold(cfg, 1e-9);
            cases.push_back([c = Check{"residue/" + id, "residue", k}, v, tol_res, &qc] {
                return detail::run_check(
                    c, tol_res,
                    [&](Check &c) {
                        const auto m = modulus_data(c.k);
                        c.u = v * std::complex<double>(m.K, m.K_prime) / 2.0;
                        c.lhs = residue_series_I(v, m);
                        c.rhs = lhs_theorem1(c.u, m, qc);
                    },
                    detail::unit_scale);
            });
            const double tol_chain = detail::threshold(cfg, 1e-11);
            cases.push_back([c = Check{"theta_chain/" + id, "theta_chain", k}, v, tol_chain] {
                return detail::run_check(
                    c, tol_chain,
                    [&](Check &c) {
                        const auto m = modulus_data(c.k);
                        c.u = v * std::complex<double>(m.K, m.K_prime) / 2.0;
                        std::array<std::complex<double>, 5> st{};
                        for (int s = 0; s < 5; ++s) {
                            st[static_cast<std::size_t>(s)] = chain_expression(s, v, m);
                        }
                        double dev = 0.0;
                        for (std::size_t i = 0; i < 5; ++i) {
                            for (std::size_t j = i + 1; j < 5; ++j) {
                                dev = std::max(dev, std::abs(st[i] - st[j]));
                            }
                        }
                        c.lhs = st[0];
                        c.rhs = st[4];
                        c.abs_err = dev;
                    },
                    detail::one_plus_rhs);
            });
            const double tol_bridge = detail::threshold(cfg, 1e-10);
            cases.push_back([c = Check{"theta_bridge/" + id, "theta_bridge", k}, v, tol_bridge] {
                return detail::run_check(
                    c, tol_bridge,
                    [&](Check &c) {
                        const auto m = modulus_data(c.k);
                        c.u = v * std::complex<double>(m.K, m.K_prime) / 2.0;
                        c.lhs = chain_expression(4, v, m);
                        c.rhs = sn_over_cd(c.u, m);
                    },
                    detail::unit_scale);
            });
        }
    }

    for (double k : detail::grid_or(cfg.k_grid, {0.3, 0.7})) {
        for (double z : cfg.zeta_grid) {
            const double tol = detail::threshold(cfg, 1e-11);
            cases.push_back([c = Check{"fourier/k=" + detail::fmt_g(k) + "/zeta=" + detail::fmt_g(z), "fourier", k,
                                       {z, 0.0}},
                             tol] {
                return detail::run_check(
                    c, tol,
                    [](Check &c) {
                        const auto f = fourier_check_sn_dn(c.u.real(), modulus_data(c.k));
                        c.lhs = f.series;
                        c.rhs = f.elliptic;
                    },
                    detail::unit_scale);
            });
        }
    }

    for (double k : thm_k) {
        for (int i = 0; i < cfg.x_points; ++i) {
            const double x = cfg.x_min + (cfg.x_max - cfg.x_min) * i / (cfg.x_points - 1);
            const double tol = detail::threshold(cfg, 1e-12);
            cases.push_back([c = Check{"coincidence/k=" + detail::fmt_g(k) + "/i=" + std::to_string(i), "coincidence",
                                       k, {x, 0.0}},
                             tol] {
                return detail::run_check(
                    c, tol,
                    [](Check &c) {
                        const auto m = modulus_data(c.k);
                        c.lhs = weight_w(c.u.real(), canonical_params(m).weight(), m);
                        c.rhs = mystery_weight(c.u.real(), m);
                    },
                    detail::rhs_scale);
            });
        }
    }

    const auto fam_k = detail::grid_or(cfg.k_grid, {0.6});
    for (double k : fam_k) {
        for (const auto &p : cfg.weight_params) {
            for (const UPoint up : {UPoint{0.4, 0.0}, UPoint{0.15, 0.15}}) {
                const double tol = detail::threshold(cfg, 1e-7);
                Check c{"weight_family/k=" + detail::fmt_g(k) + "/t=" + detail::fmt_g(p.t) + "/gamma=" + detail::fmt_g(p.gamma)
                            + "/a=" + detail::fmt_g(up.a) + "/b=" + detail::fmt_g(up.b),
                        "weight_family", k};
                cases.push_back([c, p, up, tol, &qc] {
                    return detail::run_check(
                        c, tol,
                        [&](Check &c) {
                            const auto m = modulus_data(c.k);
                            c.u = {up.a * m.K, up.b * m.K_prime};
                            c.lhs = lhs_theorem2(c.u, p, m, qc);
                            c.rhs = sn_over_cd(c.u, m);
                        },
                        detail::unit_scale);
                });
            }
        }
    }

    for (double k : detail::grid_or(cfg.k_grid, {0.3, 0.6, 0.9})) {
        for (int n = 0; n <= cfg.moments_max; ++n) {
            const double tol = detail::threshold(cfg, 1e-7);
            Check c{"moment/k=" + detail::fmt_g(k) + "/n=" + std::to_string(n), "moment", k, {double(n), 0.0}};
            cases.push_back([c, n, tol, &qc] {
                return detail::run_check(
                    c, tol,
                    [&](Check &c) {
                        c.lhs = moment_quadrature(n, modulus_data(c.k), qc);
                        c.rhs = moments_from_taylor(n, c.k);
                    },
                    detail::max_one_rhs);
            });
        }
    }

    for (double k : fam_k) {
        const int n_max = std::min(cfg.moments_max, max_invariance_moment);
        for (int n = 0; n <= n_max; ++n) {
            const double tol = detail::threshold(cfg, 1e-7);
            Check c{"invariance/k=" + detail::fmt_g(k) + "/n=" + std::to_string(n), "invariance", k, {double(n), 0.0}};
            cases.push_back([c, n, tol, &qc, params = cfg.weight_params] {
                return detail::run_check(
                    c, tol,
                    [&](Check &c) {
                        const auto m = modulus_data(c.k);
                        auto all = params;
                        all.push_back(canonical_params(m).weight());
                        double lo = std::numeric_limits<double>::infinity();
                        double hi = -lo;
                        for (const auto &p : all) {
                            const double mn = moment_w(n, p, m, qc);
                            lo = std::min(lo, mn);
                            hi = std::max(hi, mn);
                        }
                        c.lhs = hi;
                        c.rhs = lo;
                        c.abs_err = hi - lo;
                    },
                    detail::max_one_rhs);
            });
        }
    }

    const auto checks = run_indexed<Check>(cases.size(), cfg.jobs, [&](std::size_t i) { return cases[i](); });

    Table t{"verify",
            {"case_id", "suite", "k", "u_re", "u_im", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "abs_err", "rel_err",
             "status"},
            {},
            0};
    for (const auto &c : checks) {
        t.rows.push_back({c.case_id, c.suite, c.k, c.u.real(), c.u.imag(), c.lhs.real(), c.lhs.imag(), c.rhs.real(),
                          c.rhs.imag(), c.abs_err, c.rel_err, std::string(c.pass ? "pass" : "fail")});
        if (!c.pass) {
            ++t.failures;
        }
        if (diagnostics && !c.error.empty()) {
            diagnostics->push_back(c.case_id + ": " + c.error);
        }
    }
    return t;
}

/// Taylor-route vs quadrature-route moments; rel_err is |difference| / max(1, |m_taylor|).
inline Table moments_table(const RunConfig &cfg, std::vector<std::string> *diagnostics = nullptr)
{
    struct Item {
        int n;
        double k;
    };
    std::vector<Item> items;
    for (double k : detail::grid_or(cfg.k_grid, {0.3, 0.6, 0.9})) {
        for (int n = 0; n <= cfg.moments_max; ++n) {
            items.push_back({n, k});
        }
    }
    const double tol = detail::threshold(cfg, 1e-7);
    struct Out {
        double taylor = std::numeric_limits<double>::quiet_NaN();
        double quad = std::numeric_limits<double>::quiet_NaN();
        std::string error;
    };
    const auto outs = run_indexed<Out>(items.size(), cfg.jobs, [&](std::size_t i) {
        Out o;
        try {
            o.taylor = moments_from_taylor(items[i].n, items[i].k);
            o.quad = moment_quadrature(items[i].n, modulus_data(items[i].k), cfg.quad);
        } catch (const std::exception &e) {
            o.error = e.what();
        }
        return o;
    });

    Table t{"moments", {"n", "k", "m_taylor", "m_quadrature", "rel_err", "status"}, {}, 0};
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto &o = outs[i];
        const double scale = std::max(1.0, std::abs(o.taylor));
        const double rel = std::abs(o.quad - o.taylor) / scale;
        const bool ok = detail::status_ok(rel, tol);
        t.rows.push_back({static_cast<long long>(items[i].n), items[i].k, o.taylor, o.quad, rel,
                          std::string(ok ? "pass" : "fail")});
        if (!ok) {
            ++t.failures;
        }
        if (diagnostics && !o.error.empty()) {
            diagnostics->push_back("moments n=" + std::to_string(items[i].n) + ": " + o.error);
        }
    }
    return t;
}

/// The mystery weight and the family w(x; t, gamma) on a uniform x grid.
inline Table weights_table(const RunConfig &cfg)
{
    Table t{"weights", {"k", "x", "mystery", "w_canonical"}, {}, 0};
    for (const auto &p : cfg.weight_params) {
        t.columns.push_back("w_t=" + detail::fmt_g(p.t) + "_gamma=" + detail::fmt_g(p.gamma));
    }
    t.columns.push_back("status");
    const double tol = detail::threshold(cfg, 1e-12);
    for (double k : detail::grid_or(cfg.k_grid, {0.6})) {
        const auto m = modulus_data(k);
        const auto canon = canonical_params(m).weight();
        for (int i = 0; i < cfg.x_points; ++i) {
            const double x = cfg.x_min + (cfg.x_max - cfg.x_min) * i / (cfg.x_points - 1);
            const double mw = mystery_weight(x, m);
            const double wc = weight_w(x, canon, m);
            std::vector<Cell> row{k, x, mw, wc};
            bool ok = mw > 0.0 && wc > 0.0 && std::abs(wc - mw) <= tol * mw;
            for (const auto &p : cfg.weight_params) {
                const double w = weight_w(x, p, m);
                ok = ok && w > 0.0;
                row.emplace_back(w);
            }
            row.emplace_back(std::string(ok ? "pass" : "fail"));
            if (!ok) {
                ++t.failures;
            }
            t.rows.push_back(std::move(row));
        }
    }
    return t;
}

/// The five stage values of the theta chain and sn/cd, per (v, k).
inline Table theta_chain_table(const RunConfig &cfg, std::vector<std::string> *diagnostics = nullptr)
{
    struct Item {
        double v;
        double k;
    };
    std::vector<Item> items;
    std::vector<double> vs = cfg.v_grid;
    for (double k : detail::grid_or(cfg.k_grid, {0.2, 0.5, 0.8})) {
        for (double v : vs) {
            items.push_back({v, k});
        }
    }
    struct Out {
        std::array<std::complex<double>, 5> stages{};
        std::complex<double> sncd{std::numeric_limits<double>::quiet_NaN(), 0.0};
        double dev = std::numeric_limits<double>::quiet_NaN();
        std::string error;
    };
    const auto outs = run_indexed<Out>(items.size(), cfg.jobs, [&](std::size_t i) {
        Out o;
        try {
            const auto m = modulus_data(items[i].k);
            for (int s = 0; s < 5; ++s) {
                o.stages[static_cast<std::size_t>(s)] = chain_expression(s, items[i].v, m);
            }
            o.dev = 0.0;
            for (std::size_t a = 0; a < 5; ++a) {
                for (std::size_t b = a + 1; b < 5; ++b) {
                    o.dev = std::max(o.dev, std::abs(o.stages[a] - o.stages[b]));
                }
            }
            o.sncd = sn_over_cd(items[i].v * std::complex<double>(m.K, m.K_prime) / 2.0, m);
        } catch (const std::exception &e) {
            o.error = e.what();
        }
        return o;
    });

    Table t{"theta-chain", {"v", "k"}, {}, 0};
    for (int s = 0; s < 5; ++s) {
        t.columns.push_back("stage" + std::to_string(s) + "_re");
        t.columns.push_back("stage" + std::to_string(s) + "_im");
    }
    for (const char *c : {"sncd_re", "sncd_im", "max_dev", "status"}) {
        t.columns.emplace_back(c);
    }
    const double tol_chain = detail::threshold(cfg, 1e-11);
    const double tol_bridge = detail::threshold(cfg, 1e-10);
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto &o = outs[i];
        std::vector<Cell> row{items[i].v, items[i].k};
        for (const auto &s : o.stages) {
            row.emplace_back(s.real());
            row.emplace_back(s.imag());
        }
        const bool ok = o.error.empty() && detail::status_ok(o.dev, tol_chain * (1.0 + std::abs(o.stages[4])))
                        && detail::status_ok(std::abs(o.stages[4] - o.sncd), tol_bridge);
        row.emplace_back(o.sncd.real());
        row.emplace_back(o.sncd.imag());
        row.emplace_back(o.dev);
        row.emplace_back(std::string(ok ? "pass" : "fail"));
        if (!ok) {
            ++t.failures;
        }
        if (diagnostics && !o.error.empty()) {
            diagnostics->push_back("theta-chain v=" + detail::fmt_g(items[i].v) + ": " + o.error);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

// --- Config file -----------------------------------------------------------

namespace detail
{

inline std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string &s, const std::string &what)
{
    try {
        std::size_t pos = 0;
        const double d = std::stod(s, &pos);
        if (trim(s.substr(pos)).empty()) {
            return d;
        }
    } catch (const std::exception &) {
    }
    throw config_error("cannot parse '" + s + "' as a number for " + what);
}

inline int parse_int(const std::string &s, const std::string &what)
{
    const double d = parse_double(s, what);
    if (d != std::floor(d) || std::abs(d) > 1e9) {
        throw config_error("expected an integer for " + what + ", got '" + s + "'");
    }
    return static_cast<int>(d);
}

inline std::vector<std::string> split(const std::string &s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream iss(s);
    while (std::getline(iss, cur, sep)) {
        cur = trim(cur);
        if (!cur.empty()) {
            out.push_back(cur);
        }
    }
    return out;
}

inline std::pair<double, double> parse_pair(const std::string &s, const std::string &what)
{
    const auto parts = split(s, ':');
    if (parts.size() != 2) {
        throw config_error("expected 'x:y' for " + what + ", got '" + s + "'");
    }
    return {parse_double(parts[0], what), parse_double(parts[1], what)};
}

} // namespace detail

/// Comma-separated list of numbers.
inline std::vector<double> parse_list(const std::string &s, const std::string &what)
{
    std::vector<double> out;
    for (const auto &p : detail::split(s, ',')) {
        out.push_back(detail::parse_double(p, what));
    }
    if (out.empty()) {
        throw config_error("empty list for " + what);
    }
    return out;
}

/**
 * Applies a key = value configuration with [section] headers:
 *
 *   [general]     format, out, jobs, tol, k, moments_max, suite
 *   [verify]      u (a:b pairs), v, zeta
 *   [weights]     params (t:gamma pairs), x_min, x_max, points
 *   [quadrature]  rel_tol, abs_tol, max_level, tail_cut, pole_margin
 *
 * '#' and ';' start comments. Unknown sections or keys are errors.
 */
inline void apply_config_text(const std::string &text, RunConfig &cfg, const std::string &origin = "config")
{
    std::istringstream in(text);
    std::string line;
    std::string section = "general";
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = detail::trim(line);
        if (line.empty()) {
            continue;
        }
        const std::string where = origin + ":" + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw config_error(where + ": malformed section header");
            }
            section = detail::trim(line.substr(1, line.size() - 2));
            if (section != "general" && section != "verify" && section != "weights" && section != "quadrature") {
                throw config_error(where + ": unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw config_error(where + ": expected key = value");
        }
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        const std::string what = where + " " + key;

        if (section == "general") {
            if (key == "format") {
                cfg.format = parse_format(val);
            } else if (key == "out") {
                cfg.out = val;
            } else if (key == "jobs") {
                cfg.jobs = detail::parse_int(val, what);
            } else if (key == "tol") {
                cfg.tol = detail::parse_double(val, what);
            } else if (key == "k") {
                cfg.k_grid = parse_list(val, what);
            } else if (key == "moments_max") {
                cfg.moments_max = detail::parse_int(val, what);
            } else if (key == "suite") {
                cfg.suite = parse_suite(val);
            } else {
                throw config_error(where + ": unknown key '" + key + "' in [general]");
            }
        } else if (section == "verify") {
            if (key == "u") {
                cfg.u_grid.clear();
                for (const auto &p : detail::split(val, ',')) {
                    const auto [a, b] = detail::parse_pair(p, what);
                    cfg.u_grid.push_back({a, b});
                }
            } else if (key == "v") {
                cfg.v_grid = parse_list(val, what);
            } else if (key == "zeta") {
                cfg.zeta_grid = parse_list(val, what);
            } else {
                throw config_error(where + ": unknown key '" + key + "' in [verify]");
            }
        } else if (section == "weights") {
            if (key == "params") {
                cfg.weight_params.clear();
                for (const auto &p : detail::split(val, ',')) {
                    const auto [t, g] = detail::parse_pair(p, what);
                    cfg.weight_params.push_back({t, g});
                }
            } else if (key == "x_min") {
                cfg.x_min = detail::parse_double(val, what);
            } else if (key == "x_max") {
                cfg.x_max = detail::parse_double(val, what);
            } else if (key == "points") {
                cfg.x_points = detail::parse_int(val, what);
            } else {
                throw config_error(where + ": unknown key '" + key + "' in [weights]");
            }
        } else {
            if (key == "rel_tol") {
                cfg.quad.rel_tol = detail::parse_double(val, what);
            } else if (key == "abs_tol") {
                cfg.quad.abs_tol = detail::parse_double(val, what);
            } else if (key == "max_level") {
                cfg.quad.max_level = detail::parse_int(val, what);
            } else if (key == "tail_cut") {
                cfg.quad.tail_cut = detail::parse_double(val, what);
            } else if (key == "pole_margin") {
                cfg.quad.pole_margin = detail::parse_double(val, what);
            } else {
                throw config_error(where + ": unknown key '" + key + "' in [quadrature]");
            }
        }
    }
}

inline void apply_config_file(const std::string &path, RunConfig &cfg)
{
    std::ifstream in(path);
    if (!in) {
        throw config_error("cannot read config file '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    apply_config_text(ss.str(), cfg, path);
}

/// Tables for the selected suite, in a fixed order.
inline std::vector<Table> run_suite(const RunConfig &cfg, std::vector<std::string> *diagnostics = nullptr)
{
    std::vector<Table> out;
    const bool all = cfg.suite == Suite::all;
    if (all || cfg.suite == Suite::verify) {
        out.push_back(verify_table(cfg, diagnostics));
    }
    if (all || cfg.suite == Suite::moments) {
        out.push_back(moments_table(cfg, diagnostics));
    }
    if (all || cfg.suite == Suite::weights) {
        out.push_back(weights_table(cfg));
    }
    if (all || cfg.suite == Suite::theta_chain) {
        out.push_back(theta_chain_table(cfg, diagnostics));
    }
    return out;
}

} // namespace mystery::harness

#endif
