#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>

#include <mystery/harness.hpp>

namespace
{

namespace h = mystery::harness;

bool use_color()
{
    return std::getenv("NO_COLOR") == nullptr && isatty(STDERR_FILENO);
}

std::string extension(h::Format f)
{
    return f == h::Format::csv ? ".csv" : ".json";
}

void write_file(const std::filesystem::path &path, const h::Table &t, h::Format f)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw h::config_error("cannot open output file '" + path.string() + "'");
    }
    h::write_table(t, f, os);
    os.flush();
    if (!os) {
        throw h::config_error("error writing output file '" + path.string() + "'");
    }
}

void emit(const std::vector<h::Table> &tables, const h::RunConfig &cfg)
{
    if (!cfg.out.empty()) {
        if (cfg.suite == h::Suite::all) {
            const std::filesystem::path dir(cfg.out);
            std::error_code ec;
            std::filesystem::create_directories(dir, ec);
            if (ec) {
                throw h::config_error("cannot create output directory '" + dir.string() + "': " + ec.message());
            }
            for (const auto &t : tables) {
                write_file(dir / (t.name + extension(cfg.format)), t, cfg.format);
            }
        } else {
            write_file(cfg.out, tables.front(), cfg.format);
        }
        return;
    }
    if (cfg.format == h::Format::json && tables.size() > 1) {
        std::cout << "{\n";
        for (std::size_t i = 0; i < tables.size(); ++i) {
            std::cout << h::json_string(tables[i].name) << ":\n";
            h::write_json(tables[i], std::cout);
            if (i + 1 < tables.size()) {
                std::cout << ",\n";
            }
        }
        std::cout << "}\n";
        return;
    }
    for (std::size_t i = 0; i < tables.size(); ++i) {
        if (i > 0) {
            std::cout << '\n';
        }
        h::write_table(tables[i], cfg.format, std::cout);
    }
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Runs the elliptic-function verification suites and writes CSV or JSON reports."};

    std::optional<std::string> config_path, suite, k_list, format, out;
    std::optional<int> moments_max, jobs;
    std::optional<double> tol;
    app.add_option("--config", config_path, "Configuration file (key = value, [section] headers)");
    app.add_option("--suite", suite, "verify|moments|weights|theta-chain|all");
    app.add_option("--k", k_list, "Comma-separated moduli in (0, 1)");
    app.add_option("--moments-max", moments_max, "Highest moment order (<= 12)");
    app.add_option("--tol", tol, "Override every pass threshold");
    app.add_option("--format", format, "csv|json");
    app.add_option("--out", out, "Output file, or directory for --suite all");
    app.add_option("--jobs", jobs, "Worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return 2;
    }

    h::RunConfig cfg;
    std::vector<h::Table> tables;
    std::vector<std::string> diagnostics;
    try {
        if (config_path) {
            h::apply_config_file(*config_path, cfg);
        }
        if (suite) cfg.suite = h::parse_suite(*suite);
        if (k_list) cfg.k_grid = h::parse_list(*k_list, "--k");
        if (moments_max) cfg.moments_max = *moments_max;
        if (tol) cfg.tol = *tol;
        if (format) cfg.format = h::parse_format(*format);
        if (out) cfg.out = *out;
        if (jobs) cfg.jobs = *jobs;
        cfg.validate();

        tables = h::run_suite(cfg, &diagnostics);
        emit(tables, cfg);
    } catch (const h::config_error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    for (const auto &d : diagnostics) {
        std::cerr << d << '\n';
    }
    const bool color = use_color();
    std::size_t failures = 0;
    for (const auto &t : tables) {
        failures += t.failures;
        const char *tag = t.failures == 0 ? "PASS" : "FAIL";
        if (color) {
            std::cerr << (t.failures == 0 ? "\033[32m" : "\033[31m") << tag << "\033[0m";
        } else {
            std::cerr << tag;
        }
        std::cerr << ' ' << t.name << ": " << t.rows.size() << " rows, " << t.failures << " failed\n";
    }
    return failures == 0 ? 0 : 1;
}
