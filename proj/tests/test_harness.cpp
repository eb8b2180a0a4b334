#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include <mystery/harness.hpp>

using namespace mystery::harness;

namespace
{

std::string csv(const Table &t)
{
    std::ostringstream os;
    write_csv(t, os);
    return os.str();
}

std::size_t column(const Table &t, const std::string &name)
{
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        if (t.columns[i] == name) {
            return i;
        }
    }
    throw std::out_of_range(name);
}

double num(const Cell &c)
{
    return std::get<double>(c);
}

} // namespace

TEST(Format, SeventeenSignificantDigits)
{
    EXPECT_EQ(format_number(1.0), "1.0000000000000000e+00");
    EXPECT_EQ(format_number(-0.56), "-5.6000000000000005e-01");
    EXPECT_EQ(format_number(1e-300), "1.0000000000000000e-300");
    EXPECT_EQ(format_number(0.1), "1.0000000000000001e-01");
    EXPECT_EQ(format_number(std::nan("")), "nan");
    EXPECT_EQ(format_cell_json(Cell{std::nan("")}), "null");
    EXPECT_EQ(format_cell_json(Cell{std::string("a\"b")}), "\"a\\\"b\"");
}

TEST(Format, CsvAndJsonMirrorRows)
{
    Table t{"x", {"a", "b"}, {{1.5, std::string("pass")}, {static_cast<long long>(3), std::string("fail")}}, 1};
    EXPECT_EQ(csv(t), "a,b\n1.5000000000000000e+00,pass\n3,fail\n");
    std::ostringstream js;
    write_json(t, js);
    EXPECT_EQ(js.str(), "[\n  {\"a\": 1.5000000000000000e+00, \"b\": \"pass\"},\n  {\"a\": 3, \"b\": \"fail\"}\n]\n");
}

TEST(Config, DefaultsAreValid)
{
    RunConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    EXPECT_EQ(cfg.u_grid.size(), 25u);
}

TEST(Config, RejectsInvalidValues)
{
    RunConfig cfg;
    cfg.k_grid = {1.5};
    EXPECT_THROW(cfg.validate(), config_error);
    cfg = {};
    cfg.u_grid = {{1.0, 0.0}};
    EXPECT_THROW(cfg.validate(), config_error);
    cfg = {};
    cfg.moments_max = 13;
    EXPECT_THROW(cfg.validate(), config_error);
    cfg = {};
    cfg.tol = 0.0;
    EXPECT_THROW(cfg.validate(), config_error);
    cfg = {};
    cfg.jobs = 0;
    EXPECT_THROW(cfg.validate(), config_error);
    cfg = {};
    cfg.weight_params = {{0.0, -1.0}};
    EXPECT_THROW(cfg.validate(), config_error);
}

TEST(Config, ParsesSections)
{
    RunConfig cfg;
    apply_config_text("# comment\n"
                      "format = json\n"
                      "k = 0.2, 0.4\n"
                      "[verify]\n"
                      "u = 0.1:0.2, -0.5:0 ; trailing\n"
                      "v = 0.3\n"
                      "[weights]\n"
                      "params = 1:2\n"
                      "points = 11\n"
                      "[quadrature]\n"
                      "rel_tol = 1e-10\n",
                      cfg);
    EXPECT_EQ(cfg.format, Format::json);
    EXPECT_EQ(cfg.k_grid, (std::vector<double>{0.2, 0.4}));
    ASSERT_EQ(cfg.u_grid.size(), 2u);
    EXPECT_EQ(cfg.u_grid[1].a, -0.5);
    EXPECT_EQ(cfg.v_grid, (std::vector<double>{0.3}));
    ASSERT_EQ(cfg.weight_params.size(), 1u);
    EXPECT_EQ(cfg.weight_params[0].gamma, 2.0);
    EXPECT_EQ(cfg.x_points, 11);
    EXPECT_EQ(cfg.quad.rel_tol, 1e-10);
    EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, ReportsErrorsWithLocation)
{
    RunConfig cfg;
    try {
        apply_config_text("[verify]\nbogus = 1\n", cfg, "run.ini");
        FAIL();
    } catch (const config_error &e) {
        EXPECT_NE(std::string(e.what()).find("run.ini:2"), std::string::npos);
    }
    EXPECT_THROW(apply_config_text("[nope]\n", cfg), config_error);
    EXPECT_THROW(apply_config_text("k = abc\n", cfg), config_error);
    EXPECT_THROW(apply_config_text("jobs = 1.5\n", cfg), config_error);
    EXPECT_THROW(apply_config_text("[verify]\nu = 0.1\n", cfg), config_error);
    EXPECT_THROW(apply_config_file("/nonexistent/run.ini", cfg), config_error);
    EXPECT_THROW(parse_suite("everything"), config_error);
    EXPECT_THROW(parse_format("xml"), config_error);
}

TEST(Verify, DefaultConfigPasses)
{
    RunConfig cfg;
    std::vector<std::string> diagnostics;
    const auto t = verify_table(cfg, &diagnostics);
    EXPECT_EQ(t.failures, 0u);
    EXPECT_TRUE(diagnostics.empty());
    EXPECT_EQ(t.columns.size(), 12u);
    EXPECT_EQ(t.columns.front(), "case_id");
    EXPECT_EQ(t.columns.back(), "status");
}

TEST(Verify, UnattainableToleranceFailsWithoutThrowing)
{
    RunConfig cfg;
    cfg.tol = 1e-30;
    cfg.k_grid = {0.5};
    Table t;
    EXPECT_NO_THROW(t = verify_table(cfg));
    EXPECT_GT(t.failures, 0u);
}

TEST(Verify, DeterministicAcrossJobCounts)
{
    RunConfig cfg;
    cfg.k_grid = {0.4};
    const auto a = csv(verify_table(cfg));
    cfg.jobs = 3;
    EXPECT_EQ(csv(verify_table(cfg)), a);
}

TEST(Moments, Rows)
{
    RunConfig cfg;
    cfg.k_grid = {1.0 / std::numbers::sqrt2, 0.6};
    const auto t = moments_table(cfg);
    EXPECT_EQ(t.failures, 0u);
    ASSERT_EQ(t.rows.size(), 14u);
    const auto taylor = column(t, "m_taylor");
    const auto quad = column(t, "m_quadrature");
    EXPECT_EQ(num(t.rows[0][taylor]), 1.0);
    EXPECT_NEAR(num(t.rows[0][quad]), 1.0, 1e-10);
    EXPECT_NEAR(num(t.rows[1][taylor]), 0.0, 1e-15);
    EXPECT_NEAR(num(t.rows[1][quad]), 0.0, 1e-10);
}

TEST(Weights, CanonicalColumnAndPositivity)
{
    RunConfig cfg;
    cfg.x_points = 37;
    cfg.k_grid = {0.3};
    const auto t = weights_table(cfg);
    EXPECT_EQ(t.failures, 0u);
    ASSERT_EQ(t.rows.size(), 37u);
    const auto mw = column(t, "mystery");
    const auto wc = column(t, "w_canonical");
    for (const auto &row : t.rows) {
        EXPECT_LE(std::abs(num(row[wc]) - num(row[mw])), 1e-12 * num(row[mw]));
        for (std::size_t i = mw; i + 1 < row.size(); ++i) {
            EXPECT_GT(num(row[i]), 0.0);
        }
    }
}

TEST(ThetaChain, Rows)
{
    RunConfig cfg;
    cfg.k_grid = {0.5};
    const auto t = theta_chain_table(cfg);
    EXPECT_EQ(t.failures, 0u);
    ASSERT_EQ(t.rows.size(), cfg.v_grid.size());
    const auto dev = column(t, "max_dev");
    const auto s4 = column(t, "stage4_re");
    const auto sn = column(t, "sncd_re");
    for (const auto &row : t.rows) {
        EXPECT_LT(num(row[dev]), 1e-11);
        EXPECT_NEAR(num(row[s4]), num(row[sn]), 1e-10);
        if (num(row[0]) == 0.0) {
            for (std::size_t i = 2; i < 12; ++i) {
                EXPECT_EQ(num(row[i]), 0.0);
            }
        }
    }
}

TEST(RunSuite, AllProducesFourTables)
{
    RunConfig cfg;
    cfg.suite = Suite::all;
    cfg.k_grid = {0.6};
    cfg.moments_max = 2;
    const auto tables = run_suite(cfg);
    ASSERT_EQ(tables.size(), 4u);
    EXPECT_EQ(tables[0].name, "verify");
    EXPECT_EQ(tables[3].name, "theta-chain");
}

TEST(RunIndexed, PreservesOrder)
{
    const auto out = run_indexed<int>(100, 4, [](std::size_t i) { return static_cast<int>(i * i); });
    for (std::size_t i = 0; i < out.size(); ++i) {
        EXPECT_EQ(out[i], static_cast<int>(i * i));
    }
}
