#include "levyfp/scenario.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace levyfp;

namespace {

std::string expect_config_error(const std::string& text) {
    try {
        (void)parse_scenarios(text);
    } catch (const ConfigError& e) {
        return e.key();
    }
    ADD_FAILURE() << "accepted: " << text;
    return {};
}

std::filesystem::path temp_dir(const std::string& leaf) {
    auto d = std::filesystem::temp_directory_path() / ("levyfp_test_" + leaf);
    std::filesystem::remove_all(d);
    std::filesystem::create_directories(d);
    return d;
}

}  // namespace

TEST(Scenario, MinimalConfigDefaults) {
    const auto c = parse_config("alpha = 0.5\nbeta = 0.5\nJ = 100\nt_final = 1\n");
    EXPECT_EQ(c.params.alpha, 0.5);
    EXPECT_EQ(c.params.beta, 0.5);
    EXPECT_EQ(c.params.epsilon, 1.0);
    EXPECT_EQ(c.params.sigma, 0.0);
    EXPECT_EQ(c.params.b, 1.0);
    EXPECT_EQ(c.J, 100);
    EXPECT_FALSE(c.dt.has_value());
    EXPECT_DOUBLE_EQ(c.resolved_dt(), 0.005);
    EXPECT_EQ(c.bc, BoundaryCondition::absorbing);
    EXPECT_EQ(c.scheme, Scheme::backward_euler);
    EXPECT_EQ(c.solver.kind, LinearSolverKind::matrix_free);
    EXPECT_EQ(c.mode, ApplyMode::fast);
    EXPECT_TRUE(c.snapshots.empty());
    EXPECT_EQ(c.ic.kind, InitialKind::gaussian);
    EXPECT_TRUE(c.warnings.empty());
}

TEST(Scenario, RangeErrorsNameTheKey) {
    EXPECT_EQ(expect_config_error("alpha = 2.5\n"), "alpha");
    EXPECT_EQ(expect_config_error("alpha = 2\nepsilon = 1\n"), "alpha");
    EXPECT_EQ(expect_config_error("beta = -1.5\n"), "beta");
    EXPECT_EQ(expect_config_error("b = 0\n"), "b");
    EXPECT_EQ(expect_config_error("J = 2\n"), "J");
    EXPECT_EQ(expect_config_error("J = ten\n"), "J");
    EXPECT_EQ(expect_config_error("dt = 0.3\nt_final = 1\n"), "t_final");
    EXPECT_EQ(expect_config_error("dt = -1\n"), "dt");
    EXPECT_EQ(expect_config_error("sigma2 = -1\n"), "sigma2");
    EXPECT_EQ(expect_config_error("colour = red\n"), "colour");
    EXPECT_EQ(expect_config_error("bc = reflecting\n"), "bc");
    EXPECT_EQ(expect_config_error("drift = cubic\n"), "drift");
    EXPECT_EQ(expect_config_error("snapshots = 0.123\nt_final = 1\ndt = 0.01\n"), "snapshots");
    EXPECT_EQ(expect_config_error("error.window = 1, 0\n"), "error.window");
    EXPECT_EQ(expect_config_error("dt = 1/0\n"), "dt");
}

TEST(Scenario, AlphaTwoMessagePointsToSigma) {
    try {
        (void)parse_config("alpha = 2\n");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("sigma"), std::string::npos) << e.what();
    }
}

TEST(Scenario, FractionsAndComments) {
    const auto c = parse_config("# header\nJ = 100 # trailing\ndt = 1/1600\n\nt_final = 1\nsigma2 = 0.49\n");
    EXPECT_DOUBLE_EQ(*c.dt, 1.0 / 1600);
    EXPECT_NEAR(c.params.sigma, 0.7, 1e-15);
    EXPECT_EQ(c.stepper().steps(), 1600);
}

TEST(Scenario, SectionsAndSweeps) {
    const auto cases = parse_scenarios("name = s\nalpha = 0.5\nsweep.beta = -0.5, 0.5\n[x]\nJ = 50\n[y]\nJ = 60\n");
    ASSERT_EQ(cases.size(), 4u);
    EXPECT_EQ(cases[0].name, "s_x_beta=-0.5");
    EXPECT_EQ(cases[0].J, 50);
    EXPECT_EQ(cases[0].params.beta, -0.5);
    EXPECT_EQ(cases[1].params.beta, 0.5);
    EXPECT_EQ(cases[3].J, 60);
    EXPECT_THROW((void)parse_config("sweep.beta = 0, 1\n"), ConfigError);
}

TEST(Scenario, Table1RecipeParameters) {
    const auto text = builtin_recipe("table1");
    ASSERT_TRUE(text);
    const auto c = parse_config(*text);
    EXPECT_EQ(c.params.alpha, 0.5);
    EXPECT_EQ(c.params.beta, 0.5);
    EXPECT_EQ(c.params.sigma, 0.0);
    EXPECT_EQ(c.params.epsilon, 1.0);
    EXPECT_TRUE(std::holds_alternative<ZeroDrift>(c.drift.kind()));
    EXPECT_EQ(*c.dt, 1.0 / 1600);
    EXPECT_EQ(c.t_final, 1.0);
    EXPECT_EQ(c.J, 100);
    const auto ic = initial_condition(c, c.grid());
    EXPECT_NEAR(ic[c.grid().node_to_index(0)], std::sqrt(40 / std::numbers::pi), 1e-14);
}

TEST(Scenario, Fig3SnapshotTimes) {
    const auto cases = parse_scenarios(*builtin_recipe("fig3"));
    ASSERT_EQ(cases.size(), 2u);
    EXPECT_EQ(cases[0].params.alpha, 0.5);
    EXPECT_EQ(cases[1].params.alpha, 1.5);
    for (const auto& c : cases) {
        EXPECT_EQ(c.snapshots, (std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5}));
        EXPECT_EQ(c.params.beta, 0.5);
    }
}

TEST(Scenario, Fig5IsFourEntrySweepPerAlpha) {
    const auto cases = parse_scenarios(*builtin_recipe("fig5"));
    ASSERT_EQ(cases.size(), 8u);
    const std::vector<double> s2{0, 0.3, 0.7, 1};
    for (int k = 0; k < 4; ++k) {
        EXPECT_EQ(cases[k].params.alpha, 0.5);
        EXPECT_EQ(cases[k + 4].params.alpha, 1.5);
        EXPECT_NEAR(cases[k].params.sigma * cases[k].params.sigma, s2[k], 1e-15);
    }
}

TEST(Scenario, AllRecipesParse) {
    const auto names = builtin_recipe_names();
    EXPECT_EQ(names.size(), 10u);
    for (const auto& n : names) {
        const auto text = builtin_recipe(n);
        ASSERT_TRUE(text) << n;
        const auto cases = parse_scenarios(*text);
        EXPECT_FALSE(cases.empty()) << n;
        for (const auto& c : cases) EXPECT_NO_THROW(c.stepper().validate()) << c.name;
    }
    EXPECT_FALSE(builtin_recipe("fig10"));
}

TEST(Scenario, TextRoundTrip) {
    for (const auto& n : builtin_recipe_names()) {
        for (const auto& c : parse_scenarios(*builtin_recipe(n))) {
            const auto again = parse_config(to_text(c));
            EXPECT_EQ(to_text(again), to_text(c)) << c.name;
            EXPECT_EQ(again.name, c.name);
            EXPECT_EQ(again.params.alpha, c.params.alpha);
            EXPECT_EQ(again.params.beta, c.params.beta);
            EXPECT_EQ(again.params.sigma, c.params.sigma);
            EXPECT_EQ(again.params.b, c.params.b);
            EXPECT_EQ(again.J, c.J);
            EXPECT_EQ(again.resolved_dt(), c.resolved_dt());
            EXPECT_EQ(again.snapshots, c.snapshots);
            EXPECT_EQ(again.bc, c.bc);
            EXPECT_EQ(again.scheme, c.scheme);
        }
    }
}

TEST(Scenario, Warnings) {
    const auto nat = parse_config("bc = natural\nb = 2\n");
    EXPECT_FALSE(nat.warnings.empty());
    const auto fe = parse_config("scheme = forward_euler\n");
    EXPECT_FALSE(fe.warnings.empty());
    const auto wide = parse_config("bc = natural\nb = 10\n");
    EXPECT_TRUE(wide.warnings.empty());
}

TEST(Scenario, InitialConditions) {
    const auto u = parse_config("ic = uniform\nb = 2\nJ = 100\n");
    for (double v : initial_condition(u, u.grid())) EXPECT_DOUBLE_EQ(v, 0.25);
    const auto l = parse_config("ic = levy_exact\nic.t0 = 0.2\nalpha = 0.5\nbeta = 1\nb = 10\nbc = natural\n");
    const auto vl = initial_condition(l, l.grid());
    const Grid g = l.grid();
    EXPECT_EQ(vl[g.node_to_index(0)], 0.0);
    const double x = 10 * g.node(7);
    EXPECT_NEAR(vl[g.node_to_index(7)], 0.2 * std::pow(x, -1.5) * std::exp(-0.02 / x) / std::sqrt(2 * std::numbers::pi),
                1e-14);
}

TEST(Scenario, FileInputsResolveRelativeToConfig) {
    const auto dir = temp_dir("files");
    {
        std::ofstream(dir / "ic.csv") << "x,p\n-0.5,0\n0,2\n0.5,0\n";
        std::ofstream(dir / "drift.csv") << "x,f,fprime\n-1,1,-1\n1,-1,-1\n";
        std::ofstream(dir / "case.ini") << "J = 10\nic = file:ic.csv\ndrift = table:drift.csv\n";
    }
    const auto cases = load_scenarios((dir / "case.ini").string());
    ASSERT_EQ(cases.size(), 1u);
    const auto& c = cases[0];
    const auto v = initial_condition(c, c.grid());
    EXPECT_DOUBLE_EQ(v[c.grid().node_to_index(0)], 2.0);
    EXPECT_DOUBLE_EQ(v[c.grid().node_to_index(2)], 1.2);
    EXPECT_DOUBLE_EQ(v[c.grid().node_to_index(-8)], 0.0);
    EXPECT_DOUBLE_EQ(c.drift.f(0.25), -0.25);
    EXPECT_THROW((void)load_scenarios((dir / "missing.ini").string()), ConfigError);
    std::filesystem::remove_all(dir);
}
