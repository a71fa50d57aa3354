#include "levyfp/commands.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace levyfp;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kSolver = 3, kIo = 4 };

struct Source {
    std::string config;
    int figure = 0;
    std::string recipe;
    std::string mode;

    void add_to(CLI::App* app) {
        app->add_option("--config", config, "Scenario file");
        app->add_option("--figure", figure, "Shipped recipe for figure N")->check(CLI::Range(1, 9));
        app->add_option("--recipe", recipe, "Shipped recipe by name (fig1..fig9, table1)");
        app->add_option("--mode", mode, "Operator application: fast or dense")
            ->check(CLI::IsMember({"fast", "dense"}));
    }

    [[nodiscard]] std::vector<ScenarioConfig> load() const {
        const int given = !config.empty() + (figure != 0) + !recipe.empty();
        if (given != 1) throw ConfigError("", "give exactly one of --config, --figure, --recipe");
        std::vector<ScenarioConfig> cases;
        if (!config.empty()) {
            cases = load_scenarios(config);
        } else {
            const std::string name = figure != 0 ? "fig" + std::to_string(figure) : recipe;
            const auto text = builtin_recipe(name);
            if (!text) throw ConfigError("", "no shipped recipe named '" + name + "'");
            cases = parse_scenarios(*text);
        }
        if (!mode.empty()) {
            for (auto& c : cases) c.mode = mode == "dense" ? ApplyMode::dense : ApplyMode::fast;
        }
        return cases;
    }
};

int run_main(int argc, char** argv) {
    CLI::App app{"Fokker-Planck solver for SDEs driven by asymmetric alpha-stable Levy noise"};
    app.require_subcommand(1);

    Source run_src, conv_src, bench_src, check_src;
    std::string out_dir;
    int workers = 0;
    std::vector<int> conv_J{250, 500, 1000};
    std::vector<int> bench_J{100, 200, 400, 800};
    std::vector<std::string> bench_modes{"dense", "fast"};
    int bench_steps = 20;
    int bench_rounds = 3;

    auto* run_cmd = app.add_subcommand("run", "Integrate every case and write CSV snapshots and reports");
    run_src.add_to(run_cmd);
    run_cmd->add_option("--out", out_dir, "Output directory (default: output.dir of each case)");
    run_cmd->add_option("--workers", workers, "Concurrent runs (default: $LEVYFP_WORKERS or all cores)");

    auto* conv_cmd = app.add_subcommand("convergence", "Errors against the exact or a 4x finer solution");
    conv_src.add_to(conv_cmd);
    conv_cmd->add_option("--J", conv_J, "Resolutions, ascending")->delimiter(',');
    conv_cmd->add_option("--out", out_dir, "Directory for convergence CSV tables");
    conv_cmd->add_option("--workers", workers, "Concurrent runs");

    auto* bench_cmd = app.add_subcommand("bench", "Per-step timings of the fast and direct operator");
    bench_src.add_to(bench_cmd);
    bench_cmd->add_option("--J", bench_J, "Resolutions, ascending")->delimiter(',');
    bench_cmd->add_option("--modes", bench_modes, "Modes to time")->delimiter(',')->check(
        CLI::IsMember({"fast", "dense"}));
    bench_cmd->add_option("--steps", bench_steps, "Timed steps per round")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--rounds", bench_rounds, "Interleaved rounds")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--out", out_dir, "Directory for bench CSV tables");

    auto* check_cmd = app.add_subcommand("check", "Report the maximum-principle margin, min m2 over the nodes");
    check_src.add_to(check_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*run_cmd) {
            const auto cases = run_src.load();
            const auto reports = cmd_run(cases, out_dir, resolve_workers(workers));
            for (const auto& r : reports) {
                std::printf("%s: %ld steps, %.3f s, final mass %.6f, min %.3e, margin %.4f\n", r.name.c_str(), r.steps,
                            r.total_seconds, r.snapshots.empty() ? 0.0 : r.snapshots.back().mass, r.global_min,
                            r.max_principle_margin);
                for (const auto& w : r.warnings) std::fprintf(stderr, "warning: %s: %s\n", r.name.c_str(), w.c_str());
            }
        } else if (*conv_cmd) {
            for (const auto& c : conv_src.load()) {
                const auto t = cmd_convergence(c, conv_J, resolve_workers(workers));
                std::printf("== %s\n%s", c.name.c_str(), format_convergence(t).c_str());
                if (!out_dir.empty()) write_text_file(out_dir + "/" + c.name + "_convergence.csv", convergence_csv(t));
                if (!t.monotone) std::fprintf(stderr, "warning: %s: errors are not strictly decreasing\n", c.name.c_str());
            }
        } else if (*bench_cmd) {
            std::vector<ApplyMode> modes;
            for (const auto& m : bench_modes) modes.push_back(m == "dense" ? ApplyMode::dense : ApplyMode::fast);
            for (const auto& c : bench_src.load()) {
                const auto rows = cmd_bench(c, bench_J, modes, bench_steps, bench_rounds);
                std::printf("== %s\n%s", c.name.c_str(), format_bench(rows).c_str());
                if (!out_dir.empty()) write_text_file(out_dir + "/" + c.name + "_bench.csv", bench_csv(rows));
            }
        } else if (*check_cmd) {
            for (const auto& c : check_src.load()) {
                const auto r = cmd_check(c);
                std::printf("%s: margin %.6f (%s), min exit rate %.6f, min f' %.6f\n", c.name.c_str(),
                            r.condition.margin, r.condition.satisfied ? "satisfied" : "not satisfied", r.min_exit_rate,
                            r.min_fprime);
            }
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfig;
    } catch (const StepError& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return kSolver;
    } catch (const IoError& e) {
        std::fprintf(stderr, "i/o failure: %s\n", e.what());
        return kIo;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kFailure;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) { return run_main(argc, argv); }
