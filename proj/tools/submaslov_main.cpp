#include <clocale>
#include <iostream>

#include "CLI11.hpp"
#include "submaslov/config.hpp"
#include "submaslov/report.hpp"

namespace {

using namespace submaslov;

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitNumericalFailure = 3;

int run_command(const std::string& config_path) {
    RunConfig cfg;
    Scenario sc;
    try {
        cfg = load_config_file(config_path);
        apply_env_overrides(cfg);
        sc = cfg.instantiate();
    } catch (const Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }

    ScenarioResult result;
    try {
        VerifyOptions opts = cfg.verify;
        opts.causal_checks = sc.causal;
        result = verify_main_theorem(sc.spec, sc.seed, sc.base_P, opts);
        result.name = sc.name;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumericalFailure;
    }

    try {
        if (!cfg.csv_path.empty()) write_file_atomic(cfg.csv_path, render_csv(result));
        if (!cfg.summary_path.empty())
            write_file_atomic(cfg.summary_path, render_summary(result));
        if (!cfg.json_path.empty()) write_file_atomic(cfg.json_path, render_json(result));
    } catch (const Error& e) {
        std::cerr << "output error: " << e.what() << "\n";
        return kExitNumericalFailure;
    }
    std::cout << render_summary(result);

    bool clusters = false;
    for (const auto& in : result.report_total.instants) clusters |= in.cluster;
    for (const auto& in : result.report_base.instants) clusters |= in.cluster;
    if (clusters) {
        std::cerr << "numerical failure: unresolved focal cluster\n";
        return kExitNumericalFailure;
    }
    return result.pass ? kExitPass : kExitCheckFailure;
}

int check_command(const std::string& config_path) {
    try {
        RunConfig cfg = load_config_file(config_path);
        apply_env_overrides(cfg);
        (void)cfg.instantiate();
    } catch (const Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }
    std::cout << "config ok\n";
    return kExitPass;
}

int fuzz_command(int count, std::uint64_t seed, int steps, const std::string& out_dir) {
    int failures = 0;
    for (int i = 0; i < count; ++i) {
        const std::uint64_t case_seed = seed + std::uint64_t(i);
        std::string repro;
        Scenario sc = random_stationary_scenario(case_seed, steps, &repro);
        bool pass = false;
        std::string why;
        try {
            const ScenarioResult res = verify_main_theorem(sc.spec, sc.seed, sc.base_P);
            pass = res.pass;
            if (!pass) {
                for (const auto& c : res.checks)
                    if (!c.pass) why += (why.empty() ? "" : ", ") + c.name;
            }
        } catch (const Error& e) {
            why = e.what();
        }
        if (pass) {
            std::cout << "case " << case_seed << ": pass\n";
        } else {
            ++failures;
            const std::string path =
                (out_dir.empty() ? std::string() : out_dir + "/") +
                "fuzz-fail-" + std::to_string(case_seed) + ".cfg";
            write_file_atomic(path, repro);
            std::cout << "case " << case_seed << ": FAIL (" << why << "), reproduction config: "
                      << path << "\n";
        }
    }
    std::cout << (count - failures) << "/" << count << " cases passed\n";
    return failures == 0 ? kExitPass : kExitCheckFailure;
}

} // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");
    CLI::App app{"Maslov indices and focal points of horizontal geodesics in "
                 "semi-Riemannian submersions"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "run a scenario from a config file");
    run->add_option("config", config_path, "config file")->required();

    auto* check = app.add_subcommand("check", "validate a config file without running");
    check->add_option("config", config_path, "config file")->required();

    auto* list = app.add_subcommand("list-scenarios", "print the built-in scenario names");

    int fuzz_count = 10;
    std::uint64_t fuzz_seed = 1;
    int fuzz_steps = 2000;
    std::string fuzz_out;
    auto* fuzz = app.add_subcommand("fuzz", "randomized stationary-spacetime sweeps");
    fuzz->add_option("count", fuzz_count, "number of cases")->required();
    fuzz->add_option("--seed", fuzz_seed, "base seed");
    fuzz->add_option("--steps", fuzz_steps, "integration steps per case");
    fuzz->add_option("--out", fuzz_out, "directory for failure reproduction configs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitConfigError;
    }

    try {
        if (run->parsed()) return run_command(config_path);
        if (check->parsed()) return check_command(config_path);
        if (list->parsed()) {
            for (const auto& n : submaslov::builtin_scenario_names()) std::cout << n << "\n";
            return kExitPass;
        }
        if (fuzz->parsed()) return fuzz_command(fuzz_count, fuzz_seed, fuzz_steps, fuzz_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumericalFailure;
    }
    return kExitConfigError;
}
