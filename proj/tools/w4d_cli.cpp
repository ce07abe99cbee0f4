// w4d — scenario runner.
//
//   w4d <generate|analyze|evolve|reduce|export> CONFIG [--set key.path=value ...] [--out DIR]
//   w4d verify [CONFIG ...] [--out DIR]
//
// Output directory: --out, else $W4D_OUT, else ./w4d_out.  Each scenario writes
// into <out>/<name>/.  Exit status: 0 iff every enabled check passed,
// 1 if a check failed, 2 for configuration errors, 3 for runtime failures.
#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "w4d/core.hpp"
#include "w4d/scenario.hpp"

namespace {

void print_summary(const w4d::RunResult& r) {
    for (const auto& c : r.checks)
        std::printf("%-4s %-48s %.3e (<= %.1e)\n", c.pass ? "ok" : "FAIL", c.name.c_str(), c.value, c.threshold);
    for (const auto& f : r.files) std::printf("wrote %s\n", f.c_str());
    std::printf("%s\n", r.pass ? "PASS" : "FAIL");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Surfaces in 4D from Dirac-type linear systems: scenario runner"};
    app.set_version_flag("--version", std::string(w4d::version()));
    app.require_subcommand(1);
    std::string out_flag;
    app.add_option("--out", out_flag, "output directory (overrides $W4D_OUT)");

    struct Sub {
        w4d::Command cmd;
        std::string config;
        std::vector<std::string> sets;
        CLI::App* app;
    };
    std::vector<Sub> subs;
    const std::pair<const char*, const char*> names[] = {
        {"generate", "build the solution and immerse it"},
        {"analyze", "generate plus curvature, conformality, closedness and class checks"},
        {"evolve", "run the DS-II flow and write the W / C1 series"},
        {"reduce", "1D reductions: AKNS curves, NLS / KdV / mKdV evolutions"},
        {"export", "generate and write OBJ + PLY meshes"},
    };
    subs.reserve(6);
    for (auto [n, help] : names) {
        Sub s{w4d::command_from_string(n), {}, {}, app.add_subcommand(n, help)};
        subs.push_back(std::move(s));
    }
    for (auto& s : subs) {
        s.app->add_option("config", s.config, "scenario config (JSON)")->required()->check(CLI::ExistingFile);
        s.app->add_option("--set", s.sets, "override a config key, e.g. --set grid.n=256 (applied in order)");
    }
    std::vector<std::string> verify_configs;
    auto* verify = app.add_subcommand("verify", "run the invariant suite, or the checks of the given configs");
    verify->add_option("configs", verify_configs, "scenario configs (default: built-in suite)")->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);
    const std::string out = w4d::resolve_out_dir(out_flag);

    try {
        if (verify->parsed()) {
            if (verify_configs.empty()) {
                const auto r = w4d::run_verify(out);
                print_summary(r);
                return r.pass ? 0 : 1;
            }
            bool pass = true;
            for (const auto& path : verify_configs) {
                const auto cfg = w4d::load_config(path);
                const std::string fam = cfg.value("family", std::string());
                const auto cmd = fam == "reduction"  ? w4d::Command::reduce
                                 : fam == "periodic" ? w4d::Command::evolve
                                                     : w4d::Command::analyze;
                const auto r = w4d::run_scenario(cfg, cmd, out);
                print_summary(r);
                pass = pass && r.pass;
            }
            return pass ? 0 : 1;
        }
        for (auto& s : subs) {
            if (!s.app->parsed()) continue;
            auto cfg = w4d::load_config(s.config);
            for (const auto& kv : s.sets) w4d::apply_override(cfg, kv);
            const auto r = w4d::run_scenario(cfg, s.cmd, out);
            print_summary(r);
            return r.pass ? 0 : 1;
        }
    } catch (const w4d::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 2;
}
