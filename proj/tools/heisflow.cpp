// heisflow <subcommand> [--config FILE] [--section.key VALUE ...] --out DIR
//
// Exit status: 0 all checks passed, 1 a check failed, 2 configuration error,
// 3 numerical failure (the failing stage is named in manifest.json).

#include <cstdlib>
#include <iostream>
#include <map>
#include <memory>

#include "CLI11.hpp"
#include "commands.hpp"
#include "heisflow/common.hpp"

namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Invocation {
    heisflow::cli::Config cfg;
    std::string config_file;
    std::string out = "heisflow_out";
    std::map<std::string, std::string> flags;
};

int execute(const heisflow::cli::Command& cmd, Invocation& inv, CLI::App& sub) {
    using namespace heisflow;
    std::unique_ptr<cli::Run> run;
    try {
        if (!inv.config_file.empty()) inv.cfg.load_file(inv.config_file);
        for (const auto& [key, value] : inv.flags)
            if (sub.get_option("--" + key)->count() > 0) inv.cfg.set(key, value, "flag");
        if (const char* env = std::getenv("HEISFLOW_WORKERS")) inv.cfg.set("run.workers", env, "env");
        std::size_t workers = inv.cfg.count("run.workers");
        run = std::make_unique<cli::Run>(cmd.name, inv.cfg, inv.out, workers);
        cmd.run(*run);
    } catch (const ConfigError& e) {
        std::cerr << "heisflow " << cmd.name << ": configuration error: " << e.what() << '\n';
        if (run) run->write_manifest("config_error", e.what());
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::cerr << "heisflow " << cmd.name << ": numerical failure in " << (run ? run->stage() : "setup") << ": "
                  << e.what() << '\n';
        if (run) run->write_manifest("numerical_error", e.what());
        return kExitNumerical;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "heisflow " << cmd.name << ": " << e.what() << '\n';
        return kExitConfig;
    }
    bool ok = run->passed();
    run->write_manifest(ok ? "pass" : "check_failed");
    std::cout << cmd.name << ": " << (ok ? "all checks passed" : "some checks failed") << " (" << inv.out
              << "/manifest.json)\n";
    return ok ? 0 : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral simulation and orbital-stability diagnostics on the Heisenberg group and the Hardy space"};
    app.require_subcommand(1);
    app.set_version_flag("--version", HEISFLOW_VERSION);

    const auto& cmds = heisflow::cli::commands();
    std::vector<Invocation> invocations(cmds.size());
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < cmds.size(); ++i) {
        auto& inv = invocations[i];
        cmds[i].declare(inv.cfg);
        inv.cfg.declare("run.workers", "1", "worker threads (HEISFLOW_WORKERS overrides)");
        auto* sub = app.add_subcommand(cmds[i].name, cmds[i].description);
        sub->add_option("--config", inv.config_file, "configuration file ([section] key = value)");
        sub->add_option("--out", inv.out, "output directory")->capture_default_str();
        for (const auto& [key, entry] : inv.cfg.entries()) {
            inv.flags[key] = entry.value;
            sub->add_option("--" + key, inv.flags[key], entry.help)->default_str(entry.value);
        }
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }
    for (std::size_t i = 0; i < cmds.size(); ++i)
        if (subs[i]->parsed()) return execute(cmds[i], invocations[i], *subs[i]);
    return kExitConfig;
}
