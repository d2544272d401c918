// Command-line front end for the ecodamp library. One experiment per
// invocation; every run leaves a manifest plus its artifacts under --out.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ecodamp/cli.hpp"

namespace {

std::string default_out_root() {
    const char* env = std::getenv("ECODAMP_OUT_ROOT");
    return env && *env ? env : "runs";
}

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::string preset;
    std::string resume;
    int workers = 0;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_resume) {
    cmd->add_option("--config", args.config_path, "configuration file (key = value lines)");
    cmd->add_option("--out", args.out_dir, "output directory (default: $ECODAMP_OUT_ROOT/<command>)");
    cmd->add_option("--preset", args.preset,
                    "named preset: fig2-uniform, fig4-gaussian, fig9-perturbed-equilibrium, "
                    "chaos-pair, area-square, area-circle");
    cmd->add_option("--workers", args.workers, "worker threads for sweeps and bisections");
    cmd->add_option("--override", args.overrides, "key=value override, repeatable")->take_all();
    if (with_resume) cmd->add_option("--resume", args.resume, "checkpoint snapshot to continue from");
}

ecodamp::RunConfig build_config(const std::string& command, const CommonArgs& args) {
    ecodamp::RunConfig cfg;
    if (!args.preset.empty()) cfg = ecodamp::preset_config(args.preset);
    if (!args.config_path.empty()) {
        std::ifstream is(args.config_path);
        if (!is) throw ecodamp::ConfigError("cannot open config file '" + args.config_path + "'");
        std::stringstream ss;
        ss << is.rdbuf();
        cfg = ecodamp::parse_config(ss.str(), cfg);
    }
    for (const std::string& kv : args.overrides) ecodamp::apply_override(cfg, kv);
    cfg.command = command;
    if (args.workers > 0) cfg.workers = args.workers;
    if (!args.out_dir.empty())
        cfg.output.dir = args.out_dir;
    else if (cfg.output.dir.empty())
        cfg.output.dir = default_out_root() + "/" + command;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ecodamp: invasive food-chain reaction-diffusion laboratory"};
    app.require_subcommand(1);

    struct Sub {
        const char* name;
        const char* help;
        bool with_resume;
    };
    const Sub subs[] = {
        {"simulate", "integrate one configuration and store snapshots/series", true},
        {"sweep", "blow-up time versus refuge size over experiment.a_values", false},
        {"critical", "bisect the critical refuge size inside the bracket", false},
        {"critical-v0", "critical refuge size versus initial v0 with a log fit", false},
        {"area", "bisect the critical 2-D refuge area (square or circle)", false},
        {"stability", "interior equilibrium, Jacobian, and existence bounds", false},
        {"dispersion", "dispersion-relation sweep and pattern classification", false},
        {"chaos", "twin-run divergence rate diagnostics", false},
    };

    std::vector<std::pair<CLI::App*, CommonArgs>> parsed;
    parsed.reserve(std::size(subs));
    for (const Sub& s : subs) {
        CLI::App* cmd = app.add_subcommand(s.name, s.help);
        parsed.emplace_back(cmd, CommonArgs{});
        add_common(cmd, parsed.back().second, s.with_resume);
    }

    CLI11_PARSE(app, argc, argv);

    for (auto& [cmd, args] : parsed) {
        if (!cmd->parsed()) continue;
        try {
            ecodamp::RunConfig cfg = build_config(cmd->get_name(), args);
            return ecodamp::run_command(cfg, args.resume, std::cout);
        } catch (const std::exception& e) {
            std::cerr << "ecodamp " << cmd->get_name() << ": " << e.what() << "\n";
            return ecodamp::exit_code_for(e);
        }
    }
    return 1;
}
