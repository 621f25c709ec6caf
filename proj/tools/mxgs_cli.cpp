#include "mxgs/error.hpp"
#include "mxgs/io.hpp"
#include "mxgs/runner.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

namespace {

struct Flags {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
};

int config_error(const std::string& out_dir, const std::string& message) {
    nlohmann::ordered_json e;
    e["status"] = mxgs::kExitConfigError;
    e["kind"] = "config";
    e["message"] = message;
    std::cerr << e.dump() << "\n";
    if (!out_dir.empty()) {
        try {
            std::filesystem::create_directories(out_dir);
            mxgs::write_text_file(std::filesystem::path(out_dir) / "error.json", e.dump(2) + "\n");
        } catch (const std::exception&) {
        }
    }
    return mxgs::kExitConfigError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ground states of -Laplacian u + (-Laplacian)^s u + u = u^{p+1}: solver, spectra, kernels, continuation"};
    app.require_subcommand(1);

    Flags flags;
    const char* names[] = {"solve", "sweep", "spectrum", "kernel", "kato", "decay", "continuation"};
    const char* help[] = {"compute one ground state",
                          "continuation sweep over a list of s values",
                          "lowest eigenpairs of the linearized operator",
                          "heat and resolvent kernel samples",
                          "Kato-class norms of the ground-state potential",
                          "free-space tail and decay exponent fit",
                          "single continuation from s to s_target"};
    for (int i = 0; i < 7; ++i) {
        auto* sub = app.add_subcommand(names[i], help[i]);
        sub->add_option("--config", flags.config, "JSON configuration file");
        sub->add_option("--out", flags.out, "output directory");
        sub->add_option("--seed", flags.seed, "random seed");
        sub->add_option("--threads", flags.threads, "worker threads (fallback: MXGS_THREADS)")->check(CLI::PositiveNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return mxgs::kExitConfigError;
    }

    const std::string experiment = app.get_subcommands().front()->get_name();
    mxgs::RunConfig cfg;
    try {
        mxgs::RunConfig defaults;
        defaults.experiment = mxgs::experiment_from_string(experiment);
        if (const char* env = std::getenv("MXGS_THREADS")) {
            try {
                defaults.threads = std::stoi(env);
            } catch (const std::exception&) {
                throw mxgs::InvalidArgument(std::string("MXGS_THREADS is not an integer: ") + env);
            }
        }
        cfg = defaults;
        if (!flags.config.empty()) {
            if (!std::filesystem::exists(flags.config)) throw mxgs::InvalidArgument("config file not found: " + flags.config);
            cfg = mxgs::parse_config(mxgs::read_text_file(flags.config), defaults);
            if (cfg.experiment != defaults.experiment)
                throw mxgs::InvalidArgument("config experiment '" + mxgs::to_string(cfg.experiment) +
                                            "' does not match subcommand '" + experiment + "'");
        }
        if (!flags.out.empty()) cfg.output_dir = flags.out;
        if (flags.seed) cfg.seed = *flags.seed;
        if (flags.threads) cfg.threads = *flags.threads;
    } catch (const mxgs::Error& e) {
        return config_error(flags.out, e.what());
    }

    const auto outcome = mxgs::run(cfg);
    if (outcome.status != mxgs::kExitOk) {
        std::cerr << "mxgs " << experiment << ": " << outcome.error << "\n";
    } else {
        std::cout << "mxgs " << experiment << ": wrote " << outcome.files.size() << " files to " << cfg.output_dir
                  << " (config " << mxgs::config_hash(cfg) << ")\n";
    }
    return outcome.status;
}
