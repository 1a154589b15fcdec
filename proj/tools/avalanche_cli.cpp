// avalanche - command-line front end for the simulation library.
//
//   avalanche <experiment> [--config file.json] [--out dir] [--seed n] [--threads n] [--plot]
//
// AVALANCHE_OUT and AVALANCHE_THREADS override the defaults of --out and
// --threads; explicit flags win over both.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "avalanche/config.hpp"
#include "avalanche/errors.hpp"
#include "avalanche/experiments.hpp"

namespace {

struct Flags {
    std::string config_path;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    bool plot = false;
};

int report_error(const std::string& kind, const std::string& message) {
    nlohmann::ordered_json j{{"status", "error"}, {"kind", kind}, {"message", message}};
    std::cerr << j.dump(2) << "\n";
    return 2;
}

int run(avalanche::config::Experiment experiment, const Flags& f) {
    using namespace avalanche;
    config::RunConfig cfg;
    if (!f.config_path.empty()) cfg = config::load(f.config_path);
    cfg.experiment = experiment;
    if (f.seed) cfg.seed = *f.seed;

    experiments::RunOptions opt;
    opt.out_dir = cfg.output;
    if (const char* env = std::getenv("AVALANCHE_OUT"); env && *env) opt.out_dir = env;
    if (f.out) opt.out_dir = *f.out;
    opt.threads = 1;
    if (const char* env = std::getenv("AVALANCHE_THREADS"); env && *env) {
        try {
            opt.threads = static_cast<unsigned>(std::stoul(env));
        } catch (const std::exception&) {
            fail(ErrorKind::ValidationError, std::string("AVALANCHE_THREADS is not a number: ") + env);
        }
    }
    if (f.threads) opt.threads = *f.threads;
    opt.threads = resolve_threads(opt.threads);
    opt.plot = f.plot;

    const auto result = experiments::run(cfg, opt);
    nlohmann::ordered_json j{{"status", result.errors.empty() ? "complete" : "partial"},
                             {"experiment", config::to_string(experiment)},
                             {"out", opt.out_dir.string()},
                             {"files", result.files},
                             {"summary", result.summary}};
    std::cout << j.dump(2) << "\n";
    return result.errors.empty() ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bosonic avalanche laser simulation lab"};
    app.set_version_flag("--version", AVALANCHE_VERSION);
    app.require_subcommand(1, 1);

    Flags flags;
    std::optional<avalanche::config::Experiment> chosen;
    for (const auto& [kind, name] : avalanche::config::experiment_names) {
        auto* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
        sub->add_option("--config", flags.config_path, "JSON run configuration")->check(CLI::ExistingFile);
        sub->add_option("--out", flags.out, "output directory (env AVALANCHE_OUT)");
        sub->add_option("--seed", flags.seed, "master seed (overrides the config)");
        sub->add_option("--threads", flags.threads, "worker threads, 0 = all cores (env AVALANCHE_THREADS)");
        sub->add_flag("--plot", flags.plot, "also write SVG plots");
        sub->callback([&chosen, k = kind] { chosen = k; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        return run(*chosen, flags);
    } catch (const avalanche::Error& e) {
        return report_error(std::string(avalanche::to_string(e.kind())), e.what());
    } catch (const std::exception& e) {
        return report_error("InternalError", e.what());
    }
}
