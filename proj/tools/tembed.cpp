// Command-line driver: configuration-driven pipelines over the t-embedding
// machinery. Exit codes: 0 success, 2 validation failure, 1 error.

#include <CLI11.hpp>
#include <iostream>

#include "tembed/pipeline.hpp"

int main(int argc, char** argv) {
    CLI::App app{"dimer t-embedding toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string config_path, out_dir = "out";
    uint64_t seed = 0;
    bool seed_set = false, paranoid = false;
    app.add_option("--config", config_path, "experiment config (JSON)");
    app.add_option("--out", out_dir, "output directory");
    auto* seed_opt = app.add_option("--seed", seed, "seed override");
    app.add_flag("--paranoid", paranoid, "global overlap checks");

    std::vector<std::string> stages = {"validate", "build-tgraph", "walk",  "couple",
                                       "gff",      "appendix",     "probe", "report"};
    for (const auto& s : stages) app.add_subcommand(s, "run the " + s + " stage");

    CLI11_PARSE(app, argc, argv);
    seed_set = seed_opt->count() > 0;

    try {
        tembed::ExperimentConfig cfg;
        if (!config_path.empty()) cfg = tembed::ExperimentConfig::from_file(config_path);
        if (seed_set) cfg.seed = seed;
        if (app.count("--out") > 0 || cfg.raw.value("out", std::string()).empty())
            cfg.out_dir = out_dir;
        else
            cfg.out_dir = cfg.raw["out"].get<std::string>();
        cfg.paranoid = paranoid;
        for (auto* sub : app.get_subcommands())
            return tembed::run_pipeline(sub->get_name(), cfg);
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
