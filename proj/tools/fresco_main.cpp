#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fresco/config.hpp"
#include "fresco/pipeline.hpp"

namespace {

struct GlobalArgs {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool out_set = false;
};

fresco::RunConfig resolve_config(const GlobalArgs& g) {
    fresco::RunConfig cfg =
        g.config_path.empty() ? fresco::default_run_config() : fresco::load_run_config(g.config_path);
    if (g.seed_set) cfg.master_seed = g.seed;
    if (g.out_set) cfg.out_dir = g.out_dir;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Microgrid battery-control simulation pipeline"};
    app.require_subcommand(1);
    // Accept the global flags after the subcommand too.
    app.fallthrough();

    GlobalArgs g;
    app.add_option("--config", g.config_path, "JSON run configuration (default: built-in fleet)");
    app.add_option("--seed", g.seed, "Override the master seed")->each([&](const std::string&) {
        g.seed_set = true;
    });
    app.add_option("--out", g.out_dir, "Override the output directory")
        ->each([&](const std::string&) { g.out_set = true; });

    int days = 0;
    CLI::App* generate = app.add_subcommand("generate", "Write per-household day CSVs + manifest");
    generate->add_option("--days", days, "Days per household (default: config eval_days)");

    std::string mode = "federated";
    CLI::App* train = app.add_subcommand("train", "Train the household agents");
    train->add_option("--mode", mode, "federated or isolated")
        ->check(CLI::IsMember({"federated", "isolated"}));

    app.add_subcommand("baseline", "Solve the perfect-foresight dispatch per household/day");
    app.add_subcommand("evaluate", "Score base, isolated, and federated policies");
    app.add_subcommand("report", "Emit the comparison table and delta metrics");

    CLI11_PARSE(app, argc, argv);

    try {
        fresco::RunConfig cfg = resolve_config(g);
        if (generate->parsed())
            return fresco::cmd_generate(cfg, days > 0 ? days : cfg.eval_days, std::cerr);
        if (train->parsed()) return fresco::cmd_train(cfg, mode, std::cerr);
        if (app.get_subcommand("baseline")->parsed()) return fresco::cmd_baseline(cfg, std::cerr);
        if (app.get_subcommand("evaluate")->parsed()) return fresco::cmd_evaluate(cfg, std::cerr);
        if (app.get_subcommand("report")->parsed()) return fresco::cmd_report(cfg, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
