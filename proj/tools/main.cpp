#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "prl/config.hpp"
#include "prl/harness.hpp"

namespace {

// One CLI flag per config key, applied on top of preset and config file.
struct ConfigCli {
    std::string config_path;
    std::string preset;
    std::uint64_t single_seed = 0;
    std::string out;
    std::map<std::string, std::string> raw;
    CLI::App* cmd = nullptr;

    void attach(CLI::App* app) {
        cmd = app;
        app->add_option("--config", config_path, "key = value config file");
        app->add_option("--preset", preset, "named preset: paper-analog, paper-ratio, door");
        app->add_option("--seed", single_seed, "run a single seed (shorthand for --seeds k)");
        app->add_option("--out", out, "output directory (shorthand for --out_dir)");
        prl::RunConfig defaults;
        for (const auto& [key, value] : prl::config_items(defaults)) {
            raw[key];
            app->add_option("--" + key, raw[key], "config key (default: " + value + ")");
        }
    }

    prl::RunConfig build() const {
        prl::RunConfig cfg;
        if (!preset.empty()) prl::apply_preset(cfg, preset);
        if (!config_path.empty()) cfg = prl::load_config_file(config_path, cfg);
        for (const auto& [key, value] : raw) {
            if (cmd->count("--" + key) > 0) prl::set_config_key(cfg, key, value);
        }
        if (cmd->count("--seed") > 0) cfg.seeds = {single_seed};
        if (cmd->count("--out") > 0) cfg.out_dir = out;
        return cfg;
    }
};

void print_final(const prl::Metrics& m) {
    if (m.steps.empty()) return;
    std::printf("%s: step %lld, eval success %.3f, interventions %.0f\n", m.strategy.c_str(),
                static_cast<long long>(m.steps.back()), m.success_mean.back(),
                m.interventions_mean.back());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Persistent goal-conditioned RL lab: curriculum and baseline strategies "
                 "under rationed reset interventions"};
    app.require_subcommand(1);

    ConfigCli run_cfg;
    CLI::App* run = app.add_subcommand("run", "train one strategy and write run artifacts");
    run_cfg.attach(run);

    CLI::App* compare = app.add_subcommand(
        "compare", "aligned learning curves and the interventions table for several runs");
    std::vector<std::string> inputs;
    std::string compare_out = "comparison";
    compare->add_option("--inputs", inputs, "run directories")->required()->expected(-1);
    compare->add_option("--out", compare_out, "output directory");

    ConfigCli ablate_cfg;
    CLI::App* ablate =
        app.add_subcommand("ablate", "episodic teleport-reset variants of the strategies");
    ablate_cfg.attach(ablate);

    CLI::App* trace = app.add_subcommand("trace", "curriculum trace report for a run");
    std::string trace_in;
    std::string trace_out;
    trace->add_option("--input", trace_in, "run directory")->required();
    trace->add_option("--out", trace_out, "output directory (default <input>/trace_report)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            prl::RunConfig cfg = run_cfg.build();
            prl::Metrics metrics = prl::run_experiment(cfg);
            print_final(metrics);
            std::printf("wrote %s\n", cfg.out_dir.c_str());
        } else if (compare->parsed()) {
            std::vector<prl::Metrics> runs;
            runs.reserve(inputs.size());
            for (const std::string& dir : inputs) runs.push_back(prl::load_run_dir(dir));
            prl::emit_summary(runs, compare_out);
            std::printf("wrote %s\n", compare_out.c_str());
        } else if (ablate->parsed()) {
            prl::RunConfig cfg = ablate_cfg.build();
            auto results = prl::run_ablation(cfg);
            for (const auto& [name, metrics] : results) print_final(metrics);
            std::printf("wrote %s\n", cfg.out_dir.c_str());
        } else if (trace->parsed()) {
            std::string out = trace_out.empty()
                                  ? (std::filesystem::path(trace_in) / "trace_report").string()
                                  : trace_out;
            prl::emit_trace_report(trace_in, out);
            std::printf("wrote %s\n", out.c_str());
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
