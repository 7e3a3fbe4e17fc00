// Command-line driver: runs experiment pipelines from a JSON config and
// emits CSV/JSON artifacts plus a manifest with content checksums.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "scatlab/experiment.hpp"

namespace {

int run_config(const std::string& config_path, const std::string& out_dir,
               long long seed_override, bool no_cache,
               const std::vector<std::string>& pipeline_filter) {
    std::ifstream is(config_path);
    if (!is) {
        std::cerr << "cannot open config: " << config_path << "\n";
        return 2;
    }
    nlohmann::json j;
    try {
        is >> j;
    } catch (const std::exception& e) {
        std::cerr << "config parse error: " << e.what() << "\n";
        return 2;
    }
    scatlab::ExperimentConfig cfg;
    try {
        cfg = scatlab::ExperimentConfig::from_json(j);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (seed_override >= 0) {
            cfg.mc.seed = static_cast<std::uint64_t>(seed_override);
            cfg.mc.has_seed = true;
        }
        if (no_cache) cfg.use_cache = false;
        if (!pipeline_filter.empty()) cfg.pipelines = pipeline_filter;
        cfg.validate();
    } catch (const std::exception& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return 2;
    }

    const scatlab::RunManifest manifest = scatlab::run_experiment(cfg);
    for (const auto& st : manifest.stages)
        std::printf("[%6.0f ms] %-24s %s%s %s\n", st.wall_ms, st.name.c_str(),
                    st.status.c_str(), st.cached ? " (cached)" : "",
                    st.detail.c_str());
    for (const auto& ck : manifest.checks)
        std::printf("check: %-48s %s (value %.6g)\n", ck.description.c_str(),
                    ck.passed ? "PASS" : "FAIL", ck.value);
    if (manifest.any_stage_failed) {
        std::cerr << "one or more stages failed\n";
        return 2;
    }
    return manifest.all_checks_passed ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"semiclassical scattering eigenphase laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    long long seed_override = -1;
    bool no_cache = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory override");
        sub->add_option("--seed", seed_override, "Monte Carlo seed override");
        sub->add_flag("--no-cache", no_cache, "disable the artifact cache");
    };

    struct Verb {
        const char* name;
        const char* help;
        std::vector<std::string> pipelines;
    };
    const std::vector<Verb> verbs = {
        {"run", "run every pipeline enabled in the config", {}},
        {"phases", "partial-wave eigenphase tables only", {"phases"}},
        {"classical", "classical sojourn pipeline only", {"classical"}},
        {"spectrum2d", "dense 2-D S-matrix pipeline only", {"dense2d"}},
        {"measure", "phases plus measure pairings", {"phases", "spectral"}},
        {"trace", "phases plus trace checks", {"phases", "spectral"}},
        {"report", "full report chain", {"classical", "phases", "spectral"}},
    };
    std::map<std::string, std::vector<std::string>> filter_of;
    for (const auto& v : verbs) {
        CLI::App* sub = app.add_subcommand(v.name, v.help);
        add_common(sub);
        filter_of[v.name] = v.pipelines;
    }

    CLI11_PARSE(app, argc, argv);
    const std::string verb = app.get_subcommands().front()->get_name();
    return run_config(config_path, out_dir, seed_override, no_cache, filter_of[verb]);
}
