#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scatlab/classical.hpp"
#include "scatlab/partialwave.hpp"
#include "scatlab/potential.hpp"
#include "scatlab/smatrix2d.hpp"
#include "scatlab/spectral.hpp"
#include <nlohmann/json_fwd.hpp>

namespace scatlab {

struct McConfig {
    std::int64_t samples = 100000;
    double eta_max = 0.0; // 0 -> 1.5 * support radius
    std::uint64_t seed = 0;
    bool has_seed = false;
};

struct ClassicalConfig {
    int scatter_rays = 200;
    int calibration_rays = 50;
    double contact_step = 1e-4;
    std::vector<int> fixed_point_ls;
    std::int64_t fixed_point_samples = 10000;
    double delta_fix = 1e-3;
};

struct CheckSpec {
    std::string type;
    double value = 0.0;
    double h = 0.0;
    int poly = 0;
    double target_re = 0.0, target_im = 0.0;
};

struct ExperimentConfig {
    PotentialSpec potential;
    double energy = 1.0;
    std::vector<double> h_list;
    std::vector<std::string> pipelines; // subset of classical/phases/dense2d/spectral
    McConfig mc;
    ClassicalConfig classical;
    RadialSolveOptions solver;
    int l_max_extra = 10;
    int n_ang = 128;
    Grid2DOptions grid2d;
    bool dump_smatrix = false;
    SectorGrid sectors;
    std::vector<LaurentPoly> polynomials;
    double cutoff_r_star_factor = 1.4;
    int histogram_bins = 32;
    std::filesystem::path output_dir = "out";
    unsigned threads = 0;
    bool use_cache = true;
    std::vector<CheckSpec> checks;

    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    void validate() const;
    bool has_pipeline(const std::string& name) const;
};

struct StageStatus {
    std::string name;
    std::string status; // ok / failed / skipped
    bool cached = false;
    double wall_ms = 0.0;
    std::string detail;
};

struct CheckResult {
    std::string description;
    bool passed = false;
    double value = 0.0;
};

struct RunManifest {
    std::string config_hash;
    std::string version;
    std::vector<StageStatus> stages;
    std::vector<std::pair<std::string, std::string>> artifacts; // path, sha256
    std::vector<CheckResult> checks;
    // calibration records
    std::string boundary_term;
    double boundary_defects[3] = {0, 0, 0};
    std::string gamma_convention;
    bool all_checks_passed = true;
    bool any_stage_failed = false;

    nlohmann::json to_json() const;
};

/** Executes the enabled pipelines in dependency order
    (classical -> phases/dense2d -> spectral), reusing cached artifacts keyed
    by canonical config-fragment hashes, and emits every report artifact.
    Returns the manifest; exit-code policy is left to the caller. */
RunManifest run_experiment(const ExperimentConfig& config);

/** Histogram CSV: bin edges over [0, 2pi), weighted counts, and the
    normalized density column (2 pi h)^{d-1} count / (c_V binwidth). */
void emit_histogram(std::ostream& os, const EigenphaseSet& phases, int bins, double c_v);

std::string scatlab_version();

} // namespace scatlab
