#pragma once

#include <optional>
#include <string>
#include <vector>

#include "urban/fusion.hpp"
#include "urban/gmm.hpp"
#include "urban/gradient.hpp"
#include "urban/grid.hpp"
#include "urban/regions.hpp"
#include "urban/segmentation.hpp"

namespace urban {

inline constexpr const char* kToolVersion = "0.1.0";

enum class RhoTargetMode { profile_min, absolute };

struct PipelineConfig {
    std::string optical_path;
    std::string sar_path;
    std::optional<double> resolution_m;  // overrides sidecar metadata

    FusionConfig fusion;
    int histogram_bins = 256;
    int min_component_px = 100;
    double tau_center = 1.4;
    double prominence_factor = 0.02;
    int minima_window = 5;
    RhoTargetMode rho_target_mode = RhoTargetMode::profile_min;
    double rho_target_value = 0.0;  // used when mode == absolute

    std::string out_dir = ".";
    bool emit_timestamp = false;

    void validate() const;
};

// Merges config-file keys over the defaults; unknown keys are an error.
PipelineConfig parse_pipeline_config(const std::string& json_text, PipelineConfig base = {});

struct Report {
    PipelineConfig config;
    std::optional<GmmParams> gmm;
    Thresholds thresholds;

    std::int64_t water_px = 0, terrain_px = 0, urban_px = 0, center_px = 0;
    int component_count = 0;

    GradientFit fit;
    double rho_target = 0.0;
    double ld_km = 0.0;
    std::vector<Peak> peaks;
    Morphology morphology = Morphology::monocentric;
    bool minima_fallback = false;

    RegionSet regions;
    std::vector<std::string> warnings;
};

std::string report_json(const Report& r);

// Everything a run produces; the report plus the series needed for plots
// and the fused density field the segmentation ran on.
struct PipelineResult {
    Report report;
    Grid rho;
    DensityProfile profile;
    ResidualSeries residuals;
    SegmentationMap segmentation;
    int width = 0, height = 0;
};

// Executes the full chain: load -> normalize -> sobel -> edge density ->
// combine -> denoise -> histogram -> GMM -> thresholds -> classify ->
// refine -> filter -> centers -> distance transform -> profile -> minima ->
// fit -> LD -> peaks -> morphology -> residuals -> regions -> labels.
// Deterministic end to end; soft fallbacks are reported in
// report.warnings.
PipelineResult run_pipeline(const PipelineConfig& cfg);

// Variant for pre-loaded grids (tests, synthetic scenes).
PipelineResult run_pipeline_on(const Grid& optical, const Grid& sar, const PipelineConfig& cfg);

// Writes report.json, profile.csv, gradient.svg, difference.svg and
// segmentation.png into cfg.out_dir.
void emit_outputs(const PipelineResult& result);

}  // namespace urban
