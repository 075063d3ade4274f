#include "urban/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "urban/plots.hpp"
#include "urban/raster_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace urban {

void PipelineConfig::validate() const {
    fusion.validate();
    if (histogram_bins < 8) throw InputError("histogram_bins must be >= 8");
    if (min_component_px < 1) throw InputError("min_component_px must be >= 1");
    if (!(tau_center > 0)) throw InputError("tau_center must be > 0");
    if (!(prominence_factor >= 0)) throw InputError("prominence_factor must be >= 0");
    if (minima_window < 3) throw InputError("minima_window must be >= 3");
    if (resolution_m && !(*resolution_m > 0)) throw InputError("resolution must be > 0");
}

PipelineConfig parse_pipeline_config(const std::string& json_text, PipelineConfig cfg) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw InputError(std::string("invalid config JSON: ") + e.what());
    }
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "blur_sigma") cfg.fusion.blur_sigma = value.get<double>();
            else if (key == "w_optical") cfg.fusion.w_optical = value.get<double>();
            else if (key == "w_sar") cfg.fusion.w_sar = value.get<double>();
            else if (key == "nlm_patch") cfg.fusion.nlm_patch = value.get<int>();
            else if (key == "nlm_search") cfg.fusion.nlm_search = value.get<int>();
            else if (key == "nlm_strength") cfg.fusion.nlm_strength = value.get<double>();
            else if (key == "histogram_bins") cfg.histogram_bins = value.get<int>();
            else if (key == "min_component_px") cfg.min_component_px = value.get<int>();
            else if (key == "tau_center") cfg.tau_center = value.get<double>();
            else if (key == "prominence_factor") cfg.prominence_factor = value.get<double>();
            else if (key == "minima_window") cfg.minima_window = value.get<int>();
            else if (key == "emit_timestamp") cfg.emit_timestamp = value.get<bool>();
            else if (key == "rho_target") {
                const std::string mode = value.at("mode").get<std::string>();
                if (mode == "profile-min") {
                    cfg.rho_target_mode = RhoTargetMode::profile_min;
                } else if (mode == "absolute") {
                    cfg.rho_target_mode = RhoTargetMode::absolute;
                    cfg.rho_target_value = value.at("value").get<double>();
                } else {
                    throw InputError("rho_target.mode must be \"profile-min\" or \"absolute\"");
                }
            } else {
                throw InputError("unknown config key: " + key);
            }
        } catch (const json::exception& e) {
            throw InputError("config key \"" + key + "\": " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

namespace {

json config_json(const PipelineConfig& cfg) {
    json j;
    j["optical"] = cfg.optical_path;
    j["sar"] = cfg.sar_path;
    if (cfg.resolution_m) j["resolution_m"] = *cfg.resolution_m;
    j["blur_sigma"] = cfg.fusion.blur_sigma;
    j["w_optical"] = cfg.fusion.w_optical;
    j["w_sar"] = cfg.fusion.w_sar;
    j["nlm_patch"] = cfg.fusion.nlm_patch;
    j["nlm_search"] = cfg.fusion.nlm_search;
    j["nlm_strength"] = cfg.fusion.nlm_strength;
    j["histogram_bins"] = cfg.histogram_bins;
    j["min_component_px"] = cfg.min_component_px;
    j["tau_center"] = cfg.tau_center;
    j["prominence_factor"] = cfg.prominence_factor;
    j["minima_window"] = cfg.minima_window;
    j["rho_target"] = cfg.rho_target_mode == RhoTargetMode::profile_min
                          ? json{{"mode", "profile-min"}}
                          : json{{"mode", "absolute"}, {"value", cfg.rho_target_value}};
    return j;
}

}  // namespace

std::string report_json(const Report& r) {
    json j;
    j["tool"] = "urbangrad";
    j["version"] = kToolVersion;
    j["config"] = config_json(r.config);

    j["thresholds"] = {
        {"tau_water", r.thresholds.tau_water},
        {"tau_urban", r.thresholds.tau_urban},
        {"tau_center", r.thresholds.tau_center},
        {"provenance", r.thresholds.provenance == ThresholdProvenance::gmm_intersection
                           ? "gmm-intersection"
                           : "quantile-fallback"},
    };
    if (r.gmm) {
        j["gmm"] = {
            {"weights", r.gmm->weights},
            {"means", r.gmm->means},
            {"stds", r.gmm->stds},
            {"log_likelihood", r.gmm->log_likelihood},
            {"em_iterations", r.gmm->ll_trace.size()},
        };
    } else {
        j["gmm"] = nullptr;
    }

    j["segmentation"] = {
        {"water_px", r.water_px},     {"terrain_px", r.terrain_px},
        {"urban_px", r.urban_px},     {"center_px", r.center_px},
        {"component_count", r.component_count},
    };

    json peaks = json::array();
    for (const auto& p : r.peaks)
        peaks.push_back({{"distance_km", p.distance_km},
                         {"density", p.density},
                         {"prominence", p.prominence}});
    j["gradient"] = {
        {"alpha_per_km", r.fit.alpha},
        {"beta", r.fit.beta},
        {"r_squared", r.fit.r_squared},
        {"minima_points", r.fit.points.size()},
        {"minima_fallback", r.minima_fallback},
        {"rho_target", r.rho_target},
        {"ld_km", r.ld_km},
        {"peaks", peaks},
        {"morphology", r.morphology == Morphology::monocentric ? "monocentric" : "polycentric"},
    };

    json regions = json::array();
    for (const auto& reg : r.regions.regions)
        regions.push_back({{"start_km", reg.start_km},
                           {"end_km", reg.end_km},
                           {"label", reg.label == RegionLabel::uniform ? "uniform" : "variation"},
                           {"std", reg.std_dev},
                           {"fraction", reg.fraction}});
    j["regions"] = {
        {"k_selected", r.regions.k_selected},
        {"overall_std", r.regions.overall_std},
        {"regions", regions},
    };

    j["warnings"] = r.warnings;

    if (r.config.emit_timestamp) {
        const auto now = std::chrono::system_clock::now().time_since_epoch();
        j["timestamp_unix_ms"] =
            std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
    }
    return j.dump(2) + "\n";
}

PipelineResult run_pipeline_on(const Grid& optical, const Grid& sar, const PipelineConfig& cfg) {
    cfg.validate();
    check_alignment(optical, sar);
    require_finite(optical, "optical");
    require_finite(sar, "sar");

    PipelineResult result;
    Report& rep = result.report;
    rep.config = cfg;
    result.width = optical.width;
    result.height = optical.height;

    // fusion: edges from optical, normalized SAR, weighted sum, denoise
    const Grid optical_norm = normalize_minmax(optical);
    const Grid sar_norm = normalize_minmax(sar);
    const Grid edges = sobel_magnitude(optical_norm);
    const Grid density = edge_density(edges, cfg.fusion);
    const Grid combined = combine(density, sar_norm, cfg.fusion);
    bool nlm_skipped = false;
    result.rho = nlm_denoise(combined, cfg.fusion, &nlm_skipped);
    const Grid& rho = result.rho;
    if (nlm_skipped)
        rep.warnings.push_back("nlm: grid smaller than search window, denoising skipped");

    // thresholds from the combined-image histogram
    const Histogram hist = build_histogram(rho, cfg.histogram_bins);
    bool swapped = false;
    try {
        GmmParams gmm = fit_gmm_em(hist);
        rep.gmm = gmm;
        rep.thresholds = derive_thresholds(gmm, hist, cfg.tau_center, &swapped);
    } catch (const GmmCollapseError& e) {
        rep.thresholds = quantile_thresholds(hist, cfg.tau_center);
        rep.warnings.push_back(std::string("gmm: ") + e.what() + "; quantile fallback used");
    }
    if (swapped) rep.warnings.push_back("thresholds: intersections out of order, swapped");
    if (rep.thresholds.provenance == ThresholdProvenance::quantile_fallback && rep.gmm)
        rep.warnings.push_back("thresholds: missing component intersection, quantile fallback used");

    // segmentation
    SegmentationMap& seg = result.segmentation;
    seg.thresholds = rep.thresholds;
    seg.classes = classify(rho, rep.thresholds);
    for (auto c : seg.classes) {
        if (c == static_cast<std::uint8_t>(SegClass::water)) ++rep.water_px;
        else if (c == static_cast<std::uint8_t>(SegClass::terrain)) ++rep.terrain_px;
        else ++rep.urban_px;
    }
    const Mask initial = mask_of_class(seg.classes, rho.width, rho.height, SegClass::urban);
    const Mask refined = refine_urban_mask(initial);
    seg.urban_final = filter_components(refined, cfg.min_component_px, &seg.component_count);
    rep.component_count = seg.component_count;
    if (seg.urban_final.empty_mask())
        throw StageError("segmentation", "no urban area after component filtering");
    seg.centers = identify_centers(rho, seg.urban_final, rep.thresholds);
    rep.center_px = seg.centers.count();

    // gradient analysis
    const Grid dist = distance_transform(seg.centers, rho.resolution_m);
    result.profile = extract_profile(dist, rho, seg.urban_final);
    MinimaResult minima = find_local_minima(result.profile, cfg.minima_window);
    rep.minima_fallback = minima.used_fallback;
    if (minima.used_fallback)
        rep.warnings.push_back("minima: fewer than 2 local minima, fitted through all profile points");
    rep.fit = fit_gradient(minima.points);

    rep.rho_target = cfg.rho_target_mode == RhoTargetMode::absolute
                         ? cfg.rho_target_value
                         : *std::min_element(result.profile.mean_density.begin(),
                                             result.profile.mean_density.end());
    rep.ld_km = compute_ld(rep.fit, rep.rho_target);
    if (rep.ld_km < 0)
        rep.warnings.push_back("ld: negative distance, profile already below target at the center");

    rep.peaks = detect_peaks(result.profile, cfg.prominence_factor);
    bool no_peak = false;
    rep.morphology = classify_morphology(rep.peaks, &no_peak);
    if (no_peak) rep.warnings.push_back("morphology: no distinct peak, monocentric by default");

    // residual regions
    result.residuals = compute_residuals(result.profile, rep.fit);
    const FeatureMatrix features = build_features(result.residuals);
    rep.regions = label_regions(segment_regions(features, result.residuals), result.residuals);

    return result;
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
    cfg.validate();
    const Grid optical = load_grid(cfg.optical_path,
                                   cfg.optical_path.ends_with(".f32") ? GridKind::raw_float
                                                                      : GridKind::optical_gray,
                                   cfg.resolution_m);
    const Grid sar = load_grid(cfg.sar_path,
                               cfg.sar_path.ends_with(".f32") ? GridKind::raw_float
                                                              : GridKind::sar,
                               cfg.resolution_m);
    return run_pipeline_on(optical, sar, cfg);
}

void emit_outputs(const PipelineResult& result) {
    const fs::path out(result.report.config.out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec && !fs::is_directory(out))
        throw InputError("cannot create output directory: " + out.string());

    write_text_file((out / "report.json").string(), report_json(result.report));
    write_text_file((out / "profile.csv").string(), profile_csv(result.profile));
    write_text_file((out / "gradient.svg").string(),
                    svg_gradient_plot(result.profile, result.report.fit, result.report.peaks,
                                      result.report.ld_km));
    write_text_file((out / "difference.svg").string(),
                    svg_difference_plot(result.residuals, result.report.regions));
    save_indexed_png(segmentation_indices(result.segmentation), result.width, result.height,
                     (out / "segmentation.png").string());
}

}  // namespace urban
