#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "urban/pipeline.hpp"
#include "urban/plots.hpp"
#include "urban/raster_io.hpp"
#include "urban/synth.hpp"

using namespace urban;
namespace fs = std::filesystem;

namespace {

// single dominant core, no noise: strictly radial scene
SyntheticSpec mono_spec(int size = 256) {
    SyntheticSpec spec;
    spec.width = size;
    spec.height = size;
    spec.resolution_m = 20.0;
    const double c = size / 2.0;
    spec.centers = {{c, c, 2.4, 1.0}};
    spec.noise_sigma = 0.0;
    spec.seed = 424242;
    return spec;
}

// dominant core plus two sub-center clusters at distinct radii
SyntheticSpec poly_spec(int size = 256) {
    SyntheticSpec spec;
    spec.width = size;
    spec.height = size;
    spec.resolution_m = 20.0;
    const double c = size / 2.0;
    spec.centers = {
        {c, c, 2.4, 1.0},
        {c + 100.0, c, 1.4, 2.2},
        {c - 36.0, c + 62.35, 1.358, 1.98},
    };
    spec.noise_sigma = 0.01;
    spec.seed = 777;
    return spec;
}

PipelineResult run_synthetic(const SyntheticSpec& spec) {
    const ScenePair pair = generate_scene_pair(spec);
    PipelineConfig cfg;
    cfg.optical_path = "synthetic-optical";
    cfg.sar_path = "synthetic-sar";
    return run_pipeline_on(pair.optical, pair.sar, cfg);
}

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("urbangrad_pipe_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("monocentric synthetic scene classifies monocentric with negative alpha") {
    const PipelineResult res = run_synthetic(mono_spec());
    const Report& rep = res.report;
    CHECK(rep.morphology == Morphology::monocentric);
    CHECK(rep.fit.alpha < 0.0);
    CHECK(rep.peaks.size() <= 1);
    CHECK(rep.center_px > 0);
    CHECK(rep.component_count >= 1);
}

TEST_CASE("three-center synthetic scene classifies polycentric") {
    const PipelineResult res = run_synthetic(poly_spec());
    CHECK(res.report.peaks.size() >= 2);
    CHECK(res.report.morphology == Morphology::polycentric);
}

TEST_CASE("misaligned inputs abort with an alignment diagnostic") {
    const ScenePair pair = generate_scene_pair(mono_spec(64));
    Grid bad = pair.sar;
    bad.resolution_m = 10.0;
    PipelineConfig cfg;
    CHECK_THROWS_WITH_AS(run_pipeline_on(pair.optical, bad, cfg),
                         doctest::Contains("resolution mismatch"), InputError);

    Grid cropped(32, 64, 20.0);
    CHECK_THROWS_WITH_AS(run_pipeline_on(pair.optical, cropped, cfg),
                         doctest::Contains("dimension mismatch"), InputError);
}

TEST_CASE("reports are byte-identical across runs") {
    const ScenePair pair = generate_scene_pair(mono_spec(192));
    PipelineConfig cfg;
    const PipelineResult a = run_pipeline_on(pair.optical, pair.sar, cfg);
    const PipelineResult b = run_pipeline_on(pair.optical, pair.sar, cfg);
    CHECK(report_json(a.report) == report_json(b.report));
    CHECK(profile_csv(a.profile) == profile_csv(b.profile));
}

TEST_CASE("profile conservation holds on the pipeline output") {
    const PipelineResult res = run_synthetic(mono_spec(192));
    double weighted = 0.0;
    std::int64_t count = 0;
    for (std::size_t i = 0; i < res.profile.size(); ++i) {
        weighted += res.profile.mean_density[i] * static_cast<double>(res.profile.pixel_count[i]);
        count += res.profile.pixel_count[i];
    }
    CHECK(count == res.segmentation.urban_final.count());
}

TEST_CASE("report json carries the documented structure") {
    const PipelineResult res = run_synthetic(mono_spec(192));
    const nlohmann::json j = nlohmann::json::parse(report_json(res.report));
    CHECK(j.at("tool") == "urbangrad");
    CHECK(j.at("version").is_string());
    for (const char* key : {"blur_sigma", "w_optical", "w_sar", "nlm_patch", "nlm_search",
                            "nlm_strength", "histogram_bins", "min_component_px", "tau_center",
                            "prominence_factor", "minima_window", "rho_target"})
        CHECK(j.at("config").contains(key));
    CHECK(j.at("thresholds").at("tau_water").is_number());
    CHECK(j.at("thresholds").at("tau_urban").is_number());
    CHECK(j.at("thresholds").at("provenance").is_string());
    CHECK(j.at("segmentation").at("component_count").is_number());
    CHECK(j.at("gradient").at("alpha_per_km").is_number());
    CHECK(j.at("gradient").at("ld_km").is_number());
    CHECK(j.at("gradient").at("peaks").is_array());
    CHECK(j.at("gradient").at("morphology").is_string());
    CHECK(j.at("regions").at("regions").is_array());
    CHECK(j.at("warnings").is_array());
    CHECK_FALSE(j.contains("timestamp_unix_ms"));  // opt-in field

    const double tw = j.at("thresholds").at("tau_water").get<double>();
    const double tu = j.at("thresholds").at("tau_urban").get<double>();
    CHECK(tw < tu);

    // lossless round trip: parse and re-serialize reproduces the bytes
    CHECK(j.dump(2) + "\n" == report_json(res.report));
}

TEST_CASE("emit writes all documented artifacts") {
    const auto dir = temp_dir("emit");
    SyntheticSpec spec = mono_spec(192);
    const ScenePair pair = generate_scene_pair(spec);
    PipelineConfig cfg;
    cfg.out_dir = dir.string();
    PipelineResult res = run_pipeline_on(pair.optical, pair.sar, cfg);
    emit_outputs(res);
    for (const char* f :
         {"report.json", "profile.csv", "gradient.svg", "difference.svg", "segmentation.png"})
        CHECK(fs::exists(dir / f));

    // CSV rows == profile bins (+1 header)
    std::ifstream csv(dir / "profile.csv");
    std::string line;
    std::size_t rows = 0;
    std::getline(csv, line);
    CHECK(line == "distance_km,mean_density,count,q25,q75");
    while (std::getline(csv, line))
        if (!line.empty()) ++rows;
    CHECK(rows == res.profile.size());

    // segmentation png loads back with the right size
    const Grid seg = load_grid((dir / "segmentation.png").string(), GridKind::optical_gray, 20.0);
    CHECK(seg.width == 192);
    CHECK(seg.height == 192);
}

TEST_CASE("zero residuals render one full-width green band") {
    ResidualSeries r;
    for (int i = 0; i < 20; ++i) {
        r.distance_km.push_back(0.1 * i);
        r.residual.push_back(0.0);
    }
    const RegionSet rs = label_regions(segment_regions(build_features(r), r), r);
    const std::string svg = svg_difference_plot(r, rs);
    CHECK(svg.find("region-uniform") != std::string::npos);
    CHECK(svg.find("region-variation") == std::string::npos);
    // single band spanning the full plot area (900 - 64 - 20 = 816 px)
    CHECK(svg.find("width=\"816\"") != std::string::npos);
}

TEST_CASE("pipeline runs from f32 files on disk") {
    const auto dir = temp_dir("files");
    SyntheticSpec spec = mono_spec(192);
    const ScenePair pair = generate_scene_pair(spec);
    save_grid_f32(pair.optical, (dir / "optical.f32").string());
    save_grid_f32(pair.sar, (dir / "sar.f32").string());

    PipelineConfig cfg;
    cfg.optical_path = (dir / "optical.f32").string();
    cfg.sar_path = (dir / "sar.f32").string();
    cfg.out_dir = dir.string();
    const PipelineResult res = run_pipeline(cfg);
    CHECK(res.width == 192);
    CHECK(res.report.center_px > 0);
}

TEST_CASE("config file overrides defaults and rejects unknown keys") {
    PipelineConfig cfg = parse_pipeline_config(
        R"({"blur_sigma": 4.0, "min_component_px": 50,
            "rho_target": {"mode": "absolute", "value": 0.9}})");
    CHECK(cfg.fusion.blur_sigma == 4.0);
    CHECK(cfg.min_component_px == 50);
    CHECK(cfg.rho_target_mode == RhoTargetMode::absolute);
    CHECK(cfg.rho_target_value == 0.9);
    // untouched defaults keep the documented values
    CHECK(cfg.tau_center == 1.4);
    CHECK(cfg.prominence_factor == 0.02);
    CHECK(cfg.fusion.nlm_patch == 7);

    CHECK_THROWS_AS(parse_pipeline_config(R"({"not_a_key": 1})"), InputError);
    CHECK_THROWS_AS(parse_pipeline_config(R"({"nlm_patch": 4})"), InputError);
}

TEST_CASE("paper constants are the defaults") {
    PipelineConfig cfg;
    CHECK(cfg.min_component_px == 100);
    CHECK(cfg.tau_center == 1.4);
    CHECK(cfg.prominence_factor == 0.02);
    CHECK(cfg.histogram_bins == 256);
}
