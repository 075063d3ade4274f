#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "urban/pipeline.hpp"
#include "urban/raster_io.hpp"
#include "urban/synth.hpp"

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw urban::InputError("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int run_analyze(const std::string& optical, const std::string& sar, double resolution_m,
                const std::string& config_path, const std::string& out_dir) {
    urban::PipelineConfig cfg;
    if (!config_path.empty()) cfg = urban::parse_pipeline_config(read_file(config_path));
    cfg.optical_path = optical;
    cfg.sar_path = sar;
    if (resolution_m > 0) cfg.resolution_m = resolution_m;
    cfg.out_dir = out_dir;

    urban::PipelineResult result = urban::run_pipeline(cfg);
    urban::emit_outputs(result);

    const auto& rep = result.report;
    std::cout << "thresholds: tau_water=" << rep.thresholds.tau_water
              << " tau_urban=" << rep.thresholds.tau_urban
              << " tau_center=" << rep.thresholds.tau_center << "\n"
              << "gradient:   alpha=" << rep.fit.alpha << "/km  LD=" << rep.ld_km << " km  ("
              << rep.peaks.size() << " peaks, "
              << (rep.morphology == urban::Morphology::monocentric ? "monocentric"
                                                                   : "polycentric")
              << ")\n"
              << "regions:    " << rep.regions.regions.size() << " (k=" << rep.regions.k_selected
              << ")\n";
    for (const auto& w : rep.warnings) std::cout << "warning: " << w << "\n";
    std::cout << "outputs written to " << cfg.out_dir << "\n";
    return 0;
}

int run_synth(const std::string& spec_path, const std::string& out_dir) {
    const urban::SyntheticSpec spec = urban::parse_synth_spec(read_file(spec_path));
    std::error_code ec;
    fs::create_directories(out_dir, ec);

    const urban::ScenePair pair = urban::generate_scene_pair(spec);
    urban::save_png16(pair.optical, (fs::path(out_dir) / "optical.png").string());
    urban::save_png16(pair.sar, (fs::path(out_dir) / "sar.png").string());
    // sidecars so analyze picks the resolution up without a flag
    urban::save_grid_f32(pair.optical, (fs::path(out_dir) / "optical.f32").string());
    urban::save_grid_f32(pair.sar, (fs::path(out_dir) / "sar.f32").string());
    urban::write_text_file((fs::path(out_dir) / "truth.json").string(),
                           urban::synth_truth_json(spec));
    std::cout << "synthetic scene pair written to " << out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"urbangrad: urban density gradient metrics from fused optical + SAR rasters"};
    app.require_subcommand(1);

    std::string optical, sar, config_path, out_dir = ".";
    double resolution_m = 0.0;
    auto* analyze = app.add_subcommand("analyze", "run the full analysis pipeline");
    analyze->add_option("--optical", optical, "optical grayscale PNG or .f32 raster")->required();
    analyze->add_option("--sar", sar, "SAR backscatter PNG or .f32 raster")->required();
    analyze->add_option("--resolution-m", resolution_m, "meters per pixel (overrides sidecar)")
        ->check(CLI::PositiveNumber);
    analyze->add_option("--config", config_path, "pipeline config JSON");
    analyze->add_option("--out", out_dir, "output directory (default .)");

    std::string spec_path, synth_out = ".";
    auto* synth = app.add_subcommand("synth", "generate a synthetic scene pair with ground truth");
    synth->add_option("--spec", spec_path, "synthetic spec JSON")->required();
    synth->add_option("--out", synth_out, "output directory (default .)");

    try {
        app.parse(argc, argv);
        if (analyze->parsed())
            return run_analyze(optical, sar, resolution_m, config_path, out_dir);
        return run_synth(spec_path, synth_out);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage problems are input errors
    } catch (const urban::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const urban::StageError& e) {
        std::cerr << "stage error " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
