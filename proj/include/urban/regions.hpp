#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "urban/gradient.hpp"
#include "urban/grid.hpp"

namespace urban {

// Per-bin deviation of the observed profile from the fitted line.
struct ResidualSeries {
    std::vector<double> distance_km;
    std::vector<double> residual;

    std::size_t size() const { return residual.size(); }
};

ResidualSeries compute_residuals(const DensityProfile& p, const GradientFit& fit);

// Per-bin feature vector [residual, forward-difference gradient, residual
// shifted one bin ahead, gradient shifted one bin ahead]; shifts and the
// trailing gradient are padded by edge replication. Columns standardized to
// zero mean / unit variance (constant columns become zeros). Needs >= 4
// bins.
using FeatureMatrix = std::vector<std::array<double, 4>>;

FeatureMatrix build_features(const ResidualSeries& r);

enum class RegionLabel { uniform, variation };

struct Region {
    double start_km = 0.0;
    double end_km = 0.0;
    RegionLabel label = RegionLabel::variation;
    double std_dev = 0.0;   // residual std over member bins
    double fraction = 0.0;  // share of profile bins
    std::size_t first_bin = 0;
    std::size_t last_bin = 0;
};

struct RegionSet {
    std::vector<Region> regions;  // contiguous, ordered, covering the domain
    double overall_std = 0.0;
    int k_selected = 1;
};

// K-means over the feature rows for k in {1,2,3} (deterministic
// farthest-point init seeded from the first bin), labels converted to
// contiguous distance runs, runs under 5% of the bins merged into the
// neighbor with the closer mean residual, then k chosen to maximize the
// number of post-merge regions with mean within-region variance as the
// tie-breaker. More than 3 surviving regions are reduced by repeatedly
// merging the pair whose merge adds the least pooled variance.
RegionSet segment_regions(const FeatureMatrix& features, const ResidualSeries& r);

// Labels each region uniform iff its residual std is below 0.7x the overall
// std (both population stds). A zero overall std labels everything uniform.
RegionSet label_regions(RegionSet rs, const ResidualSeries& r);

}  // namespace urban
