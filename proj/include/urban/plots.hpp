#pragma once

#include <optional>
#include <string>

#include "urban/gradient.hpp"
#include "urban/regions.hpp"

namespace urban {

// Density-distance plot: profile points, IQR band, fitted line, peak
// markers. Dependency-free SVG text, stable formatting.
std::string svg_gradient_plot(const DensityProfile& profile, const GradientFit& fit,
                              const std::vector<Peak>& peaks,
                              std::optional<double> ld_km = std::nullopt);

// Residual plot with green (uniform) / red (variation) region bands.
std::string svg_difference_plot(const ResidualSeries& residuals, const RegionSet& regions);

// profile CSV with header distance_km,mean_density,count,q25,q75
std::string profile_csv(const DensityProfile& profile);

}  // namespace urban
