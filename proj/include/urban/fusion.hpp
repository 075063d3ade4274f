#pragma once

#include "urban/grid.hpp"

namespace urban {

// Parameters for the fusion stages. The defaults target block-scale urban
// texture at 5-20 m/px inputs; all are overridable from the pipeline config.
struct FusionConfig {
    double blur_sigma = 8.0;    // px, edge-density Gaussian
    double w_optical = 1.0;     // fusion weight for the edge-density field
    double w_sar = 1.0;         // fusion weight for normalized SAR
    int nlm_patch = 7;          // odd, >=3
    int nlm_search = 21;        // odd, >=3
    double nlm_strength = 0.1;  // h = nlm_strength * value range

    void validate() const;
};

// Gradient magnitude sqrt(Gx^2+Gy^2) with the standard 3x3 Sobel kernels.
// Borders are edge-replicated. Requires at least a 3x3 grid.
Grid sobel_magnitude(const Grid& g);

// Separable Gaussian convolution, kernel truncated at 3*sigma, taps
// normalized to sum 1, edge-replicated borders.
Grid gaussian_blur(const Grid& g, double sigma);

// Gaussian blur of the edge map followed by min-max normalization to [0,1].
Grid edge_density(const Grid& edges, const FusionConfig& cfg);

// rho = w_optical*edge_density + w_sar*sar_norm, per pixel. Exact weighted
// sum; with default weights on [0,1] inputs the result spans [0,2].
Grid combine(const Grid& edge_density, const Grid& sar_norm, const FusionConfig& cfg);

// Non-Local Means denoising. Each pixel becomes the similarity-weighted
// average of the pixels in its search window; weights are
// exp(-d^2 / h^2) with d^2 the mean squared difference between the two
// patches (edge-replicated sampling) and h = nlm_strength * range(g).
// Output is a convex combination of input values. Grids smaller than the
// search window pass through unchanged (`passed_through` reports this).
Grid nlm_denoise(const Grid& g, const FusionConfig& cfg, bool* passed_through = nullptr);

}  // namespace urban
