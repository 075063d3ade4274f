#pragma once

#include <cstdint>
#include <vector>

#include "urban/gmm.hpp"
#include "urban/grid.hpp"

namespace urban {

enum class SegClass : std::uint8_t { water = 1, terrain = 2, urban = 3 };

// Per-pixel class values (1=water, 2=terrain, 3=urban):
// water iff rho < tau_water, terrain iff tau_water <= rho < tau_urban,
// urban iff rho >= tau_urban.
std::vector<std::uint8_t> classify(const Grid& rho, const Thresholds& t);

Mask mask_of_class(const std::vector<std::uint8_t>& classes, int width, int height, SegClass c);

// Square k x k structuring element; out-of-grid pixels count as background
// for erosion.
Mask dilate(const Mask& m, int k);
Mask erode(const Mask& m, int k);
Mask close_mask(const Mask& m, int k);  // dilate then erode

// Close(Dilate(u, k), k) with the 5x5 element. Output always contains the
// input.
Mask refine_urban_mask(const Mask& u);

// 8-connectivity component labeling; keeps components with
// area >= min_component_px. `component_count` reports how many survive.
Mask filter_components(const Mask& u, int min_component_px, int* component_count = nullptr);

// Component areas under 8-connectivity (labeling order: row-major first
// encounter).
std::vector<std::int64_t> component_areas(const Mask& m);

// C(x,y) = 1 iff rho > tau_center (strict) and u_final(x,y) = 1.
// An empty center set is a hard error: the distance transform needs a
// non-empty reference set.
Mask identify_centers(const Grid& rho, const Mask& u_final, const Thresholds& t);

struct SegmentationMap {
    std::vector<std::uint8_t> classes;
    Mask urban_final;
    Mask centers;
    Thresholds thresholds;
    int component_count = 0;
};

// Indexed image for export: class value per pixel, centers overlaid as 4.
std::vector<std::uint8_t> segmentation_indices(const SegmentationMap& seg);

}  // namespace urban
