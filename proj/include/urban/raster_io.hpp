#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "urban/grid.hpp"

namespace urban {

enum class GridKind { optical_gray, sar, raw_float };

// Loads a raster into a Grid.
//
// PNG inputs (optical_gray, sar): single-channel 8/16-bit grayscale, scaled
// to [0,1]; RGB(A) inputs are reduced to luminance 0.299R+0.587G+0.114B
// first. Raw-float inputs (.f32): little-endian float32 with a required
// JSON sidecar {"width","height","resolution_m"}.
//
// Resolution comes from the sidecar ("<stem>.json" or "<path>.json") when
// present; `resolution_override` wins over both. PNG inputs without either
// default to 1 m/px.
Grid load_grid(const std::string& path, GridKind kind,
               std::optional<double> resolution_override = std::nullopt);

// Writes little-endian float32 plus the JSON sidecar "<stem>.json".
// load_grid(save_grid_f32(g)) is bit-exact for float32-representable values.
void save_grid_f32(const Grid& g, const std::string& path);

// 8-bit grayscale PNG; values clamped to [0,1] then scaled to 0..255.
void save_png8(const Grid& g, const std::string& path);

// 16-bit grayscale PNG; values clamped to [0,1] then scaled to 0..65535.
void save_png16(const Grid& g, const std::string& path);

// Paletted PNG for segmentation maps: 0=bg, 1=water, 2=terrain, 3=urban,
// 4=center.
void save_indexed_png(const std::vector<std::uint8_t>& indices, int width, int height,
                      const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace urban
