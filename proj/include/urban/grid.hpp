#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace urban {

// Input/config problems (bad files, mismatched grids, invalid parameters).
// The CLI maps these to exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A pipeline stage failed on valid inputs (e.g. no urban centers found).
// The CLI maps these to exit code 1.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& msg)
        : std::runtime_error("[" + stage + "] " + msg), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

// 2-D scalar raster, row-major, with meters-per-pixel metadata.
// Carrier for optical, SAR, edge, density and distance fields.
// Immutable by convention once a stage has produced it.
struct Grid {
    int width = 0;
    int height = 0;
    double resolution_m = 1.0;
    std::vector<double> values;

    Grid() = default;
    Grid(int w, int h, double res_m, double fill = 0.0)
        : width(w), height(h), resolution_m(res_m),
          values(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

    double& at(int x, int y) { return values[idx(x, y)]; }
    double at(int x, int y) const { return values[idx(x, y)]; }

    // Edge-replicated access; border policy for every kernel in the pipeline.
    double at_clamped(int x, int y) const {
        if (x < 0) x = 0;
        if (x >= width) x = width - 1;
        if (y < 0) y = 0;
        if (y >= height) y = height - 1;
        return values[idx(x, y)];
    }

    std::size_t idx(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
               static_cast<std::size_t>(x);
    }
    std::size_t size() const { return values.size(); }
    bool empty() const { return values.empty(); }

    // Same shape and resolution, all values zero.
    Grid like() const { return Grid(width, height, resolution_m); }
};

// Boolean raster derived from a Grid; dimensions must match its source.
struct Mask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    Mask() = default;
    Mask(int w, int h, bool fill = false)
        : width(w), height(h),
          bits(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill ? 1 : 0) {}

    bool at(int x, int y) const { return bits[idx(x, y)] != 0; }
    void set(int x, int y, bool v) { bits[idx(x, y)] = v ? 1 : 0; }

    std::size_t idx(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
               static_cast<std::size_t>(x);
    }

    std::int64_t count() const {
        std::int64_t n = 0;
        for (auto b : bits) n += b;
        return n;
    }
    bool empty_mask() const { return count() == 0; }
};

// Min-max rescale to [0,1]. A constant grid maps to all zeros.
Grid normalize_minmax(const Grid& g);

// Validates that two grids can enter the same pipeline: equal dimensions and
// resolution within 1e-6 relative tolerance. Registration itself is assumed
// done upstream; mismatches abort with a diagnostic.
void check_alignment(const Grid& a, const Grid& b);

void require_finite(const Grid& g, const std::string& context);

}  // namespace urban
