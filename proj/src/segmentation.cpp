#include "urban/segmentation.hpp"

#include <algorithm>

namespace urban {

std::vector<std::uint8_t> classify(const Grid& rho, const Thresholds& t) {
    std::vector<std::uint8_t> classes(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const double v = rho.values[i];
        if (v < t.tau_water)
            classes[i] = static_cast<std::uint8_t>(SegClass::water);
        else if (v < t.tau_urban)
            classes[i] = static_cast<std::uint8_t>(SegClass::terrain);
        else
            classes[i] = static_cast<std::uint8_t>(SegClass::urban);
    }
    return classes;
}

Mask mask_of_class(const std::vector<std::uint8_t>& classes, int width, int height, SegClass c) {
    Mask m(width, height);
    for (std::size_t i = 0; i < classes.size(); ++i)
        m.bits[i] = (classes[i] == static_cast<std::uint8_t>(c)) ? 1 : 0;
    return m;
}

Mask dilate(const Mask& m, int k) {
    const int r = k / 2;
    Mask out(m.width, m.height);
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            bool hit = false;
            for (int dy = -r; dy <= r && !hit; ++dy) {
                const int ny = y + dy;
                if (ny < 0 || ny >= m.height) continue;
                for (int dx = -r; dx <= r; ++dx) {
                    const int nx = x + dx;
                    if (nx < 0 || nx >= m.width) continue;
                    if (m.at(nx, ny)) {
                        hit = true;
                        break;
                    }
                }
            }
            out.set(x, y, hit);
        }
    }
    return out;
}

Mask erode(const Mask& m, int k) {
    const int r = k / 2;
    Mask out(m.width, m.height);
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            bool all = true;
            for (int dy = -r; dy <= r && all; ++dy) {
                const int ny = y + dy;
                for (int dx = -r; dx <= r; ++dx) {
                    const int nx = x + dx;
                    // outside the grid counts as background
                    if (nx < 0 || nx >= m.width || ny < 0 || ny >= m.height || !m.at(nx, ny)) {
                        all = false;
                        break;
                    }
                }
            }
            out.set(x, y, all);
        }
    }
    return out;
}

namespace {

Mask pad_mask(const Mask& m, int p) {
    Mask out(m.width + 2 * p, m.height + 2 * p);
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x)
            if (m.at(x, y)) out.set(x + p, y + p, true);
    return out;
}

Mask crop_mask(const Mask& m, int p, int w, int h) {
    Mask out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (m.at(x + p, y + p)) out.set(x, y, true);
    return out;
}

}  // namespace

// Composed ops run on a padded domain so the intermediate dilation can
// extend past the grid like it would on the infinite plane; cropping at the
// end loses nothing because erosion pulls the support back inside.
Mask close_mask(const Mask& m, int k) {
    const int r = k / 2;
    const Mask padded = pad_mask(m, r);
    return crop_mask(erode(dilate(padded, k), k), r, m.width, m.height);
}

Mask refine_urban_mask(const Mask& u) {
    const int r = 4;  // dilate support + closing support
    const Mask padded = dilate(pad_mask(u, r), 5);
    return crop_mask(erode(dilate(padded, 5), 5), r, u.width, u.height);
}

namespace {

// row-major scan, BFS per component, 8-connectivity
template <typename Visit>
void for_each_component(const Mask& m, Visit&& visit) {
    std::vector<std::int32_t> label(m.bits.size(), 0);
    std::vector<std::size_t> stack;
    std::int32_t next = 0;
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            const std::size_t start = m.idx(x, y);
            if (!m.bits[start] || label[start]) continue;
            ++next;
            label[start] = next;
            stack.assign(1, start);
            std::vector<std::size_t> pixels;
            while (!stack.empty()) {
                const std::size_t i = stack.back();
                stack.pop_back();
                pixels.push_back(i);
                const int cx = static_cast<int>(i % static_cast<std::size_t>(m.width));
                const int cy = static_cast<int>(i / static_cast<std::size_t>(m.width));
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        const int nx = cx + dx, ny = cy + dy;
                        if (nx < 0 || nx >= m.width || ny < 0 || ny >= m.height) continue;
                        const std::size_t ni = m.idx(nx, ny);
                        if (m.bits[ni] && !label[ni]) {
                            label[ni] = next;
                            stack.push_back(ni);
                        }
                    }
                }
            }
            visit(pixels);
        }
    }
}

}  // namespace

std::vector<std::int64_t> component_areas(const Mask& m) {
    std::vector<std::int64_t> areas;
    for_each_component(m, [&](const std::vector<std::size_t>& px) {
        areas.push_back(static_cast<std::int64_t>(px.size()));
    });
    return areas;
}

Mask filter_components(const Mask& u, int min_component_px, int* component_count) {
    Mask out(u.width, u.height);
    int kept = 0;
    for_each_component(u, [&](const std::vector<std::size_t>& px) {
        if (static_cast<std::int64_t>(px.size()) >= min_component_px) {
            ++kept;
            for (auto i : px) out.bits[i] = 1;
        }
    });
    if (component_count) *component_count = kept;
    return out;
}

Mask identify_centers(const Grid& rho, const Mask& u_final, const Thresholds& t) {
    if (rho.width != u_final.width || rho.height != u_final.height)
        throw InputError("identify_centers: mask does not match grid");
    Mask c(rho.width, rho.height);
    bool any = false;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const bool is_center = rho.values[i] > t.tau_center && u_final.bits[i];
        c.bits[i] = is_center ? 1 : 0;
        any = any || is_center;
    }
    if (!any)
        throw StageError("centers", "no urban centers found (no pixel exceeds tau_center inside the urban mask)");
    return c;
}

std::vector<std::uint8_t> segmentation_indices(const SegmentationMap& seg) {
    std::vector<std::uint8_t> idx = seg.classes;
    for (std::size_t i = 0; i < idx.size(); ++i)
        if (seg.centers.bits[i]) idx[i] = 4;
    return idx;
}

}  // namespace urban
