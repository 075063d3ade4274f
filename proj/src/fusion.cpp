#include "urban/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace urban {

void FusionConfig::validate() const {
    if (!(blur_sigma > 0)) throw InputError("blur_sigma must be > 0");
    if (w_optical < 0 || w_sar < 0) throw InputError("fusion weights must be >= 0");
    if (!(w_optical + w_sar > 0)) throw InputError("fusion weights must not both be zero");
    if (nlm_patch < 3 || nlm_patch % 2 == 0) throw InputError("nlm_patch must be odd and >= 3");
    if (nlm_search < 3 || nlm_search % 2 == 0) throw InputError("nlm_search must be odd and >= 3");
    if (!(nlm_strength > 0)) throw InputError("nlm_strength must be > 0");
}

Grid sobel_magnitude(const Grid& g) {
    if (g.width < 3 || g.height < 3) throw InputError("sobel_magnitude: grid smaller than 3x3");
    Grid out = g.like();
    for (int y = 0; y < g.height; ++y) {
        for (int x = 0; x < g.width; ++x) {
            const double tl = g.at_clamped(x - 1, y - 1), tc = g.at_clamped(x, y - 1),
                         tr = g.at_clamped(x + 1, y - 1);
            const double ml = g.at_clamped(x - 1, y), mr = g.at_clamped(x + 1, y);
            const double bl = g.at_clamped(x - 1, y + 1), bc = g.at_clamped(x, y + 1),
                         br = g.at_clamped(x + 1, y + 1);
            const double gx = (tr + 2.0 * mr + br) - (tl + 2.0 * ml + bl);
            const double gy = (bl + 2.0 * bc + br) - (tl + 2.0 * tc + tr);
            out.at(x, y) = std::sqrt(gx * gx + gy * gy);
        }
    }
    return out;
}

namespace {

// 1D taps at |i| <= floor(3*sigma), normalized to sum 1.
std::vector<double> gaussian_kernel_1d(double sigma) {
    const int radius = std::max(1, static_cast<int>(std::floor(3.0 * sigma)));
    std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double w = std::exp(-0.5 * (i * i) / (sigma * sigma));
        k[static_cast<std::size_t>(i + radius)] = w;
        sum += w;
    }
    for (auto& w : k) w /= sum;
    return k;
}

}  // namespace

Grid gaussian_blur(const Grid& g, double sigma) {
    if (!(sigma > 0)) throw InputError("gaussian_blur: sigma must be > 0");
    const auto k = gaussian_kernel_1d(sigma);
    const int radius = static_cast<int>(k.size() / 2);

    Grid tmp = g.like();
    for (int y = 0; y < g.height; ++y) {
        for (int x = 0; x < g.width; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += k[static_cast<std::size_t>(i + radius)] * g.at_clamped(x + i, y);
            tmp.at(x, y) = acc;
        }
    }
    Grid out = g.like();
    for (int y = 0; y < g.height; ++y) {
        for (int x = 0; x < g.width; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += k[static_cast<std::size_t>(i + radius)] * tmp.at_clamped(x, y + i);
            out.at(x, y) = acc;
        }
    }
    return out;
}

Grid edge_density(const Grid& edges, const FusionConfig& cfg) {
    return normalize_minmax(gaussian_blur(edges, cfg.blur_sigma));
}

Grid combine(const Grid& edge_density, const Grid& sar_norm, const FusionConfig& cfg) {
    check_alignment(edge_density, sar_norm);
    Grid out = edge_density.like();
    for (std::size_t i = 0; i < out.size(); ++i)
        out.values[i] = cfg.w_optical * edge_density.values[i] + cfg.w_sar * sar_norm.values[i];
    return out;
}

// Computed per search offset via a summed-area table of the padded squared
// difference image, so patch distances for all pixels cost O(1) each. Patch
// and neighbor sampling both use coordinate clamping (edge replication).
Grid nlm_denoise(const Grid& g, const FusionConfig& cfg, bool* passed_through) {
    cfg.validate();
    if (passed_through) *passed_through = false;
    if (g.width < cfg.nlm_search || g.height < cfg.nlm_search) {
        if (passed_through) *passed_through = true;
        return g;
    }

    auto [mn_it, mx_it] = std::minmax_element(g.values.begin(), g.values.end());
    const double range = *mx_it - *mn_it;
    const double h = cfg.nlm_strength * range;
    if (h == 0.0) return g;  // constant grid: all weights equal, average is the constant
    const double inv_h2 = 1.0 / (h * h);

    const int S = (cfg.nlm_search - 1) / 2;
    const int r = (cfg.nlm_patch - 1) / 2;
    const int W = g.width, H = g.height;
    const double patch_area = static_cast<double>(cfg.nlm_patch) * cfg.nlm_patch;

    const int PW = W + 2 * r, PH = H + 2 * r;
    std::vector<double> diff(static_cast<std::size_t>(PW) * static_cast<std::size_t>(PH));
    std::vector<double> sat(static_cast<std::size_t>(PW + 1) * static_cast<std::size_t>(PH + 1));

    std::vector<double> wsum(g.size(), 0.0), vsum(g.size(), 0.0);

    auto clampc = [](int v, int hi) { return v < 0 ? 0 : (v >= hi ? hi - 1 : v); };

    for (int dy = -S; dy <= S; ++dy) {
        for (int dx = -S; dx <= S; ++dx) {
            // diff(q) = (g(clamp q) - g(clamp q+o))^2 over the r-padded domain
            for (int py = 0; py < PH; ++py) {
                const int qy = py - r;
                const int ay = clampc(qy, H), by = clampc(qy + dy, H);
                for (int px = 0; px < PW; ++px) {
                    const int qx = px - r;
                    const double d =
                        g.at(clampc(qx, W), ay) - g.at(clampc(qx + dx, W), by);
                    diff[static_cast<std::size_t>(py) * PW + px] = d * d;
                }
            }
            // summed-area table, sat[(y+1)(PW+1)+(x+1)] = sum over [0..x]x[0..y]
            for (int py = 0; py < PH; ++py) {
                double rowsum = 0.0;
                const std::size_t base = static_cast<std::size_t>(py) * PW;
                const std::size_t sbase = static_cast<std::size_t>(py + 1) * (PW + 1);
                const std::size_t pbase = static_cast<std::size_t>(py) * (PW + 1);
                for (int px = 0; px < PW; ++px) {
                    rowsum += diff[base + px];
                    sat[sbase + px + 1] = sat[pbase + px + 1] + rowsum;
                }
            }
            for (int y = 0; y < H; ++y) {
                const int ny = clampc(y + dy, H);
                for (int x = 0; x < W; ++x) {
                    // patch box [x-r..x+r]x[y-r..y+r] maps to padded [x..x+2r]
                    const std::size_t x0 = static_cast<std::size_t>(x);
                    const std::size_t y0 = static_cast<std::size_t>(y);
                    const double box =
                        sat[(y0 + 2 * r + 1) * (PW + 1) + (x0 + 2 * r + 1)] -
                        sat[y0 * (PW + 1) + (x0 + 2 * r + 1)] -
                        sat[(y0 + 2 * r + 1) * (PW + 1) + x0] + sat[y0 * (PW + 1) + x0];
                    const double d2 = box / patch_area;
                    const double t = d2 * inv_h2;
                    // e^-40 ~ 4e-18: below accumulation noise, safe to drop
                    if (t > 40.0) continue;
                    const double w = std::exp(-t);
                    const std::size_t i = g.idx(x, y);
                    wsum[i] += w;
                    vsum[i] += w * g.at(clampc(x + dx, W), ny);
                }
            }
        }
    }

    Grid out = g.like();
    for (std::size_t i = 0; i < g.size(); ++i) out.values[i] = vsum[i] / wsum[i];
    return out;
}

}  // namespace urban
