// Brute-force reference implementations used as independent oracles.
// Deliberately naive and kept apart from the library code paths they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "urban/grid.hpp"

namespace oracle {

inline int clampi(int v, int hi) { return v < 0 ? 0 : (v >= hi ? hi - 1 : v); }

// Direct 2-D Gaussian convolution with clamped sampling; kernel taps at
// |i| <= floor(3*sigma), normalized to sum 1.
inline urban::Grid gaussian_conv_2d(const urban::Grid& g, double sigma) {
    const int radius = std::max(1, static_cast<int>(std::floor(3.0 * sigma)));
    const int k = 2 * radius + 1;
    std::vector<double> kern(static_cast<std::size_t>(k) * k);
    double sum = 0.0;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx) {
            const double w = std::exp(-0.5 * (dx * dx + dy * dy) / (sigma * sigma));
            kern[static_cast<std::size_t>(dy + radius) * k + (dx + radius)] = w;
            sum += w;
        }
    for (auto& w : kern) w /= sum;

    urban::Grid out = g.like();
    for (int y = 0; y < g.height; ++y)
        for (int x = 0; x < g.width; ++x) {
            double acc = 0.0;
            for (int dy = -radius; dy <= radius; ++dy)
                for (int dx = -radius; dx <= radius; ++dx)
                    acc += kern[static_cast<std::size_t>(dy + radius) * k + (dx + radius)] *
                           g.at(clampi(x + dx, g.width), clampi(y + dy, g.height));
            out.at(x, y) = acc;
        }
    return out;
}

// Gaussian kernel center weight for the same radius rule.
inline double gaussian_center_weight(double sigma) {
    const int radius = std::max(1, static_cast<int>(std::floor(3.0 * sigma)));
    double sum = 0.0;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            sum += std::exp(-0.5 * (dx * dx + dy * dy) / (sigma * sigma));
    return 1.0 / sum;
}

// Naive non-local means, the quadruple loop straight from the definition.
inline urban::Grid nlm_naive(const urban::Grid& g, int patch, int search, double strength) {
    const int S = (search - 1) / 2, r = (patch - 1) / 2;
    const auto [mn, mx] = std::minmax_element(g.values.begin(), g.values.end());
    const double h = strength * (*mx - *mn);
    if (h == 0.0) return g;
    const double inv_h2 = 1.0 / (h * h);
    const double area = static_cast<double>(patch) * patch;

    urban::Grid out = g.like();
    for (int y = 0; y < g.height; ++y)
        for (int x = 0; x < g.width; ++x) {
            double wsum = 0.0, vsum = 0.0;
            for (int dy = -S; dy <= S; ++dy)
                for (int dx = -S; dx <= S; ++dx) {
                    double d2 = 0.0;
                    for (int py = -r; py <= r; ++py)
                        for (int px = -r; px <= r; ++px) {
                            const double a =
                                g.at(clampi(x + px, g.width), clampi(y + py, g.height));
                            const double b = g.at(clampi(x + dx + px, g.width),
                                                  clampi(y + dy + py, g.height));
                            d2 += (a - b) * (a - b);
                        }
                    d2 /= area;
                    const double w = std::exp(-d2 * inv_h2);
                    wsum += w;
                    vsum += w * g.at(clampi(x + dx, g.width), clampi(y + dy, g.height));
                }
            out.at(x, y) = vsum / wsum;
        }
    return out;
}

// Exact nearest-center distance by scanning every center pixel.
inline urban::Grid edt_brute(const urban::Mask& centers, double resolution_m) {
    std::vector<std::pair<int, int>> pts;
    for (int y = 0; y < centers.height; ++y)
        for (int x = 0; x < centers.width; ++x)
            if (centers.at(x, y)) pts.emplace_back(x, y);

    urban::Grid out(centers.width, centers.height, resolution_m);
    for (int y = 0; y < centers.height; ++y)
        for (int x = 0; x < centers.width; ++x) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& [cx, cy] : pts) {
                const double dx = x - cx, dy = y - cy;
                best = std::min(best, dx * dx + dy * dy);
            }
            out.at(x, y) = std::sqrt(best);
        }
    return out;
}

// Eq.-style raw-moment least squares in long double.
struct OlsResult {
    double slope, intercept;
};

inline OlsResult ols_raw_moments(const std::vector<std::pair<double, double>>& pts) {
    long double n = static_cast<long double>(pts.size());
    long double sd = 0, sr = 0, sdr = 0, sdd = 0;
    for (const auto& [d, r] : pts) {
        sd += d;
        sr += r;
        sdr += static_cast<long double>(d) * r;
        sdd += static_cast<long double>(d) * d;
    }
    const long double slope = (n * sdr - sd * sr) / (n * sdd - sd * sd);
    const long double intercept = (sr - slope * sd) / n;
    return {static_cast<double>(slope), static_cast<double>(intercept)};
}

// O(n^2) prominence enumeration: for every strict local maximum, walk out to
// the nearest strictly higher samples and take the lower of the two interior
// minima; ends count as higher barriers.
struct BrutePeak {
    std::size_t index;
    double value, prominence;
};

inline std::vector<BrutePeak> peaks_brute(const std::vector<double>& v, double factor) {
    std::vector<BrutePeak> out;
    if (v.size() < 3) return out;
    const double lo = *std::min_element(v.begin(), v.end());
    const double hi = *std::max_element(v.begin(), v.end());
    const double thresh = factor * (hi - lo);
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        if (!(v[i] > v[i - 1] && v[i] > v[i + 1])) continue;
        double left_min = v[i];
        for (std::size_t j = i; j > 0;) {
            --j;
            if (v[j] > v[i]) break;
            left_min = std::min(left_min, v[j]);
        }
        double right_min = v[i];
        for (std::size_t j = i + 1; j < v.size(); ++j) {
            if (v[j] > v[i]) break;
            right_min = std::min(right_min, v[j]);
        }
        const double prom = v[i] - std::min(left_min, right_min);
        if (prom > thresh) out.push_back({i, v[i], prom});
    }
    return out;
}

// Dense scan for the x where two weighted normal pdfs cross inside
// (mu_i, mu_j), refined by interval halving on the difference.
inline std::optional<double> intersection_scan(double wi, double mi, double si, double wj,
                                               double mj, double sj, double step_frac = 1e-4) {
    auto f = [&](double x) {
        const double zi = (x - mi) / si, zj = (x - mj) / sj;
        return wi / si * std::exp(-0.5 * zi * zi) - wj / sj * std::exp(-0.5 * zj * zj);
    };
    const double span = mj - mi;
    const double step = span * step_frac;
    double prev_x = mi + step, prev_f = f(prev_x);
    for (double x = prev_x + step; x < mj; x += step) {
        const double fx = f(x);
        if ((fx > 0) != (prev_f > 0) || fx == 0.0) {
            double a = prev_x, b = x, fa = prev_f;
            for (int it = 0; it < 100; ++it) {
                const double m = 0.5 * (a + b);
                const double fm = f(m);
                if ((fm > 0) == (fa > 0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            return 0.5 * (a + b);
        }
        prev_x = x;
        prev_f = fx;
    }
    return std::nullopt;
}

// Independent component areas: two-pass labeling with union-find,
// 8-connectivity.
inline std::vector<std::int64_t> component_areas_unionfind(const urban::Mask& m) {
    const int W = m.width, H = m.height;
    std::vector<int> label(static_cast<std::size_t>(W) * H, -1);
    std::vector<int> parent;
    auto find = [&](int a) {
        while (parent[static_cast<std::size_t>(a)] != a) {
            parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
            a = parent[static_cast<std::size_t>(a)];
        }
        return a;
    };
    auto unite = [&](int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    };
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            if (!m.at(x, y)) continue;
            const std::size_t i = m.idx(x, y);
            // earlier neighbors: W, NW, N, NE
            const int nbr[4][2] = {{-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
            int found = -1;
            for (const auto& d : nbr) {
                const int nx = x + d[0], ny = y + d[1];
                if (nx < 0 || nx >= W || ny < 0) continue;
                if (!m.at(nx, ny)) continue;
                const int nl = label[m.idx(nx, ny)];
                if (found < 0)
                    found = find(nl);
                else
                    unite(found, nl);
            }
            if (found < 0) {
                found = static_cast<int>(parent.size());
                parent.push_back(found);
            }
            label[i] = find(found);
        }
    std::vector<std::int64_t> areas(parent.size(), 0);
    for (std::size_t i = 0; i < label.size(); ++i)
        if (label[i] >= 0) ++areas[static_cast<std::size_t>(find(label[i]))];
    std::vector<std::int64_t> out;
    for (auto a : areas)
        if (a > 0) out.push_back(a);
    return out;
}

}  // namespace oracle
