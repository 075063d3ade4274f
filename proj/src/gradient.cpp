#include "urban/gradient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace urban {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1-D squared-distance transform via the lower envelope of parabolas
// (Felzenszwalb & Huttenlocher). f is the input row, d the output.
void dt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
           std::vector<double>& z) {
    const int n = static_cast<int>(f.size());
    int k = 0;
    v[0] = 0;
    z[0] = -kInf;
    z[1] = kInf;
    for (int q = 1; q < n; ++q) {
        if (f[static_cast<std::size_t>(q)] == kInf) continue;
        if (f[static_cast<std::size_t>(v[0])] == kInf) {
            v[0] = q;
            continue;
        }
        double s;
        while (true) {
            const int p = v[k];
            s = ((f[static_cast<std::size_t>(q)] + static_cast<double>(q) * q) -
                 (f[static_cast<std::size_t>(p)] + static_cast<double>(p) * p)) /
                (2.0 * q - 2.0 * p);
            if (s <= z[static_cast<std::size_t>(k)]) {
                --k;
            } else {
                break;
            }
        }
        ++k;
        v[static_cast<std::size_t>(k)] = q;
        z[static_cast<std::size_t>(k)] = s;
        z[static_cast<std::size_t>(k) + 1] = kInf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[static_cast<std::size_t>(k) + 1] < q) ++k;
        const int p = v[static_cast<std::size_t>(k)];
        const double dq = q - p;
        d[static_cast<std::size_t>(q)] = dq * dq + f[static_cast<std::size_t>(p)];
    }
}

}  // namespace

Grid distance_transform(const Mask& centers, double resolution_m) {
    if (centers.empty_mask())
        throw StageError("distance-transform", "center mask is empty");
    const int W = centers.width, H = centers.height;
    Grid sq(W, H, resolution_m);

    // columns first: squared distance to nearest center within each column
    {
        std::vector<double> f(static_cast<std::size_t>(H)), d(static_cast<std::size_t>(H));
        std::vector<int> v(static_cast<std::size_t>(H));
        std::vector<double> z(static_cast<std::size_t>(H) + 1);
        for (int x = 0; x < W; ++x) {
            for (int y = 0; y < H; ++y) f[static_cast<std::size_t>(y)] = centers.at(x, y) ? 0.0 : kInf;
            dt_1d(f, d, v, z);
            for (int y = 0; y < H; ++y) sq.at(x, y) = d[static_cast<std::size_t>(y)];
        }
    }
    // then rows
    {
        std::vector<double> f(static_cast<std::size_t>(W)), d(static_cast<std::size_t>(W));
        std::vector<int> v(static_cast<std::size_t>(W));
        std::vector<double> z(static_cast<std::size_t>(W) + 1);
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) f[static_cast<std::size_t>(x)] = sq.at(x, y);
            dt_1d(f, d, v, z);
            for (int x = 0; x < W; ++x) sq.at(x, y) = std::sqrt(d[static_cast<std::size_t>(x)]);
        }
    }
    return sq;
}

DensityProfile extract_profile(const Grid& dist, const Grid& rho, const Mask& u_final) {
    check_alignment(dist, rho);
    if (rho.width != u_final.width || rho.height != u_final.height)
        throw InputError("extract_profile: mask does not match grid");
    if (u_final.empty_mask()) throw StageError("profile", "urban mask is empty");

    // bin index -> densities of member pixels
    std::map<std::int64_t, std::vector<double>> bins;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (!u_final.bits[i]) continue;
        const auto d = static_cast<std::int64_t>(std::floor(dist.values[i]));
        bins[d].push_back(rho.values[i]);
    }

    const double km_per_bin = rho.resolution_m / 1000.0;
    DensityProfile p;
    p.bin_distance_km.reserve(bins.size());
    for (auto& [d, vals] : bins) {
        std::sort(vals.begin(), vals.end());
        double sum = 0.0;
        for (double v : vals) sum += v;
        const auto n = vals.size();
        auto quantile = [&](double q) {
            if (n == 1) return vals[0];
            const double pos = q * static_cast<double>(n - 1);
            const auto lo = static_cast<std::size_t>(pos);
            const double frac = pos - static_cast<double>(lo);
            if (lo + 1 >= n) return vals[n - 1];
            return vals[lo] + frac * (vals[lo + 1] - vals[lo]);
        };
        p.bin_distance_km.push_back(static_cast<double>(d) * km_per_bin);
        p.mean_density.push_back(sum / static_cast<double>(n));
        p.pixel_count.push_back(static_cast<std::int64_t>(n));
        p.q25.push_back(quantile(0.25));
        p.q75.push_back(quantile(0.75));
    }
    return p;
}

MinimaResult find_local_minima(const DensityProfile& p, int window) {
    const auto n = p.size();
    if (n < 3) throw StageError("minima", "profile has fewer than 3 bins");
    const int hw = std::max(1, window / 2);

    MinimaResult out;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const std::size_t lo = (i >= static_cast<std::size_t>(hw)) ? i - static_cast<std::size_t>(hw) : 0;
        const std::size_t hi = std::min(n - 1, i + static_cast<std::size_t>(hw));
        bool strict_min = true;
        for (std::size_t j = lo; j <= hi && strict_min; ++j) {
            if (j == i) continue;
            if (!(p.mean_density[i] < p.mean_density[j])) strict_min = false;
        }
        if (strict_min) out.points.emplace_back(p.bin_distance_km[i], p.mean_density[i]);
    }
    if (out.points.size() < 2) {
        out.used_fallback = true;
        out.points.clear();
        for (std::size_t i = 0; i < n; ++i)
            out.points.emplace_back(p.bin_distance_km[i], p.mean_density[i]);
    }
    return out;
}

GradientFit fit_gradient(const std::vector<std::pair<double, double>>& points) {
    const auto n = points.size();
    if (n < 2) throw StageError("fit", "need at least 2 points for the regression");

    double mean_d = 0.0, mean_r = 0.0;
    for (const auto& [d, r] : points) {
        mean_d += d;
        mean_r += r;
    }
    mean_d /= static_cast<double>(n);
    mean_r /= static_cast<double>(n);

    double sdd = 0.0, sdr = 0.0, srr = 0.0;
    for (const auto& [d, r] : points) {
        const double dd = d - mean_d, dr = r - mean_r;
        sdd += dd * dd;
        sdr += dd * dr;
        srr += dr * dr;
    }
    if (sdd == 0.0) throw StageError("fit", "degenerate regression: all distances identical");

    GradientFit fit;
    fit.alpha = sdr / sdd;
    fit.beta = mean_r - fit.alpha * mean_d;
    fit.r_squared = (srr == 0.0) ? 1.0 : (sdr * sdr) / (sdd * srr);
    fit.points = points;
    return fit;
}

double compute_ld(const GradientFit& fit, double rho_target) {
    if (fit.alpha == 0.0) throw StageError("ld", "flat gradient, LD undefined");
    return (rho_target - fit.beta) / fit.alpha;
}

std::vector<Peak> detect_peaks(const DensityProfile& p, double prominence_factor) {
    const auto n = p.size();
    if (n < 3) throw StageError("peaks", "profile has fewer than 3 bins");
    const auto [mn_it, mx_it] = std::minmax_element(p.mean_density.begin(), p.mean_density.end());
    const double threshold = prominence_factor * (*mx_it - *mn_it);

    std::vector<Peak> peaks;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double v = p.mean_density[i];
        if (!(v > p.mean_density[i - 1] && v > p.mean_density[i + 1])) continue;

        // lowest value between the peak and the nearest strictly higher
        // value on each side; ends act as higher barriers
        double left_min = v;
        for (std::size_t j = i; j-- > 0;) {
            if (p.mean_density[j] > v) break;
            left_min = std::min(left_min, p.mean_density[j]);
        }
        double right_min = v;
        for (std::size_t j = i + 1; j < n; ++j) {
            if (p.mean_density[j] > v) break;
            right_min = std::min(right_min, p.mean_density[j]);
        }
        const double prominence = v - std::min(left_min, right_min);
        if (prominence > threshold)
            peaks.push_back({p.bin_distance_km[i], v, prominence, i});
    }
    return peaks;
}

Morphology classify_morphology(const std::vector<Peak>& peaks, bool* no_distinct_peak) {
    if (no_distinct_peak) *no_distinct_peak = peaks.empty();
    return peaks.size() <= 1 ? Morphology::monocentric : Morphology::polycentric;
}

}  // namespace urban
