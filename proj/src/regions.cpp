#include "urban/regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace urban {

ResidualSeries compute_residuals(const DensityProfile& p, const GradientFit& fit) {
    ResidualSeries r;
    r.distance_km = p.bin_distance_km;
    r.residual.resize(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        r.residual[i] = p.mean_density[i] - (fit.beta + fit.alpha * p.bin_distance_km[i]);
    return r;
}

FeatureMatrix build_features(const ResidualSeries& r) {
    const auto n = r.size();
    if (n < 4) throw StageError("regions", "residual series too short (<4 bins)");

    std::vector<double> grad(n);
    for (std::size_t i = 0; i + 1 < n; ++i) grad[i] = r.residual[i + 1] - r.residual[i];
    grad[n - 1] = grad[n - 2];  // replicate the last forward difference

    FeatureMatrix f(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = std::min(i + 1, n - 1);  // +1 bin shift, edge-replicated
        f[i] = {r.residual[i], grad[i], r.residual[j], grad[j]};
    }

    // standardize each column; constant columns become zeros
    for (int c = 0; c < 4; ++c) {
        double mean = 0.0;
        for (const auto& row : f) mean += row[static_cast<std::size_t>(c)];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (const auto& row : f) {
            const double d = row[static_cast<std::size_t>(c)] - mean;
            var += d * d;
        }
        var /= static_cast<double>(n);
        if (var > 0.0) {
            const double inv_sd = 1.0 / std::sqrt(var);
            for (auto& row : f) row[static_cast<std::size_t>(c)] = (row[static_cast<std::size_t>(c)] - mean) * inv_sd;
        } else {
            for (auto& row : f) row[static_cast<std::size_t>(c)] = 0.0;
        }
    }
    return f;
}

namespace {

double sq_dist(const std::array<double, 4>& a, const std::array<double, 4>& b) {
    double s = 0.0;
    for (int c = 0; c < 4; ++c) {
        const double d = a[static_cast<std::size_t>(c)] - b[static_cast<std::size_t>(c)];
        s += d * d;
    }
    return s;
}

// Lloyd iterations with deterministic farthest-point init: centroid 0 is the
// first bin's features; each next centroid is the point farthest from the
// chosen set (lowest index on ties). Assignment ties go to the lowest
// centroid index; empty clusters keep their previous centroid.
std::vector<int> kmeans_assign(const FeatureMatrix& f, int k) {
    const auto n = f.size();
    std::vector<std::array<double, 4>> centroids;
    centroids.push_back(f[0]);
    while (static_cast<int>(centroids.size()) < k) {
        std::size_t best = 0;
        double best_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            double near = std::numeric_limits<double>::infinity();
            for (const auto& c : centroids) near = std::min(near, sq_dist(f[i], c));
            if (near > best_d) {
                best_d = near;
                best = i;
            }
        }
        centroids.push_back(f[best]);
    }

    std::vector<int> assign(n, 0);
    double prev_wcss = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 100; ++iter) {
        bool changed = false;
        double wcss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            int best_c = 0;
            double best_d = sq_dist(f[i], centroids[0]);
            for (int c = 1; c < k; ++c) {
                const double d = sq_dist(f[i], centroids[static_cast<std::size_t>(c)]);
                if (d < best_d) {
                    best_d = d;
                    best_c = c;
                }
            }
            wcss += best_d;
            if (assign[i] != best_c) {
                assign[i] = best_c;
                changed = true;
            }
        }
        if (wcss > prev_wcss + 1e-9 * std::max(1.0, prev_wcss))
            throw StageError("regions", "k-means objective increased");
        prev_wcss = wcss;
        if (!changed && iter > 0) break;

        std::vector<std::array<double, 4>> sums(static_cast<std::size_t>(k), {0, 0, 0, 0});
        std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < n; ++i) {
            for (int c = 0; c < 4; ++c) sums[static_cast<std::size_t>(assign[i])][static_cast<std::size_t>(c)] += f[i][static_cast<std::size_t>(c)];
            ++counts[static_cast<std::size_t>(assign[i])];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] == 0) continue;  // keep previous centroid
            for (int d = 0; d < 4; ++d)
                centroids[static_cast<std::size_t>(c)][static_cast<std::size_t>(d)] =
                    sums[static_cast<std::size_t>(c)][static_cast<std::size_t>(d)] / static_cast<double>(counts[static_cast<std::size_t>(c)]);
        }
    }
    return assign;
}

struct Run {
    std::size_t first = 0, last = 0;

    std::size_t bins() const { return last - first + 1; }
};

std::vector<Run> runs_from_labels(const std::vector<int>& labels) {
    std::vector<Run> runs;
    std::size_t start = 0;
    for (std::size_t i = 1; i <= labels.size(); ++i) {
        if (i == labels.size() || labels[i] != labels[i - 1]) {
            runs.push_back({start, i - 1});
            start = i;
        }
    }
    return runs;
}

double region_mean(const ResidualSeries& r, const Run& run) {
    double s = 0.0;
    for (std::size_t i = run.first; i <= run.last; ++i) s += r.residual[i];
    return s / static_cast<double>(run.bins());
}

double region_variance(const ResidualSeries& r, const Run& run) {
    const double m = region_mean(r, run);
    double v = 0.0;
    for (std::size_t i = run.first; i <= run.last; ++i) {
        const double d = r.residual[i] - m;
        v += d * d;
    }
    return v / static_cast<double>(run.bins());
}

// Pooled-variance increase caused by merging two adjacent runs.
double merge_cost(const ResidualSeries& r, const Run& a, const Run& b) {
    const double na = static_cast<double>(a.bins()), nb = static_cast<double>(b.bins());
    const double da = region_mean(r, a) - region_mean(r, b);
    return na * nb / (na + nb) * da * da;
}

// Repeatedly merge the smallest run below min_fraction into the neighbor
// with the closer mean residual (left on ties).
void merge_small_runs(std::vector<Run>& runs, const ResidualSeries& r, double min_fraction) {
    const auto total = static_cast<double>(r.size());
    while (runs.size() > 1) {
        std::size_t smallest = runs.size();
        double smallest_frac = min_fraction;
        for (std::size_t i = 0; i < runs.size(); ++i) {
            const double frac = static_cast<double>(runs[i].bins()) / total;
            if (frac < smallest_frac) {
                smallest_frac = frac;
                smallest = i;
            }
        }
        if (smallest == runs.size()) break;

        std::size_t target;
        if (smallest == 0) {
            target = 1;
        } else if (smallest + 1 == runs.size()) {
            target = smallest - 1;
        } else {
            const double jump_left =
                std::abs(region_mean(r, runs[smallest]) - region_mean(r, runs[smallest - 1]));
            const double jump_right =
                std::abs(region_mean(r, runs[smallest]) - region_mean(r, runs[smallest + 1]));
            target = (jump_left <= jump_right) ? smallest - 1 : smallest + 1;
        }
        const std::size_t lo = std::min(smallest, target), hi = std::max(smallest, target);
        runs[lo].last = runs[hi].last;
        runs.erase(runs.begin() + static_cast<std::ptrdiff_t>(hi));
    }
}

void cap_runs(std::vector<Run>& runs, const ResidualSeries& r, std::size_t max_runs) {
    while (runs.size() > max_runs) {
        std::size_t best = 0;
        double best_cost = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
            const double cost = merge_cost(r, runs[i], runs[i + 1]);
            if (cost < best_cost) {
                best_cost = cost;
                best = i;
            }
        }
        runs[best].last = runs[best + 1].last;
        runs.erase(runs.begin() + static_cast<std::ptrdiff_t>(best) + 1);
    }
}

double mean_within_variance(const std::vector<Run>& runs, const ResidualSeries& r) {
    double s = 0.0;
    for (const auto& run : runs) s += region_variance(r, run);
    return s / static_cast<double>(runs.size());
}

}  // namespace

RegionSet segment_regions(const FeatureMatrix& features, const ResidualSeries& r) {
    if (features.size() != r.size() || r.size() < 4)
        throw StageError("regions", "feature matrix does not match residual series");

    std::vector<Run> best_runs;
    int best_k = 1;
    double best_var = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 3; ++k) {
        std::vector<int> labels = (k == 1) ? std::vector<int>(r.size(), 0)
                                           : kmeans_assign(features, k);
        std::vector<Run> runs = runs_from_labels(labels);
        merge_small_runs(runs, r, 0.05);
        const double var = mean_within_variance(runs, r);
        // lexicographic: more regions first, then lower within-region variance
        if (runs.size() > best_runs.size() ||
            (runs.size() == best_runs.size() && var < best_var)) {
            best_runs = runs;
            best_k = k;
            best_var = var;
        }
    }
    cap_runs(best_runs, r, 3);

    RegionSet rs;
    rs.k_selected = best_k;
    rs.regions.reserve(best_runs.size());
    for (std::size_t i = 0; i < best_runs.size(); ++i) {
        Region reg;
        reg.first_bin = best_runs[i].first;
        reg.last_bin = best_runs[i].last;
        // shared boundaries: a region ends where the next one starts
        reg.start_km = (i == 0) ? r.distance_km.front() : r.distance_km[best_runs[i].first];
        reg.end_km = (i + 1 == best_runs.size()) ? r.distance_km.back()
                                                 : r.distance_km[best_runs[i + 1].first];
        reg.fraction = static_cast<double>(best_runs[i].bins()) / static_cast<double>(r.size());
        rs.regions.push_back(reg);
    }
    return rs;
}

RegionSet label_regions(RegionSet rs, const ResidualSeries& r) {
    double mean = 0.0;
    for (double v : r.residual) mean += v;
    mean /= static_cast<double>(r.size());
    double var = 0.0;
    for (double v : r.residual) var += (v - mean) * (v - mean);
    var /= static_cast<double>(r.size());
    rs.overall_std = std::sqrt(var);

    for (auto& reg : rs.regions) {
        reg.std_dev = std::sqrt(region_variance(r, {reg.first_bin, reg.last_bin}));
        if (rs.overall_std == 0.0) {
            reg.label = RegionLabel::uniform;  // degenerate flat series
        } else {
            reg.label = (reg.std_dev < 0.7 * rs.overall_std) ? RegionLabel::uniform
                                                             : RegionLabel::variation;
        }
    }
    return rs;
}

}  // namespace urban
