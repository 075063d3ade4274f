#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "urban/grid.hpp"

namespace urban {

// Value histogram of the combined image: equal-width bins over [min,max],
// the maximum value lands in the last bin.
struct Histogram {
    std::vector<double> bin_edges;       // length B+1, strictly increasing
    std::vector<std::int64_t> counts;    // length B

    int bins() const { return static_cast<int>(counts.size()); }
    double bin_width() const { return bin_edges[1] - bin_edges[0]; }
    double bin_center(int b) const { return 0.5 * (bin_edges[static_cast<std::size_t>(b)] + bin_edges[static_cast<std::size_t>(b) + 1]); }
    std::int64_t total() const;

    // Interpolated percentile of the binned data, p in [0,100].
    double percentile(double p) const;
};

Histogram build_histogram(const Grid& g, int bins = 256);

// Three-component Gaussian mixture of the histogram, components sorted by
// mean. ll_trace holds the log-likelihood after every EM iteration;
// monotonicity is asserted while fitting.
struct GmmParams {
    std::array<double, 3> weights{};
    std::array<double, 3> means{};
    std::array<double, 3> stds{};
    double log_likelihood = 0.0;
    std::vector<double> ll_trace;
};

// Thrown when the mixture degenerates (fewer than 3 nonempty bins, a
// component losing all responsibility, coincident means). Callers fall back
// to quantile thresholds.
class GmmCollapseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// EM over bin centers weighted by counts. Deterministic init: means at the
// 10/50/90th percentiles, equal weights, std = data std / 3. Stops at
// |delta log-likelihood| < 1e-8 or 500 iterations; stds floored at the bin
// width.
GmmParams fit_gmm_em(const Histogram& h);

struct Intersections {
    std::optional<double> low;   // between components 0 and 1
    std::optional<double> high;  // between components 1 and 2
};

// Solves w_i N(x;mu_i,s_i) = w_j N(x;mu_j,s_j) for x in (mu_i, mu_j) per
// adjacent pair: closed-form quadratic in x, bisection on the log ratio if
// no root lies inside, absent when one component dominates the interval.
Intersections find_intersections(const GmmParams& p);

enum class ThresholdProvenance { gmm_intersection, quantile_fallback };

struct Thresholds {
    double tau_water = 0.0;
    double tau_urban = 0.0;
    double tau_center = 1.4;
    ThresholdProvenance provenance = ThresholdProvenance::gmm_intersection;
};

// tau_water from the low intersection, tau_urban from the high one; missing
// intersections fall back to the 25th/75th histogram percentile and mark
// provenance accordingly. Always returns tau_water < tau_urban (swaps and
// reports via `swapped` if the fit ordered them the other way).
Thresholds derive_thresholds(const GmmParams& p, const Histogram& h, double tau_center = 1.4,
                             bool* swapped = nullptr);

// Pure-quantile thresholds for the GMM-collapse path.
Thresholds quantile_thresholds(const Histogram& h, double tau_center = 1.4);

// Mixture pdf at x (used by reports and tests).
double gmm_pdf(const GmmParams& p, double x);

}  // namespace urban
