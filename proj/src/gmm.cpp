#include "urban/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace urban {

std::int64_t Histogram::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

double Histogram::percentile(double p) const {
    const double target = (p / 100.0) * static_cast<double>(total());
    double cum = 0.0;
    for (int b = 0; b < bins(); ++b) {
        const double next = cum + static_cast<double>(counts[static_cast<std::size_t>(b)]);
        if (next >= target) {
            const double c = static_cast<double>(counts[static_cast<std::size_t>(b)]);
            const double frac = c > 0 ? (target - cum) / c : 0.0;
            return bin_edges[static_cast<std::size_t>(b)] + frac * bin_width();
        }
        cum = next;
    }
    return bin_edges.back();
}

Histogram build_histogram(const Grid& g, int bins) {
    if (g.empty()) throw InputError("build_histogram: empty grid");
    if (bins < 2) throw InputError("build_histogram: need at least 2 bins");
    auto [mn_it, mx_it] = std::minmax_element(g.values.begin(), g.values.end());
    const double mn = *mn_it, mx = *mx_it;
    if (mx == mn)
        throw StageError("histogram", "degenerate histogram: constant image, no urban/water separation exists");

    Histogram h;
    h.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int b = 0; b <= bins; ++b)
        h.bin_edges[static_cast<std::size_t>(b)] = mn + (mx - mn) * static_cast<double>(b) / bins;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    const double inv_w = bins / (mx - mn);
    for (double v : g.values) {
        int b = static_cast<int>((v - mn) * inv_w);
        if (b >= bins) b = bins - 1;  // max value goes in the last bin
        ++h.counts[static_cast<std::size_t>(b)];
    }
    return h;
}

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;

double normal_pdf(double x, double mu, double sigma) {
    const double z = (x - mu) / sigma;
    return kInvSqrt2Pi / sigma * std::exp(-0.5 * z * z);
}

}  // namespace

double gmm_pdf(const GmmParams& p, double x) {
    double s = 0.0;
    for (int k = 0; k < 3; ++k) s += p.weights[static_cast<std::size_t>(k)] * normal_pdf(x, p.means[static_cast<std::size_t>(k)], p.stds[static_cast<std::size_t>(k)]);
    return s;
}

GmmParams fit_gmm_em(const Histogram& h) {
    const int B = h.bins();
    int nonempty = 0;
    for (auto c : h.counts) nonempty += (c > 0);
    if (nonempty < 3) throw GmmCollapseError("fewer than 3 nonempty histogram bins");

    const double n_total = static_cast<double>(h.total());
    const double std_floor = h.bin_width();

    // weighted mean/std of the binned data
    double mean = 0.0;
    for (int b = 0; b < B; ++b) mean += static_cast<double>(h.counts[static_cast<std::size_t>(b)]) * h.bin_center(b);
    mean /= n_total;
    double var = 0.0;
    for (int b = 0; b < B; ++b) {
        const double d = h.bin_center(b) - mean;
        var += static_cast<double>(h.counts[static_cast<std::size_t>(b)]) * d * d;
    }
    var /= n_total;

    GmmParams p;
    p.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    p.means = {h.percentile(10), h.percentile(50), h.percentile(90)};
    const double s0 = std::max(std::sqrt(var) / 3.0, std_floor);
    p.stds = {s0, s0, s0};

    std::vector<double> resp(static_cast<std::size_t>(B) * 3);
    double prev_ll = -std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < 500; ++iter) {
        // E step + log-likelihood
        double ll = 0.0;
        for (int b = 0; b < B; ++b) {
            if (h.counts[static_cast<std::size_t>(b)] == 0) {
                for (int k = 0; k < 3; ++k) resp[static_cast<std::size_t>(b) * 3 + static_cast<std::size_t>(k)] = 0.0;
                continue;
            }
            const double x = h.bin_center(b);
            double comp[3], sum = 0.0;
            for (int k = 0; k < 3; ++k) {
                comp[k] = p.weights[static_cast<std::size_t>(k)] * normal_pdf(x, p.means[static_cast<std::size_t>(k)], p.stds[static_cast<std::size_t>(k)]);
                sum += comp[k];
            }
            if (!(sum > 0.0) || !std::isfinite(sum))
                throw GmmCollapseError("vanishing mixture density during EM");
            for (int k = 0; k < 3; ++k) resp[static_cast<std::size_t>(b) * 3 + static_cast<std::size_t>(k)] = comp[k] / sum;
            ll += static_cast<double>(h.counts[static_cast<std::size_t>(b)]) * std::log(sum);
        }

        if (!p.ll_trace.empty()) {
            // EM guarantee, modulo the std floor clamp; tiny slack for rounding
            const double slack = 1e-9 * std::max(1.0, std::abs(prev_ll));
            if (ll < prev_ll - slack)
                throw StageError("gmm", "EM log-likelihood decreased");
        }
        p.ll_trace.push_back(ll);
        p.log_likelihood = ll;
        const bool converged = std::isfinite(prev_ll) && std::abs(ll - prev_ll) < 1e-8;
        prev_ll = ll;
        if (converged) break;

        // M step
        for (int k = 0; k < 3; ++k) {
            double nk = 0.0, mu = 0.0;
            for (int b = 0; b < B; ++b) {
                const double w = static_cast<double>(h.counts[static_cast<std::size_t>(b)]) * resp[static_cast<std::size_t>(b) * 3 + static_cast<std::size_t>(k)];
                nk += w;
                mu += w * h.bin_center(b);
            }
            if (nk < 1e-10 * n_total)
                throw GmmCollapseError("component lost all responsibility");
            mu /= nk;
            double v = 0.0;
            for (int b = 0; b < B; ++b) {
                const double w = static_cast<double>(h.counts[static_cast<std::size_t>(b)]) * resp[static_cast<std::size_t>(b) * 3 + static_cast<std::size_t>(k)];
                const double d = h.bin_center(b) - mu;
                v += w * d * d;
            }
            v /= nk;
            p.weights[static_cast<std::size_t>(k)] = nk / n_total;
            p.means[static_cast<std::size_t>(k)] = mu;
            p.stds[static_cast<std::size_t>(k)] = std::max(std::sqrt(v), std_floor);
        }
    }

    // canonical order: sort components by mean
    std::array<int, 3> order = {0, 1, 2};
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return p.means[static_cast<std::size_t>(a)] < p.means[static_cast<std::size_t>(b)]; });
    GmmParams sorted = p;
    for (int k = 0; k < 3; ++k) {
        sorted.weights[static_cast<std::size_t>(k)] = p.weights[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
        sorted.means[static_cast<std::size_t>(k)] = p.means[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
        sorted.stds[static_cast<std::size_t>(k)] = p.stds[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
    }
    if (!(sorted.means[0] < sorted.means[1] && sorted.means[1] < sorted.means[2]))
        throw GmmCollapseError("components collapsed to coincident means");
    return sorted;
}

namespace {

// log of the weighted-pdf ratio, positive where component i dominates
double log_ratio(double x, double wi, double mi, double si, double wj, double mj, double sj) {
    const double zi = (x - mi) / si, zj = (x - mj) / sj;
    return std::log(wi / si) - 0.5 * zi * zi - (std::log(wj / sj) - 0.5 * zj * zj);
}

std::optional<double> pair_intersection(double wi, double mi, double si, double wj, double mj,
                                        double sj) {
    // equality of weighted log-pdfs is quadratic in x:
    //   a x^2 + b x + c = 0 with
    const double a = 0.5 / (sj * sj) - 0.5 / (si * si);
    const double b = mi / (si * si) - mj / (sj * sj);
    const double c = 0.5 * (mj * mj) / (sj * sj) - 0.5 * (mi * mi) / (si * si) +
                     std::log((wi * sj) / (wj * si));
    const double lo = mi, hi = mj;
    auto inside = [&](double x) { return x > lo && x < hi; };

    if (std::abs(a) > 1e-300) {
        const double disc = b * b - 4.0 * a * c;
        if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            for (double root : {(-b + sq) / (2.0 * a), (-b - sq) / (2.0 * a)})
                if (inside(root)) return root;
        }
    } else if (std::abs(b) > 1e-300) {
        const double root = -c / b;
        if (inside(root)) return root;
    }

    // no closed-form root inside: bisect on the log ratio if it changes sign
    const double eps = 1e-9 * (hi - lo);
    double fa = log_ratio(lo + eps, wi, mi, si, wj, mj, sj);
    double fb = log_ratio(hi - eps, wi, mi, si, wj, mj, sj);
    if (fa == 0.0) return lo + eps;
    if (fb == 0.0) return hi - eps;
    if ((fa > 0) == (fb > 0)) return std::nullopt;  // one component dominates throughout
    double x0 = lo + eps, x1 = hi - eps;
    for (int it = 0; it < 200; ++it) {
        const double xm = 0.5 * (x0 + x1);
        const double fm = log_ratio(xm, wi, mi, si, wj, mj, sj);
        if (fm == 0.0) return xm;
        if ((fm > 0) == (fa > 0)) {
            x0 = xm;
            fa = fm;
        } else {
            x1 = xm;
        }
        if (x1 - x0 < 1e-14 * (hi - lo)) break;
    }
    return 0.5 * (x0 + x1);
}

}  // namespace

Intersections find_intersections(const GmmParams& p) {
    Intersections out;
    out.low = pair_intersection(p.weights[0], p.means[0], p.stds[0], p.weights[1], p.means[1],
                                p.stds[1]);
    out.high = pair_intersection(p.weights[1], p.means[1], p.stds[1], p.weights[2], p.means[2],
                                 p.stds[2]);
    return out;
}

Thresholds derive_thresholds(const GmmParams& p, const Histogram& h, double tau_center,
                             bool* swapped) {
    if (swapped) *swapped = false;
    const Intersections is = find_intersections(p);
    Thresholds t;
    t.tau_center = tau_center;
    t.provenance = (is.low && is.high) ? ThresholdProvenance::gmm_intersection
                                       : ThresholdProvenance::quantile_fallback;
    t.tau_water = is.low ? *is.low : h.percentile(25);
    t.tau_urban = is.high ? *is.high : h.percentile(75);
    if (!(t.tau_water < t.tau_urban)) {
        std::swap(t.tau_water, t.tau_urban);
        if (swapped) *swapped = true;
        if (!(t.tau_water < t.tau_urban)) {
            // equal thresholds: widen by one bin so the ordering invariant holds
            t.tau_urban = t.tau_water + h.bin_width();
        }
    }
    return t;
}

Thresholds quantile_thresholds(const Histogram& h, double tau_center) {
    Thresholds t;
    t.tau_center = tau_center;
    t.provenance = ThresholdProvenance::quantile_fallback;
    t.tau_water = h.percentile(25);
    t.tau_urban = h.percentile(75);
    if (!(t.tau_water < t.tau_urban)) t.tau_urban = t.tau_water + h.bin_width();
    return t;
}

}  // namespace urban
