#include "urban/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace urban {

namespace {

constexpr int kWidth = 900;
constexpr int kHeight = 480;
constexpr int kMarginLeft = 64;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 24;
constexpr int kMarginBottom = 48;
constexpr int kPlotW = kWidth - kMarginLeft - kMarginRight;
constexpr int kPlotH = kHeight - kMarginTop - kMarginBottom;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Axis {
    double lo = 0.0, hi = 1.0;

    double frac(double v) const { return (v - lo) / (hi - lo); }
};

Axis pad_axis(double lo, double hi) {
    if (hi <= lo) {
        const double c = lo;
        return {c - 0.5, c + 0.5};
    }
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

double px_x(const Axis& a, double v) { return kMarginLeft + a.frac(v) * kPlotW; }
double px_y(const Axis& a, double v) { return kMarginTop + (1.0 - a.frac(v)) * kPlotH; }

// round-number ticks, about n of them
std::vector<double> ticks(const Axis& a, int n) {
    const double span = a.hi - a.lo;
    const double raw = span / n;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) {
            step = m * mag;
            break;
        }
    }
    std::vector<double> out;
    for (double t = std::ceil(a.lo / step) * step; t <= a.hi + 1e-12 * span; t += step)
        out.push_back(t);
    return out;
}

void open_svg(std::ostringstream& os) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
       << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
       << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
}

void draw_axes(std::ostringstream& os, const Axis& ax, const Axis& ay, const std::string& xlabel,
               const std::string& ylabel) {
    os << "<g stroke=\"#cccccc\" stroke-width=\"1\">\n";
    for (double t : ticks(ax, 8)) {
        const double x = px_x(ax, t);
        os << "<line x1=\"" << num(x) << "\" y1=\"" << kMarginTop << "\" x2=\"" << num(x)
           << "\" y2=\"" << kMarginTop + kPlotH << "\"/>\n";
    }
    for (double t : ticks(ay, 6)) {
        const double y = px_y(ay, t);
        os << "<line x1=\"" << kMarginLeft << "\" y1=\"" << num(y) << "\" x2=\""
           << kMarginLeft + kPlotW << "\" y2=\"" << num(y) << "\"/>\n";
    }
    os << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\">\n";
    for (double t : ticks(ax, 8))
        os << "<text x=\"" << num(px_x(ax, t)) << "\" y=\"" << kMarginTop + kPlotH + 16
           << "\" text-anchor=\"middle\">" << num(t) << "</text>\n";
    for (double t : ticks(ay, 6))
        os << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << num(px_y(ay, t) + 4)
           << "\" text-anchor=\"end\">" << num(t) << "</text>\n";
    os << "<text x=\"" << kMarginLeft + kPlotW / 2 << "\" y=\"" << kHeight - 12
       << "\" text-anchor=\"middle\">" << xlabel << "</text>\n"
       << "<text x=\"14\" y=\"" << kMarginTop + kPlotH / 2
       << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " << kMarginTop + kPlotH / 2
       << ")\">" << ylabel << "</text>\n</g>\n"
       << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\"" << kPlotW
       << "\" height=\"" << kPlotH << "\" fill=\"none\" stroke=\"#333333\"/>\n";
}

std::string polyline(const std::vector<double>& xs, const std::vector<double>& ys, const Axis& ax,
                     const Axis& ay, const std::string& style) {
    std::ostringstream os;
    os << "<polyline fill=\"none\" " << style << " points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) os << ' ';
        os << num(px_x(ax, xs[i])) << ',' << num(px_y(ay, ys[i]));
    }
    os << "\"/>\n";
    return os.str();
}

}  // namespace

std::string svg_gradient_plot(const DensityProfile& profile, const GradientFit& fit,
                              const std::vector<Peak>& peaks, std::optional<double> ld_km) {
    const double xlo = profile.bin_distance_km.front();
    const double xhi = profile.bin_distance_km.back();
    double ylo = *std::min_element(profile.q25.begin(), profile.q25.end());
    double yhi = *std::max_element(profile.q75.begin(), profile.q75.end());
    ylo = std::min(ylo, *std::min_element(profile.mean_density.begin(), profile.mean_density.end()));
    yhi = std::max(yhi, *std::max_element(profile.mean_density.begin(), profile.mean_density.end()));
    const Axis ax = pad_axis(xlo, xhi), ay = pad_axis(ylo, yhi);

    std::ostringstream os;
    open_svg(os);
    draw_axes(os, ax, ay, "distance from urban centers [km]", "urban density");

    // IQR band
    os << "<polygon fill=\"#90caf9\" fill-opacity=\"0.35\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < profile.size(); ++i)
        os << num(px_x(ax, profile.bin_distance_km[i])) << ',' << num(px_y(ay, profile.q75[i])) << ' ';
    for (std::size_t i = profile.size(); i-- > 0;)
        os << num(px_x(ax, profile.bin_distance_km[i])) << ',' << num(px_y(ay, profile.q25[i]))
           << (i ? " " : "");
    os << "\"/>\n";

    os << polyline(profile.bin_distance_km, profile.mean_density, ax, ay,
                   "stroke=\"#1565c0\" stroke-width=\"1.5\"");

    // fitted line over the plotted domain
    {
        std::vector<double> fx = {ax.lo, ax.hi};
        std::vector<double> fy = {fit.beta + fit.alpha * ax.lo, fit.beta + fit.alpha * ax.hi};
        os << polyline(fx, fy, ax, ay,
                       "stroke=\"#2e7d32\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"");
    }

    for (const auto& pk : peaks)
        os << "<circle cx=\"" << num(px_x(ax, pk.distance_km)) << "\" cy=\""
           << num(px_y(ay, pk.density)) << "\" r=\"4\" fill=\"#c62828\"/>\n";

    for (const auto& [d, r] : fit.points)
        os << "<circle cx=\"" << num(px_x(ax, d)) << "\" cy=\"" << num(px_y(ay, r))
           << "\" r=\"2.5\" fill=\"#2e7d32\"/>\n";

    os << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333333\">\n"
       << "<text x=\"" << kMarginLeft + 8 << "\" y=\"" << kMarginTop + 16 << "\">alpha = "
       << num(fit.alpha) << " /km, beta = " << num(fit.beta) << ", r^2 = " << num(fit.r_squared);
    if (ld_km) os << ", LD = " << num(*ld_km) << " km";
    os << "</text>\n</g>\n</svg>\n";
    return os.str();
}

std::string svg_difference_plot(const ResidualSeries& residuals, const RegionSet& regions) {
    const Axis ax = pad_axis(residuals.distance_km.front(), residuals.distance_km.back());
    const double rlo = *std::min_element(residuals.residual.begin(), residuals.residual.end());
    const double rhi = *std::max_element(residuals.residual.begin(), residuals.residual.end());
    const Axis ay = pad_axis(std::min(rlo, 0.0), std::max(rhi, 0.0));

    std::ostringstream os;
    open_svg(os);

    // region bands first, everything else on top; outer bands run to the
    // axis limits so the banding covers the whole plotted domain
    for (std::size_t i = 0; i < regions.regions.size(); ++i) {
        const auto& reg = regions.regions[i];
        const double x0 = px_x(ax, i == 0 ? ax.lo : reg.start_km);
        const double x1 = px_x(ax, i + 1 == regions.regions.size() ? ax.hi : reg.end_km);
        const bool uniform = reg.label == RegionLabel::uniform;
        os << "<rect class=\"" << (uniform ? "region-uniform" : "region-variation") << "\" x=\""
           << num(x0) << "\" y=\"" << kMarginTop << "\" width=\"" << num(x1 - x0)
           << "\" height=\"" << kPlotH << "\" fill=\"" << (uniform ? "#4caf50" : "#f44336")
           << "\" fill-opacity=\"0.22\"/>\n";
    }

    draw_axes(os, ax, ay, "distance from urban centers [km]", "observed - fitted density");
    os << "<line x1=\"" << kMarginLeft << "\" y1=\"" << num(px_y(ay, 0.0)) << "\" x2=\""
       << kMarginLeft + kPlotW << "\" y2=\"" << num(px_y(ay, 0.0))
       << "\" stroke=\"#666666\" stroke-dasharray=\"4 3\"/>\n";
    os << polyline(residuals.distance_km, residuals.residual, ax, ay,
                   "stroke=\"#6a1b9a\" stroke-width=\"1.5\"");
    os << "</svg>\n";
    return os.str();
}

std::string profile_csv(const DensityProfile& profile) {
    std::ostringstream os;
    os << "distance_km,mean_density,count,q25,q75\n";
    char buf[160];
    for (std::size_t i = 0; i < profile.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%lld,%.10g,%.10g\n",
                      profile.bin_distance_km[i], profile.mean_density[i],
                      static_cast<long long>(profile.pixel_count[i]), profile.q25[i],
                      profile.q75[i]);
        os << buf;
    }
    return os.str();
}

}  // namespace urban
