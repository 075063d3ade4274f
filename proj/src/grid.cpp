#include "urban/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace urban {

Grid normalize_minmax(const Grid& g) {
    if (g.empty()) throw InputError("normalize_minmax: empty grid");
    auto [mn_it, mx_it] = std::minmax_element(g.values.begin(), g.values.end());
    const double mn = *mn_it, mx = *mx_it;
    Grid out = g.like();
    if (mx == mn) return out;  // degenerate constant grid -> all zeros
    const double inv = 1.0 / (mx - mn);
    for (std::size_t i = 0; i < g.size(); ++i) out.values[i] = (g.values[i] - mn) * inv;
    return out;
}

void check_alignment(const Grid& a, const Grid& b) {
    if (a.width != b.width || a.height != b.height) {
        std::ostringstream os;
        os << "dimension mismatch: " << a.width << "x" << a.height << " vs " << b.width << "x"
           << b.height;
        throw InputError(os.str());
    }
    const double scale = std::max(std::abs(a.resolution_m), std::abs(b.resolution_m));
    if (std::abs(a.resolution_m - b.resolution_m) > 1e-6 * scale) {
        std::ostringstream os;
        os << "resolution mismatch: " << a.resolution_m << " m/px vs " << b.resolution_m
           << " m/px";
        throw InputError(os.str());
    }
}

void require_finite(const Grid& g, const std::string& context) {
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!std::isfinite(g.values[i])) {
            std::ostringstream os;
            os << context << ": non-finite value at index " << i;
            throw InputError(os.str());
        }
    }
}

}  // namespace urban
