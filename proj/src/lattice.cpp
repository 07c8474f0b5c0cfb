#include "erwhex/lattice.hpp"

#include <cmath>

namespace erwhex {

CountVector6 operator+(const CountVector6& a, const CountVector6& b) noexcept {
    CountVector6 out;
    for (int k = 0; k < kDirections; ++k) out[k] = a[k] + b[k];
    return out;
}

LatticePoint position_from_counts(const CountVector6& c) noexcept {
    // zeta^0 - zeta^3 contributes to u, zeta^2 - zeta^5 to v, zeta^1 - zeta^4 to both.
    const std::int64_t diag = c[1] - c[4];
    return {c[0] - c[3] + diag, c[2] - c[5] + diag};
}

Cartesian to_cartesian(const LatticePoint& pt) noexcept {
    static const double half_sqrt3 = std::sqrt(3.0) / 2.0;
    const auto u = static_cast<double>(pt.u);
    const auto v = static_cast<double>(pt.v);
    return {u - 0.5 * v, half_sqrt3 * v};
}

CountVector6 rotate_counts(const CountVector6& c, int r) noexcept {
    CountVector6 out;
    for (int k = 0; k < kDirections; ++k) out[rotate(Direction(k), r).index()] = c[k];
    return out;
}

}  // namespace erwhex
