#include "erwhex/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "erwhex/walk.hpp"

namespace erwhex {
namespace {

void check_horizon(int n, int cap) {
    if (cap > kPackMax) throw std::invalid_argument("oracle cap exceeds the packed-state range");
    if (n < 1 || n > cap) {
        throw std::invalid_argument("oracle horizon must lie in [1, " + std::to_string(cap) + "], got " +
                                    std::to_string(n));
    }
}

template <class Real>
auto six_slot_kernel() {
    return [](const Counts<kDirections>& c, const Real& p) { return step_kernel<Real>(to_vector6(c), p); };
}

}  // namespace

std::vector<CountDistribution> exact_count_levels(int n, double p, int cap) {
    check_horizon(n, cap);
    validate_memory(p);
    return propagate_levels<kDirections, double>(n, p, p, six_slot_kernel<double>());
}

CountDistribution exact_count_distribution(int n, double p, int cap) {
    check_horizon(n, cap);
    validate_memory(p);
    CountDistribution law = initial_law<kDirections, double>(p);
    for (int m = 0; m < n; ++m) law = advance(law, p, six_slot_kernel<double>());
    return law;
}

RationalCountDistribution exact_count_distribution_rational(int n, double p) {
    check_horizon(n, kRationalOracleCap);
    validate_memory(p);
    const Rational exact_p(p);
    RationalCountDistribution law = initial_law<kDirections, Rational>(p);
    for (int m = 0; m < n; ++m) law = advance(law, exact_p, six_slot_kernel<Rational>());
    return law;
}

CountDistribution step_forward(const CountDistribution& law) {
    CountDistribution next;
    next.n = law.n + 1;
    next.p = law.p;
    for (const auto& [key, m] : law.mass) {
        const CountVector6 c = to_vector6(unpack<kDirections>(key));
        const Probabilities6 q = step_distribution(c, law.p);
        for (int k = 0; k < kDirections; ++k) {
            if (q[static_cast<std::size_t>(k)] == 0.0) continue;
            CountVector6 target = c;
            ++target[k];
            next.mass[pack<kDirections>(target.c)] += m * q[static_cast<std::size_t>(k)];
        }
    }
    return next;
}

MomentReport moments_of(const CountDistribution& law) {
    double ex = 0.0, ey = 0.0, exx = 0.0, eyy = 0.0, exy = 0.0, er2 = 0.0;
    for (const auto& [key, m] : law.mass) {
        const LatticePoint pt = position_from_counts(to_vector6(unpack<kDirections>(key)));
        const Cartesian xy = to_cartesian(pt);
        ex += m * xy.x;
        ey += m * xy.y;
        exx += m * xy.x * xy.x;
        eyy += m * xy.y * xy.y;
        exy += m * xy.x * xy.y;
        er2 += m * static_cast<double>(pt.norm2());
    }
    MomentReport r;
    r.mean = {ex, ey};
    r.component_variances = {exx - ex * ex, eyy - ey * ey};
    r.component_covariance = exy - ex * ey;
    r.second_moment_radius = er2;
    return r;
}

MomentReport exact_moments(int n, double p, int cap) { return moments_of(exact_count_distribution(n, p, cap)); }

double max_abs_difference(const CountDistribution& a, const CountDistribution& b) {
    double worst = 0.0;
    for (const auto& [key, m] : a.mass) worst = std::max(worst, std::abs(m - b.probability(unpack<kDirections>(key))));
    for (const auto& [key, m] : b.mass) worst = std::max(worst, std::abs(m - a.probability(unpack<kDirections>(key))));
    return worst;
}

}  // namespace erwhex
