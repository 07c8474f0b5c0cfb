#pragma once

// Exact law of the direction counts after n steps, by forward dynamic
// programming over count vectors. The one-step law depends on the history only
// through the counts, so the count vector is a Markov chain and its law at
// horizon n is computed exactly (up to double rounding, or exactly in the
// rational mode).

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "erwhex/lattice.hpp"

namespace erwhex {

using Rational = boost::multiprecision::cpp_rational;

inline constexpr int kDefaultOracleCap = 30;
inline constexpr int kRationalOracleCap = 10;

// Count vectors are packed 10 bits per slot, slot 0 in the most significant
// position, so key order equals lexicographic order on (c0, c1, ...).
inline constexpr int kPackBits = 10;
inline constexpr std::int64_t kPackMax = (std::int64_t{1} << kPackBits) - 1;

template <std::size_t K>
using Counts = std::array<std::int64_t, K>;

template <std::size_t K>
constexpr std::uint64_t pack(const Counts<K>& c) noexcept {
    std::uint64_t key = 0;
    for (std::size_t k = 0; k < K; ++k) key = (key << kPackBits) | static_cast<std::uint64_t>(c[k]);
    return key;
}

template <std::size_t K>
constexpr Counts<K> unpack(std::uint64_t key) noexcept {
    Counts<K> c{};
    for (std::size_t k = K; k-- > 0;) {
        c[k] = static_cast<std::int64_t>(key & static_cast<std::uint64_t>(kPackMax));
        key >>= kPackBits;
    }
    return c;
}

/// Sparse law over K-slot count vectors at a fixed horizon.
template <std::size_t K, class Real = double>
struct CountLaw {
    int n = 0;
    double p = 0.0;
    std::map<std::uint64_t, Real> mass;

    Real probability(const Counts<K>& c) const {
        auto it = mass.find(pack<K>(c));
        return it == mass.end() ? Real(0) : it->second;
    }
    std::size_t size() const noexcept { return mass.size(); }
    Real total() const {
        Real s(0);
        for (const auto& [key, m] : mass) s += m;
        return s;
    }
};

/// One forward step of the count chain. Sources are visited in key order, so
/// every target's mass is summed in a fixed order.
template <std::size_t K, class Real, class Kernel>
CountLaw<K, Real> advance(const CountLaw<K, Real>& law, const Real& p, Kernel&& kernel) {
    CountLaw<K, Real> next;
    next.n = law.n + 1;
    next.p = law.p;
    for (const auto& [key, m] : law.mass) {
        const Counts<K> c = unpack<K>(key);
        const std::array<Real, K> q = kernel(c, p);
        for (std::size_t k = 0; k < K; ++k) {
            if (q[k] == Real(0)) continue;
            Counts<K> target = c;
            ++target[k];
            next.mass[pack<K>(target)] += m * q[k];
        }
    }
    return next;
}

template <std::size_t K, class Real>
CountLaw<K, Real> initial_law(double p) {
    CountLaw<K, Real> law;
    law.n = 0;
    law.p = p;
    law.mass[pack<K>(Counts<K>{})] = Real(1);
    return law;
}

/// Every level 0..n of the chain driven by kernel.
template <std::size_t K, class Real, class Kernel>
std::vector<CountLaw<K, Real>> propagate_levels(int n, double p, const Real& p_value, Kernel&& kernel) {
    std::vector<CountLaw<K, Real>> levels;
    levels.reserve(static_cast<std::size_t>(n) + 1);
    levels.push_back(initial_law<K, Real>(p));
    for (int m = 0; m < n; ++m) levels.push_back(advance(levels.back(), p_value, kernel));
    return levels;
}

using CountDistribution = CountLaw<kDirections, double>;
using RationalCountDistribution = CountLaw<kDirections, Rational>;

inline Counts<kDirections> to_counts(const CountVector6& c) noexcept { return c.c; }
inline CountVector6 to_vector6(const Counts<kDirections>& c) noexcept { return CountVector6{c}; }

/// Throws std::invalid_argument when n is outside [1, cap] or p outside [0,1].
CountDistribution exact_count_distribution(int n, double p, int cap = kDefaultOracleCap);

/// Levels 0..n (level 0 is the empty walk).
std::vector<CountDistribution> exact_count_levels(int n, double p, int cap = kDefaultOracleCap);

/// Exact rational law; p is converted exactly from its binary value. n <= 10.
RationalCountDistribution exact_count_distribution_rational(int n, double p);

/// Applies one step of step_distribution to every state of law.
CountDistribution step_forward(const CountDistribution& law);

struct MomentReport {
    std::array<double, 2> mean{};
    double second_moment_radius = 0.0;  // E|S_n|^2
    std::array<double, 2> component_variances{};
    double component_covariance = 0.0;
};

MomentReport moments_of(const CountDistribution& law);
MomentReport exact_moments(int n, double p, int cap = kDefaultOracleCap);

/// Largest state-by-state difference |a(c) - b(c)| over the union of supports.
double max_abs_difference(const CountDistribution& a, const CountDistribution& b);

}  // namespace erwhex
