#pragma once

// Samplers for the directional elephant random walk on the triangular lattice.
//
// The first step is uniform over the six directions. Afterwards a past step
// index T is drawn uniformly; the next step copies X_T with probability p/2,
// reverses it with probability p/2 and is a fresh uniform direction otherwise.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "erwhex/lattice.hpp"
#include "erwhex/rng.hpp"

namespace erwhex {

struct WalkParams {
    double p = 0.5;
    std::int64_t n = 1;
    std::uint64_t seed = 0;
};

/// Throws std::invalid_argument unless 0 <= p <= 1 (NaN rejected).
void validate_memory(double p);
/// Throws std::invalid_argument unless p is valid and n >= 1.
void validate(const WalkParams& params);

inline constexpr std::int64_t kHistoryCap = std::int64_t{1} << 31;

struct Trajectory {
    std::vector<Direction> steps;

    std::int64_t length() const noexcept { return static_cast<std::int64_t>(steps.size()); }
    CountVector6 counts() const noexcept;
    /// positions()[m] is S_{m+1}; S_0 = 0 is implied.
    std::vector<LatticePoint> positions() const;
    LatticePoint final_position() const noexcept;
};

using Probabilities6 = std::array<double, kDirections>;

/// Closed-form one-step law given the current counts:
///   q_d = (1-p)/6 + (p/2) (c_d + c_{-d}) / n,  uniform when n = 0.
template <class Real>
std::array<Real, kDirections> step_kernel(const CountVector6& c, const Real& p) {
    std::array<Real, kDirections> q;
    const std::int64_t n = c.total();
    if (n == 0) {
        for (auto& x : q) x = Real(1) / Real(6);
        return q;
    }
    const Real innovation = (Real(1) - p) / Real(6);
    const Real memory = p / Real(2 * n);
    for (int k = 0; k < kDirections; ++k) {
        q[static_cast<std::size_t>(k)] = innovation + memory * Real(c[k] + c[(k + 3) % kDirections]);
    }
    return q;
}

Probabilities6 step_distribution(const CountVector6& c, double p);

/// Inverse-CDF draw over k = 0..5 in fixed order; zero-probability slots are never returned.
template <std::size_t K>
int sample_index(const std::array<double, K>& probs, double u) noexcept {
    double cumulative = 0.0;
    int last_positive = 0;
    for (std::size_t k = 0; k < K; ++k) {
        if (probs[k] <= 0.0) continue;
        cumulative += probs[k];
        last_positive = static_cast<int>(k);
        if (u < cumulative) return last_positive;
    }
    return last_positive;
}

/// Literal sampler: keeps the whole step history and draws T uniformly from it.
Trajectory simulate_history(const WalkParams& params);

/// Constant-memory sampler driven by step_distribution.
class CountWalker {
public:
    CountWalker(double p, std::uint64_t seed);

    Direction step();
    const CountVector6& counts() const noexcept { return counts_; }
    std::int64_t steps_taken() const noexcept { return counts_.total(); }

private:
    double p_;
    Rng rng_;
    CountVector6 counts_;
};

CountVector6 simulate_counts(const WalkParams& params);

}  // namespace erwhex
