#pragma once

// Sign/axis factorization of the walk and its three-colour urn view.
//
// Each step factors as X_m = Y_m * Z_m with a sign Y_m = +-1 and an axis
// Z_m in {omega, omega^2, 1}. The signs are i.i.d. fair and independent of the
// axes; the axis process is itself an elephant walk on three values whose
// counts evolve like a three-colour urn with mean replacement matrix
// p*I + (1-p)/3*J. Stopping times tau^i_m mark the m-th visit to axis i, and
//   S_n = sum_i omega^i * sum_{m <= C^i_n} Y_{tau^i_m}.

#include <array>
#include <cstdint>
#include <vector>

#include "erwhex/lattice.hpp"
#include "erwhex/oracle.hpp"
#include "erwhex/rng.hpp"
#include "erwhex/walk.hpp"

namespace erwhex {

using SignSequence = std::vector<Sign>;
using AxisSequence = std::vector<Axis>;

/// (C^1, C^2, C^3): visits to omega, omega^2 and 1.
struct CountVector3 {
    std::array<std::int64_t, kAxes> c{};

    constexpr std::int64_t total() const noexcept { return c[0] + c[1] + c[2]; }
    constexpr std::int64_t& operator[](int slot) noexcept { return c[static_cast<std::size_t>(slot)]; }
    constexpr std::int64_t operator[](int slot) const noexcept { return c[static_cast<std::size_t>(slot)]; }
    friend constexpr bool operator==(const CountVector3&, const CountVector3&) = default;
};

/// Per-axis visit times, 1-based and increasing; together they partition {1..n}.
struct StoppingTimes {
    std::array<std::vector<std::int64_t>, kAxes> times;

    const std::vector<std::int64_t>& of(Axis a) const noexcept { return times[static_cast<std::size_t>(a.slot())]; }
};

struct Decomposition {
    SignSequence signs;
    AxisSequence axes;
    StoppingTimes tau;
};

using MeanReplacementMatrix = std::array<std::array<double, kAxes>, kAxes>;
using Probabilities3 = std::array<double, kAxes>;

Decomposition decompose_trajectory(const Trajectory& t);

/// Inverse of decompose_trajectory. Throws std::invalid_argument on length mismatch.
Trajectory recompose(const SignSequence& signs, const AxisSequence& axes);

/// The reconstruction identity evaluated from signs, counts and stopping times.
LatticePoint reconstruct_position(const Decomposition& d);

CountVector3 axis_counts(const CountVector6& c) noexcept;

/// omega^j in (u, v) coordinates.
constexpr LatticePoint axis_vector(Axis a) noexcept {
    switch (a.power()) {
        case 1: return {0, 1};
        case 2: return {-1, -1};
        default: return {1, 0};
    }
}

/// P(D_n = e_i | C) = (p + (1-p)/3) C^i/n + ((1-p)/3) (n - C^i)/n; uniform for the empty urn.
template <class Real>
std::array<Real, kAxes> urn_kernel(const Counts<kAxes>& c, const Real& p) {
    std::array<Real, kAxes> q;
    const std::int64_t n = c[0] + c[1] + c[2];
    if (n == 0) {
        for (auto& x : q) x = Real(1) / Real(3);
        return q;
    }
    const Real off = (Real(1) - p) / Real(3);
    const Real diag = p + off;
    for (std::size_t i = 0; i < kAxes; ++i) {
        q[i] = diag * Real(c[i]) / Real(n) + off * Real(n - c[i]) / Real(n);
    }
    return q;
}

/// Throws std::invalid_argument for an empty urn or p outside [0,1].
Probabilities3 urn_transition_probs(const CountVector3& c, double p);

/// Diagonal p + (1-p)/3, off-diagonal (1-p)/3.
MeanReplacementMatrix mean_replacement_matrix(double p);

/// Samples the axis walk (copy a uniformly chosen past axis w.p. p, else a
/// fresh uniform axis) and attaches an independent fair sign to every step.
Trajectory simulate_decomposed_walk(const WalkParams& params);

/// Constant-memory urn driven by urn_transition_probs.
class UrnWalker {
public:
    UrnWalker(double p, std::uint64_t seed);

    Axis draw();
    const CountVector3& counts() const noexcept { return counts_; }

private:
    double p_;
    Rng rng_;
    CountVector3 counts_;
};

/// C_1, ..., C_n.
std::vector<CountVector3> simulate_urn_counts(std::int64_t n, double p, std::uint64_t seed);

using AxisCountDistribution = CountLaw<kAxes, double>;

/// Exact law of (C^1, C^2, C^3) after n draws, through the shared count-chain DP.
AxisCountDistribution exact_axis_distribution(int n, double p, int cap = kDefaultOracleCap);

/// Marginal axis-count law of a six-direction count law.
AxisCountDistribution fold_to_axes(const CountDistribution& law);

}  // namespace erwhex
