#include "erwhex/walk.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace erwhex {

void validate_memory(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("memory parameter p must lie in [0,1], got " + std::to_string(p));
    }
}

void validate(const WalkParams& params) {
    validate_memory(params.p);
    if (params.n < 1) throw std::invalid_argument("horizon n must be at least 1");
}

CountVector6 Trajectory::counts() const noexcept {
    CountVector6 c;
    for (auto d : steps) ++c[d.index()];
    return c;
}

std::vector<LatticePoint> Trajectory::positions() const {
    std::vector<LatticePoint> out;
    out.reserve(steps.size());
    LatticePoint s;
    for (auto d : steps) {
        s = s + unit_step(d);
        out.push_back(s);
    }
    return out;
}

LatticePoint Trajectory::final_position() const noexcept { return position_from_counts(counts()); }

Probabilities6 step_distribution(const CountVector6& c, double p) {
    validate_memory(p);
    for (auto x : c.c) {
        if (x < 0) throw std::invalid_argument("count vector entries must be non-negative");
    }
    return step_kernel(c, p);
}

Trajectory simulate_history(const WalkParams& params) {
    validate(params);
    if (params.n > kHistoryCap) throw std::invalid_argument("history sampler horizon is capped at 2^31 steps");

    Rng rng(params.seed);
    Trajectory t;
    t.steps.reserve(static_cast<std::size_t>(params.n));
    t.steps.push_back(Direction(static_cast<int>(rng.below(kDirections))));
    const double half = params.p / 2.0;
    for (std::int64_t m = 1; m < params.n; ++m) {
        const auto past = t.steps[rng.below(static_cast<std::uint64_t>(m))];
        const double u = rng.uniform();
        if (u < half) {
            t.steps.push_back(past);
        } else if (u < params.p) {
            t.steps.push_back(negate(past));
        } else {
            t.steps.push_back(Direction(static_cast<int>(rng.below(kDirections))));
        }
    }
    return t;
}

CountWalker::CountWalker(double p, std::uint64_t seed) : p_(p), rng_(seed) { validate_memory(p); }

Direction CountWalker::step() {
    const std::int64_t n = counts_.total();
    const double u = rng_.uniform();
    int k = 0;
    if (n == 0) {
        k = sample_index(Probabilities6{1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6}, u);
    } else {
        k = sample_index(step_kernel(counts_, p_), u);
    }
    ++counts_[k];
    return Direction(k);
}

CountVector6 simulate_counts(const WalkParams& params) {
    validate(params);
    CountWalker walker(params.p, params.seed);
    for (std::int64_t m = 0; m < params.n; ++m) walker.step();
    return walker.counts();
}

}  // namespace erwhex
