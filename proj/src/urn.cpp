#include "erwhex/urn.hpp"

#include <stdexcept>

namespace erwhex {

Decomposition decompose_trajectory(const Trajectory& t) {
    Decomposition d;
    d.signs.reserve(t.steps.size());
    d.axes.reserve(t.steps.size());
    std::int64_t m = 0;
    for (const Direction step : t.steps) {
        ++m;
        const auto [sign, axis] = axis_sign_decompose(step);
        d.signs.push_back(sign);
        d.axes.push_back(axis);
        d.tau.times[static_cast<std::size_t>(axis.slot())].push_back(m);
    }
    return d;
}

Trajectory recompose(const SignSequence& signs, const AxisSequence& axes) {
    if (signs.size() != axes.size()) throw std::invalid_argument("sign and axis sequences differ in length");
    Trajectory t;
    t.steps.reserve(signs.size());
    for (std::size_t i = 0; i < signs.size(); ++i) t.steps.push_back(recompose(signs[i], axes[i]));
    return t;
}

LatticePoint reconstruct_position(const Decomposition& d) {
    LatticePoint s;
    for (int j = 1; j <= kAxes; ++j) {
        const Axis axis(j);
        std::int64_t signed_sum = 0;
        for (const std::int64_t tau : d.tau.of(axis)) signed_sum += value(d.signs[static_cast<std::size_t>(tau - 1)]);
        const LatticePoint w = axis_vector(axis);
        s = s + LatticePoint{signed_sum * w.u, signed_sum * w.v};
    }
    return s;
}

CountVector3 axis_counts(const CountVector6& c) noexcept {
    CountVector3 out;
    for (int k = 0; k < kDirections; ++k) out[axis_sign_decompose(Direction(k)).second.slot()] += c[k];
    return out;
}

Probabilities3 urn_transition_probs(const CountVector3& c, double p) {
    validate_memory(p);
    for (auto x : c.c) {
        if (x < 0) throw std::invalid_argument("urn counts must be non-negative");
    }
    if (c.total() == 0) throw std::invalid_argument("urn transition probabilities need a non-empty urn");
    return urn_kernel<double>(c.c, p);
}

MeanReplacementMatrix mean_replacement_matrix(double p) {
    validate_memory(p);
    MeanReplacementMatrix r;
    const double off = (1.0 - p) / 3.0;
    for (std::size_t i = 0; i < kAxes; ++i) {
        for (std::size_t j = 0; j < kAxes; ++j) r[i][j] = i == j ? p + off : off;
    }
    return r;
}

Trajectory simulate_decomposed_walk(const WalkParams& params) {
    validate(params);
    if (params.n > kHistoryCap) throw std::invalid_argument("decomposed sampler horizon is capped at 2^31 steps");
    Rng rng(params.seed);
    AxisSequence axes;
    SignSequence signs;
    axes.reserve(static_cast<std::size_t>(params.n));
    signs.reserve(static_cast<std::size_t>(params.n));
    for (std::int64_t m = 0; m < params.n; ++m) {
        Axis next;
        if (m > 0 && rng.uniform() < params.p) {
            next = axes[rng.below(static_cast<std::uint64_t>(m))];
        } else {
            next = Axis(1 + static_cast<int>(rng.below(kAxes)));
        }
        axes.push_back(next);
        signs.push_back(rng.coin() ? Sign::Plus : Sign::Minus);
    }
    return recompose(signs, axes);
}

UrnWalker::UrnWalker(double p, std::uint64_t seed) : p_(p), rng_(seed) { validate_memory(p); }

Axis UrnWalker::draw() {
    const int slot = sample_index(urn_kernel<double>(counts_.c, p_), rng_.uniform());
    ++counts_[slot];
    return Axis(slot + 1);
}

std::vector<CountVector3> simulate_urn_counts(std::int64_t n, double p, std::uint64_t seed) {
    validate(WalkParams{p, n, seed});
    UrnWalker urn(p, seed);
    std::vector<CountVector3> path;
    path.reserve(static_cast<std::size_t>(n));
    for (std::int64_t m = 0; m < n; ++m) {
        urn.draw();
        path.push_back(urn.counts());
    }
    return path;
}

AxisCountDistribution exact_axis_distribution(int n, double p, int cap) {
    if (n < 1 || n > cap || cap > kPackMax) throw std::invalid_argument("axis oracle horizon out of range");
    validate_memory(p);
    AxisCountDistribution law = initial_law<kAxes, double>(p);
    const auto kernel = [](const Counts<kAxes>& c, const double& q) { return urn_kernel<double>(c, q); };
    for (int m = 0; m < n; ++m) law = advance(law, p, kernel);
    return law;
}

AxisCountDistribution fold_to_axes(const CountDistribution& law) {
    AxisCountDistribution out;
    out.n = law.n;
    out.p = law.p;
    for (const auto& [key, m] : law.mass) {
        out.mass[pack<kAxes>(axis_counts(to_vector6(unpack<kDirections>(key))).c)] += m;
    }
    return out;
}

}  // namespace erwhex
