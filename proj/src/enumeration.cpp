#include "erwhex/enumeration.hpp"

#include <stdexcept>

namespace erwhex::enumeration {
namespace {

void walk_tree(std::vector<Direction>& history, int remaining, double weight, double p, CountDistribution& out) {
    if (remaining == 0) {
        CountVector6 c;
        for (auto d : history) ++c[d.index()];
        out.mass[pack<kDirections>(c.c)] += weight;
        return;
    }
    const Probabilities6 law = next_step_law(history, p);
    for (int k = 0; k < kDirections; ++k) {
        const double q = law[static_cast<std::size_t>(k)];
        if (q == 0.0) continue;
        history.push_back(Direction(k));
        walk_tree(history, remaining - 1, weight * q, p, out);
        history.pop_back();
    }
}

}  // namespace

Probabilities6 next_step_law(const std::vector<Direction>& history, double p) {
    Probabilities6 law{};
    const double innovate_each = 1.0 / kDirections;
    if (history.empty()) {
        for (int xi = 0; xi < kDirections; ++xi) law[static_cast<std::size_t>(xi)] += innovate_each;
        return law;
    }
    const double pick = 1.0 / static_cast<double>(history.size());
    for (const Direction past : history) {
        law[static_cast<std::size_t>(past.index())] += pick * (p / 2.0);
        law[static_cast<std::size_t>(negate(past).index())] += pick * (p / 2.0);
        for (int xi = 0; xi < kDirections; ++xi) {
            law[static_cast<std::size_t>(xi)] += pick * (1.0 - p) * innovate_each;
        }
    }
    return law;
}

Probabilities6 kernel_by_enumeration(const CountVector6& c, double p) {
    std::vector<Direction> history;
    for (int k = 0; k < kDirections; ++k) {
        for (std::int64_t i = 0; i < c[k]; ++i) history.push_back(Direction(k));
    }
    return next_step_law(history, p);
}

CountDistribution count_distribution_by_enumeration(int n, double p) {
    if (n < 1 || n > 8) throw std::invalid_argument("enumeration horizon must lie in [1, 8]");
    CountDistribution out;
    out.n = n;
    out.p = p;
    std::vector<Direction> history;
    walk_tree(history, n, 1.0, p, out);
    return out;
}

std::vector<CountVector6> compositions(int total) {
    std::vector<CountVector6> out;
    CountVector6 c;
    auto fill = [&](auto&& self, int slot, int left) -> void {
        if (slot == kDirections - 1) {
            c[slot] = left;
            out.push_back(c);
            return;
        }
        for (int x = left; x >= 0; --x) {
            c[slot] = x;
            self(self, slot + 1, left - x);
        }
    };
    fill(fill, 0, total);
    return out;
}

}  // namespace erwhex::enumeration
