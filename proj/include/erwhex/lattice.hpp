#pragma once

// Exact encodings for the triangular lattice: the six unit steps, their
// sign/axis factorization and Eisenstein-integer positions.
//
// Directions are indices k into the sixth roots of unity zeta^k with
// zeta = exp(i*pi/3). With omega = zeta^2 the familiar labels are
//   k=0: 1   k=1: -omega^2   k=2: omega   k=3: -1   k=4: omega^2   k=5: -omega
// Axes are the cube roots omega^j, j in {1,2,3}, with omega^3 = 1.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <utility>

namespace erwhex {

inline constexpr int kDirections = 6;
inline constexpr int kAxes = 3;

class Direction {
public:
    constexpr Direction() = default;
    constexpr explicit Direction(int k) : k_(static_cast<std::uint8_t>(k)) {
        if (k < 0 || k >= kDirections) throw std::out_of_range("direction index must be in [0,5]");
    }
    constexpr int index() const noexcept { return k_; }
    friend constexpr bool operator==(Direction, Direction) = default;

private:
    std::uint8_t k_ = 0;
};

class Axis {
public:
    constexpr Axis() = default;
    /// j in {1,2,3}; the axis omega^j.
    constexpr explicit Axis(int j) : j_(static_cast<std::uint8_t>(j)) {
        if (j < 1 || j > kAxes) throw std::out_of_range("axis index must be in [1,3]");
    }
    constexpr int power() const noexcept { return j_; }
    /// Zero-based slot (j-1) for counting.
    constexpr int slot() const noexcept { return j_ - 1; }
    friend constexpr bool operator==(Axis, Axis) = default;

private:
    std::uint8_t j_ = 3;
};

enum class Sign : std::int8_t { Minus = -1, Plus = 1 };

constexpr int value(Sign s) noexcept { return static_cast<int>(s); }

struct LatticePoint {
    std::int64_t u = 0;
    std::int64_t v = 0;

    friend constexpr bool operator==(const LatticePoint&, const LatticePoint&) = default;
    constexpr LatticePoint operator+(const LatticePoint& o) const noexcept { return {u + o.u, v + o.v}; }
    constexpr LatticePoint operator-() const noexcept { return {-u, -v}; }
    /// |u + v*omega|^2, exact.
    constexpr std::int64_t norm2() const noexcept { return u * u - u * v + v * v; }
};

struct Cartesian {
    double x = 0.0;
    double y = 0.0;
};

// Occupation counts of the six directions.
struct CountVector6 {
    std::array<std::int64_t, kDirections> c{};

    constexpr std::int64_t total() const noexcept {
        std::int64_t n = 0;
        for (auto x : c) n += x;
        return n;
    }
    constexpr std::int64_t& operator[](int k) noexcept { return c[static_cast<std::size_t>(k)]; }
    constexpr std::int64_t operator[](int k) const noexcept { return c[static_cast<std::size_t>(k)]; }
    friend constexpr bool operator==(const CountVector6&, const CountVector6&) = default;
    friend constexpr auto operator<=>(const CountVector6&, const CountVector6&) = default;
};

CountVector6 operator+(const CountVector6& a, const CountVector6& b) noexcept;

constexpr Direction negate(Direction d) noexcept { return Direction((d.index() + 3) % kDirections); }

/// Rotation by zeta^r: k -> (k + r) mod 6.
constexpr Direction rotate(Direction d, int r) noexcept {
    return Direction(((d.index() + r) % kDirections + kDirections) % kDirections);
}

/// X = s * omega^j. Even k carry sign +1.
constexpr std::pair<Sign, Axis> axis_sign_decompose(Direction d) noexcept {
    const int k = d.index();
    const bool plus = k % 2 == 0;
    const int even = plus ? k : (k + 3) % kDirections;
    const int j = even == 0 ? 3 : even / 2;
    return {plus ? Sign::Plus : Sign::Minus, Axis(j)};
}

constexpr Direction recompose(Sign s, Axis a) noexcept {
    const int even = a.power() == 3 ? 0 : 2 * a.power();
    return s == Sign::Plus ? Direction(even) : Direction((even + 3) % kDirections);
}

/// The unit step zeta^k in (u, v) coordinates.
constexpr LatticePoint unit_step(Direction d) noexcept {
    constexpr std::array<LatticePoint, kDirections> table{{{1, 0}, {1, 1}, {0, 1}, {-1, 0}, {-1, -1}, {0, -1}}};
    return table[static_cast<std::size_t>(d.index())];
}

LatticePoint position_from_counts(const CountVector6& c) noexcept;

/// (u - v/2, v*sqrt(3)/2).
Cartesian to_cartesian(const LatticePoint& pt) noexcept;

CountVector6 rotate_counts(const CountVector6& c, int r) noexcept;

}  // namespace erwhex
