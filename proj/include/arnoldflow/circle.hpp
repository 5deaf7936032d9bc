#pragma once

#include <cmath>
#include <cstdint>

namespace arnoldflow {

using u128 = unsigned __int128;
using i128 = __int128;

// Point of R/Z in 128-bit fixed point: value = turns / 2^128.
// Addition wraps modulo 1 for free; absolute resolution is 2^-128.
struct CirclePoint {
    u128 turns = 0;

    static CirclePoint from_turns(u128 t) { return CirclePoint{t}; }
    static CirclePoint from_double(double x);

    // {x} as a double in [0,1).
    double value() const;
    // 1 - {x}, accurate also when {x} is close to 1.
    double complement() const;
    // ‖x‖ = min({x}, 1 - {x}).
    double dist() const;
    u128 dist_turns() const { return turns <= static_cast<u128>(-turns) ? turns : static_cast<u128>(-turns); }

    CirclePoint operator+(CirclePoint o) const { return CirclePoint{turns + o.turns}; }
    CirclePoint operator-(CirclePoint o) const { return CirclePoint{turns - o.turns}; }
    CirclePoint operator-() const { return CirclePoint{static_cast<u128>(-turns)}; }
    bool operator==(const CirclePoint& o) const = default;
};

double turns_to_double(u128 t);

inline double dist_to_int(CirclePoint x) { return x.dist(); }

}  // namespace arnoldflow
