#pragma once

#include <cstdint>
#include <optional>

#include "arnoldflow/circle.hpp"
#include "arnoldflow/contfrac.hpp"

namespace arnoldflow {

enum class Method { Naive, Accelerated };

struct ClosestReturn {
    int n = 0;
    std::uint64_t i = 0;  // i_{n,x}, smallest index on ties
    double B = 0;         // q_n ‖x + i alpha‖
    u128 dist_turns = 0;
};

ClosestReturn closest_return(CirclePoint x, int n, const ContinuedFraction& cf, Method method = Method::Accelerated);

struct RangeMin {
    std::int64_t index = 0;  // smallest index attaining the minimum
    u128 dist_turns = ~static_cast<u128>(0);
    double dist() const { return turns_to_double(dist_turns); }
};

// min over i in [start, start + length) of ‖x + i alpha‖; length >= 1.
RangeMin range_min(CirclePoint x, std::int64_t start, std::uint64_t length, const ContinuedFraction& cf,
                   Method method = Method::Accelerated);

inline constexpr std::uint64_t kNaiveBudget = 100'000'000;

struct SpacingVerdict {
    double min_gap = 0;
    double max_gap = 0;
    bool min_gap_ok = true;    // min_gap >= 1/(2 q_n)
    bool gap_cover_ok = true;  // every arc of length 2/q_n holds an orbit point
};

SpacingVerdict spacing_check(CirclePoint x, int n, const ContinuedFraction& cf);

// Window [-w, w] around the singularity. Points whose distance is within
// 1e-12 w of the edge count as inside and raise the boundary flag.
struct Window {
    double half_width = 0;  // +inf when the scale is degenerate
    u128 turns = 0;
    u128 margin = 0;
    bool infinite = false;
    static Window of(double w);
};

struct HitTest {
    bool hit = false;
    bool near_boundary = false;
};

HitTest window_hit(u128 dist_turns, const Window& w, u128 extra = 0);

struct Membership {
    bool member = false;
    bool near_boundary = false;
    std::int64_t closest_index = 0;
    double closest_dist = 0;
};

// 1/(q log^e q), infinite for q < 2
double window_width(double q, double exponent);

// x in Sigma_n(M): some 0 <= i <= M q_{n+1} has x + i alpha in [-w, w],
// w = 1/(q_n log^{7/8} q_n).
Membership sigma_membership(CirclePoint x, int n, double M, const ContinuedFraction& cf,
                            Method method = Method::Accelerated);

enum class GoodSetKind { EPrime, W, EIntersection, ZIntersection };

struct GoodSetResult {
    bool member = false;
    bool near_boundary = false;
    int truncated_at = -1;  // last scale examined for intersections
    int failing_scale = -1;
};

// EPrime/W use scale s; intersections run s from s0 up to the last machine
// scale of cf (Z skips s in K_alpha and also requires E^{s0}).
GoodSetResult good_set_membership(CirclePoint x, GoodSetKind kind, int s, const ContinuedFraction& cf,
                                  Method method = Method::Accelerated);

struct ForwardBackward {
    bool forward_ok = false;
    bool backward_ok = false;
    bool hypothesis_a = false;  // s in K_alpha
    bool hypothesis_b = false;  // arc avoids the two-sided q_s window union
    bool near_boundary = false;
    std::int64_t forward_hit = -1;   // smallest hitting i >= 0 (if any)
    std::int64_t backward_hit = -1;  // smallest hitting i >= 0 for R^{+i}
    bool hypotheses() const { return hypothesis_a || hypothesis_b; }
};

// [y, y'] is the shorter arc between the two points.
ForwardBackward forward_backward_classify(CirclePoint y, CirclePoint yp, int s, const ContinuedFraction& cf,
                                          Method method = Method::Accelerated);

}  // namespace arnoldflow
