#include "arnoldflow/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "arnoldflow/errors.hpp"

namespace arnoldflow {

namespace {

// floor(t * q / 2^128) without overflow
std::uint64_t mul_shift128(u128 t, std::uint64_t q) {
    u128 hi = t >> 64;
    u128 lo = t & 0xFFFFFFFFFFFFFFFFULL;
    u128 a = hi * q;
    u128 b = (lo * q) >> 64;
    return static_cast<std::uint64_t>((a + b) >> 64);
}

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<u128>(a) * b) % m);
}

ClosestReturn naive_closest(CirclePoint x, int n, std::uint64_t q, const ContinuedFraction& cf) {
    if (q > kNaiveBudget) fail(ErrorKind::BudgetExceeded, "naive closest return over q_n > 1e8");
    ClosestReturn best;
    best.n = n;
    CirclePoint pt = x;
    for (std::uint64_t j = 0; j < q; ++j) {
        u128 d = pt.dist_turns();
        if (j == 0 || d < best.dist_turns) {
            best.dist_turns = d;
            best.i = j;
        }
        pt = pt + cf.alpha;
    }
    return best;
}

}  // namespace

ClosestReturn closest_return(CirclePoint x, int n, const ContinuedFraction& cf, Method method) {
    if (n < 0 || n > cf.depth()) fail(ErrorKind::DepthExceeded, "closest_return scale beyond depth");
    std::uint64_t q = cf.qn(n);
    ClosestReturn out;
    if (method == Method::Naive || q <= 8 || n == 0) {
        out = naive_closest(x, n, q, cf);
    } else {
        // x + j alpha = x + k/q_n + (small one-signed drift), with k = j p_n mod q_n.
        // The closest point has k within a couple of steps of -x q_n.
        std::uint64_t qm1 = cf.qn(n - 1) % q;
        std::uint64_t inv = (n % 2 == 1) ? qm1 : (q - qm1) % q;  // p_n^{-1} mod q_n
        std::uint64_t k0 = mul_shift128(static_cast<u128>(-x.turns), q);
        bool have = false;
        for (int dk = -2; dk <= 3; ++dk) {
            std::int64_t kk = static_cast<std::int64_t>(k0 % q) + dk;
            std::uint64_t k = static_cast<std::uint64_t>(((kk % static_cast<std::int64_t>(q)) + static_cast<std::int64_t>(q)) %
                                                         static_cast<std::int64_t>(q));
            std::uint64_t j = mulmod(k, inv, q);
            u128 d = cf.shift(x, static_cast<std::int64_t>(j)).dist_turns();
            if (!have || d < out.dist_turns || (d == out.dist_turns && j < out.i)) {
                out.dist_turns = d;
                out.i = j;
                have = true;
            }
        }
        out.n = n;
    }
    out.B = static_cast<double>(q) * turns_to_double(out.dist_turns);
    return out;
}

RangeMin range_min(CirclePoint x, std::int64_t start, std::uint64_t length, const ContinuedFraction& cf,
                   Method method) {
    if (length == 0) fail(ErrorKind::InvalidArgument, "empty range");
    RangeMin best;
    if (method == Method::Naive) {
        if (length > kNaiveBudget) fail(ErrorKind::BudgetExceeded, "naive range scan over 1e8 points");
        CirclePoint pt = cf.shift(x, start);
        for (std::uint64_t k = 0; k < length; ++k) {
            u128 d = pt.dist_turns();
            if (d < best.dist_turns) {
                best.dist_turns = d;
                best.index = start + static_cast<std::int64_t>(k);
            }
            pt = pt + cf.alpha;
        }
        return best;
    }
    int top = cf.max_machine_index();
    CirclePoint pos = cf.shift(x, start);
    std::int64_t offset = start;
    std::uint64_t remaining = length;
    int j = top;
    while (remaining > 0) {
        while (j > 0 && cf.qn(j) > remaining) --j;
        std::uint64_t qj = cf.qn(j);
        ClosestReturn cr = closest_return(pos, j, cf, Method::Accelerated);
        if (cr.dist_turns < best.dist_turns) {
            best.dist_turns = cr.dist_turns;
            best.index = offset + static_cast<std::int64_t>(cr.i);
        }
        pos = cf.shift(pos, static_cast<std::int64_t>(qj));
        offset += static_cast<std::int64_t>(qj);
        remaining -= qj;
    }
    return best;
}

SpacingVerdict spacing_check(CirclePoint x, int n, const ContinuedFraction& cf) {
    std::uint64_t q = cf.qn(n);
    if (q > 10'000'000) fail(ErrorKind::BudgetExceeded, "spacing check limited to q_n <= 1e7");
    std::vector<u128> pts(q);
    CirclePoint pt = x;
    for (std::uint64_t j = 0; j < q; ++j) {
        pts[j] = pt.turns;
        pt = pt + cf.alpha;
    }
    std::sort(pts.begin(), pts.end());
    u128 min_gap = ~static_cast<u128>(0), max_gap = 0;
    for (std::uint64_t j = 0; j < q; ++j) {
        u128 g = (j + 1 < q) ? pts[j + 1] - pts[j] : static_cast<u128>(pts[0] - pts[j]);  // wrap-around gap
        if (q == 1) g = ~static_cast<u128>(0);
        min_gap = std::min(min_gap, g);
        max_gap = std::max(max_gap, g);
    }
    SpacingVerdict v;
    if (q == 1) {
        v.min_gap = 1.0;
        v.max_gap = 1.0;
        v.min_gap_ok = true;
        v.gap_cover_ok = q <= 2;
        return v;
    }
    v.min_gap = turns_to_double(min_gap);
    v.max_gap = turns_to_double(max_gap);
    // exact comparisons against 1/(2q) and 2/q in units of 2^-128
    BigInt one = BigInt(1) << 128;
    v.min_gap_ok = BigInt(min_gap) * 2 * q >= one;
    v.gap_cover_ok = BigInt(max_gap) * q <= one * 2;
    return v;
}

Window Window::of(double w) {
    Window out;
    out.half_width = w;
    if (!(w < 0.5)) {
        out.infinite = true;
        out.turns = ~static_cast<u128>(0);
        return out;
    }
    out.turns = CirclePoint::from_double(w).turns;
    out.margin = CirclePoint::from_double(w * 1e-12).turns;
    return out;
}

HitTest window_hit(u128 dist_turns, const Window& w, u128 extra) {
    HitTest h;
    if (w.infinite) {
        h.hit = true;
        return h;
    }
    u128 edge = w.turns + extra;
    u128 lo = edge > w.margin ? edge - w.margin : 0;
    u128 hi = edge + w.margin;
    h.hit = dist_turns <= hi;
    h.near_boundary = dist_turns >= lo && dist_turns <= hi;
    return h;
}

double window_width(double q, double exponent) {
    if (q < 2) return std::numeric_limits<double>::infinity();
    return 1.0 / (q * std::pow(std::log(q), exponent));
}

Membership sigma_membership(CirclePoint x, int n, double M, const ContinuedFraction& cf, Method method) {
    if (n < 0 || n + 1 > cf.depth()) fail(ErrorKind::DepthExceeded, "sigma_membership needs q_{n+1}");
    if (!(M > 0)) fail(ErrorKind::InvalidArgument, "M must be positive");
    double span = std::floor(M * cf.q_double(n + 1));
    if (span > 4e18) fail(ErrorKind::BudgetExceeded, "M q_{n+1} out of range");
    auto L = static_cast<std::uint64_t>(span) + 1;
    if (method == Method::Naive && L > kNaiveBudget) fail(ErrorKind::BudgetExceeded, "naive sigma scan over 1e8 points");
    Window w = Window::of(window_width(cf.q_double(n), 7.0 / 8.0));
    RangeMin rm = range_min(x, 0, L, cf, method);
    HitTest h = window_hit(rm.dist_turns, w);
    return Membership{h.hit, h.near_boundary, rm.index, rm.dist()};
}

namespace {

HitTest two_sided_hit(CirclePoint x, int s, double exponent, const ContinuedFraction& cf, Method method) {
    std::uint64_t q = cf.qn(s);
    if (method == Method::Naive && 2 * q + 1 > kNaiveBudget) fail(ErrorKind::BudgetExceeded, "naive scan over 1e8 points");
    Window w = Window::of(window_width(static_cast<double>(q), exponent));
    RangeMin rm = range_min(x, -static_cast<std::int64_t>(q), 2 * q + 1, cf, method);
    return window_hit(rm.dist_turns, w);
}

}  // namespace

GoodSetResult good_set_membership(CirclePoint x, GoodSetKind kind, int s, const ContinuedFraction& cf, Method method) {
    GoodSetResult r;
    if (s < 0 || s > cf.depth()) fail(ErrorKind::DepthExceeded, "good set scale beyond depth");
    auto check = [&](int scale, double exponent) {
        HitTest h = two_sided_hit(x, scale, exponent, cf, method);
        r.near_boundary = r.near_boundary || h.near_boundary;
        if (h.hit && r.failing_scale < 0) r.failing_scale = scale;
        return !h.hit;
    };
    switch (kind) {
    case GoodSetKind::EPrime:
        r.member = check(s, 2.0);
        r.truncated_at = s;
        return r;
    case GoodSetKind::W:
        r.member = check(s, 7.0 / 8.0);
        r.truncated_at = s;
        return r;
    case GoodSetKind::EIntersection:
    case GoodSetKind::ZIntersection: {
        int top = std::min(cf.max_machine_index(), cf.depth() - 1);
        r.member = true;
        for (int sc = s; sc <= top; ++sc) {
            bool ok = check(sc, 2.0);
            if (ok && kind == GoodSetKind::ZIntersection && !in_k_alpha(cf.q_double(sc), cf.q_double(sc + 1)))
                ok = check(sc, 7.0 / 8.0);
            r.truncated_at = sc;
            if (!ok) {
                r.member = false;
                break;
            }
        }
        return r;
    }
    }
    return r;
}

ForwardBackward forward_backward_classify(CirclePoint y, CirclePoint yp, int s, const ContinuedFraction& cf,
                                          Method method) {
    if (s < 0 || s + 1 > cf.depth()) fail(ErrorKind::DepthExceeded, "forward_backward_classify needs q_{s+1}");
    u128 d = yp.turns - y.turns;
    u128 len = std::min(d, static_cast<u128>(-d));
    if (len == 0) fail(ErrorKind::InvalidArgument, "y and y' coincide");
    CirclePoint start = (d == len) ? y : yp;
    u128 half = len - len / 2;
    CirclePoint c{start.turns + len / 2};

    std::uint64_t qs = cf.qn(s);
    double qs1 = cf.q_double(s + 1);
    auto L = static_cast<std::uint64_t>(std::floor(qs1 / 4));
    if (method == Method::Naive && L + 1 > kNaiveBudget) fail(ErrorKind::BudgetExceeded, "naive scan over 1e8 points");
    Window w = Window::of(window_width(static_cast<double>(qs), 7.0 / 8.0));

    ForwardBackward out;
    RangeMin fwd = range_min(c, 0, L + 1, cf, method);
    RangeMin bwd = range_min(c, -static_cast<std::int64_t>(L), L + 1, cf, method);
    HitTest hf = window_hit(fwd.dist_turns, w, half);
    HitTest hb = window_hit(bwd.dist_turns, w, half);
    out.forward_ok = !hf.hit;
    out.backward_ok = !hb.hit;
    out.forward_hit = hf.hit ? fwd.index : -1;
    out.backward_hit = hb.hit ? -bwd.index : -1;
    out.hypothesis_a = in_k_alpha(static_cast<double>(qs), qs1);
    if (!out.hypothesis_a) {
        if (method == Method::Naive && 2 * qs + 1 > kNaiveBudget) fail(ErrorKind::BudgetExceeded, "naive scan over 1e8 points");
        RangeMin two = range_min(c, -static_cast<std::int64_t>(qs), 2 * qs + 1, cf, method);
        HitTest ht = window_hit(two.dist_turns, w, half);
        out.hypothesis_b = !ht.hit;
        out.near_boundary = ht.near_boundary;
    }
    out.near_boundary = out.near_boundary || hf.near_boundary || hb.near_boundary;
    return out;
}

}  // namespace arnoldflow
