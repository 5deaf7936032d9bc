#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "arnoldflow/numeric.hpp"
#include "arnoldflow/shear.hpp"

namespace gen {

using namespace arnoldflow;

inline CirclePoint point(Rng& rng) {
    u128 hi = rng();
    return CirclePoint{(hi << 64) | rng()};
}

inline double between(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

// Valid PAL triple: v pieces with small gaps, drifting offsets.
inline GoodTriple pal(Rng& rng) {
    GoodTriple g;
    g.kind = TripleKind::PAL;
    g.M = between(rng, -50, 50);
    g.L = between(rng, 1, 100);
    g.d = between(rng, 0.05, 0.95);
    g.xi = between(rng, 0.001, 0.3);
    auto vmax = static_cast<int>(std::floor(g.L / g.d));
    int v = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(std::max(1, std::min(vmax, 60))));
    // total gap below xi L, spread over v + 1 slots
    double gap_total = 0.9 * g.xi * g.L * uniform01(rng);
    std::vector<double> w(static_cast<std::size_t>(v) + 1), len(static_cast<std::size_t>(v));
    double ws = 0, ls = 0;
    for (auto& x : w) ws += (x = uniform01(rng) + 1e-3);
    for (auto& x : len) ls += (x = uniform01(rng) + 0.05);
    double cur = g.M, R = between(rng, -1, 1) * g.xi * g.L;
    for (int i = 0; i < v; ++i) {
        cur += gap_total * w[static_cast<std::size_t>(i)] / ws;
        double next = cur + (g.L - gap_total) * len[static_cast<std::size_t>(i)] / ls;
        if (i > 0) R += between(rng, -0.999, 0.999) * g.xi;
        g.pieces.push_back({cur, std::min(next, g.M + g.L), R});
        cur = next;
    }
    return g;
}

// Valid SAL triple: a(t) = t + c + amp sin(omega t + phase).
inline GoodTriple sal(Rng& rng) {
    GoodTriple g;
    g.kind = TripleKind::SAL;
    g.M = between(rng, -50, 50);
    g.L = between(rng, 1, 100);
    g.d = between(rng, 0.05, 0.95);
    g.xi = between(rng, 0.001, 0.3);
    double omega = between(rng, 0.1, 5);
    double amp = 0.99 * g.xi / omega * uniform01(rng);
    amp = std::min(amp, 0.45 * g.xi * g.L);
    double c = between(rng, -1, 1) * (0.5 * g.xi * g.L);
    double phase = between(rng, 0, 6.28);
    g.a = [=](double t) { return t + c + amp * std::sin(omega * t + phase); };
    g.a_prime = [=](double t) { return 1 + amp * omega * std::cos(omega * t + phase); };
    return g;
}

// Random steps over a window around [M, M + L]; adversarial probes put value 1
// on the images of the PAL pieces and a small value elsewhere.
inline StepProbe probe(Rng& rng, const GoodTriple& g, bool adversarial) {
    StepProbe f;
    if (adversarial && g.kind == TripleKind::PAL) {
        double low = between(rng, 1e-3, 0.1);
        f.values.push_back(low);
        for (const auto& pc : g.pieces) {
            double a = pc.lo + pc.R, b = pc.hi + pc.R;
            if (!f.breaks.empty() && a < f.breaks.back()) a = f.breaks.back();
            if (b <= a) continue;
            f.breaks.push_back(a);
            f.values.push_back(1.0);
            f.breaks.push_back(b);
            f.values.push_back(low);
        }
        return f;
    }
    int m = 2 + static_cast<int>(rng() % 40);
    for (int i = 0; i < m; ++i) f.breaks.push_back(between(rng, g.M - 0.5 * g.L, g.M + 1.5 * g.L));
    std::sort(f.breaks.begin(), f.breaks.end());
    for (int i = 0; i <= m; ++i) f.values.push_back(between(rng, 1e-3, 1.0));
    return f;
}

}  // namespace gen
