#include "arnoldflow/shear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "arnoldflow/errors.hpp"
#include "arnoldflow/numeric.hpp"

namespace arnoldflow {

namespace {

std::uint64_t zeta_floor(double zeta, std::uint64_t w) {
    return static_cast<std::uint64_t>(std::floor(zeta * static_cast<double>(w)));
}

}  // namespace

DriftSeries drift_sequence(const RoofSpec& f, double p, double q, CirclePoint x, CirclePoint xp, CirclePoint y,
                           CirclePoint yp, std::uint64_t w_max, const ContinuedFraction& cf) {
    if (!(p > 0) || !(q > 0) || p == q) fail(ErrorKind::InvalidArgument, "need p, q > 0 with p != q");
    DriftSeries s;
    s.p = p;
    s.q = q;
    s.zeta = p / q;
    s.x = x, s.xp = xp, s.y = y, s.yp = yp;
    std::uint64_t m_max = zeta_floor(s.zeta, w_max);
    auto Sx = prefix_sums(f, x, w_max, 0, cf), Sxp = prefix_sums(f, xp, w_max, 0, cf);
    auto Sy = prefix_sums(f, y, m_max, 0, cf), Syp = prefix_sums(f, yp, m_max, 0, cf);
    s.a.resize(w_max + 1);
    for (std::uint64_t w = 0; w <= w_max; ++w) {
        std::uint64_t m = zeta_floor(s.zeta, w);
        s.a[w] = p * (Sx[w] - Sxp[w]) - q * (Sy[m] - Syp[m]);
    }
    for (std::uint64_t w = 0; w < w_max; ++w) {
        double bound = p * std::fabs((Sx[w + 1] - Sx[w]) - (Sxp[w + 1] - Sxp[w]));
        for (std::uint64_t m = zeta_floor(s.zeta, w); m < zeta_floor(s.zeta, w + 1); ++m)
            bound += q * std::fabs((Sy[m + 1] - Sy[m]) - (Syp[m + 1] - Syp[m]));
        double step = std::fabs(s.a[w + 1] - s.a[w]);
        s.continuity_excess = std::max(s.continuity_excess, step - bound);
    }
    return s;
}

double drift_value(const RoofSpec& f, const DriftSeries& s, std::uint64_t w, const ContinuedFraction& cf) {
    auto n = static_cast<std::int64_t>(w);
    auto m = static_cast<std::int64_t>(zeta_floor(s.zeta, w));
    return s.p * (birkhoff_sum(f, s.x, n, 0, cf) - birkhoff_sum(f, s.xp, n, 0, cf)) -
           s.q * (birkhoff_sum(f, s.y, m, 0, cf) - birkhoff_sum(f, s.yp, m, 0, cf));
}

std::optional<Splitting> splitting_time(const DriftSeries& s, double r_pq, double eps, double kappa) {
    const auto& a = s.a;
    std::size_t first = a.size();
    int sign = 0;
    for (std::size_t w = 0; w < a.size(); ++w) {
        if (std::fabs(a[w] - r_pq) < eps) sign = 1;
        else if (std::fabs(a[w] + r_pq) < eps) sign = -1;
        if (sign != 0) {
            first = w;
            break;
        }
    }
    if (sign == 0) return std::nullopt;
    Splitting sp;
    sp.first_entry = first;
    sp.shift_sign = sign;
    double target = sign * r_pq;
    std::size_t best = first;
    for (std::size_t w = first; w < a.size() && std::fabs(a[w] - target) < eps; ++w)
        if (std::fabs(a[w] - target) < std::fabs(a[best] - target)) best = w;
    sp.M = best;
    sp.L = static_cast<std::uint64_t>(std::floor(kappa * static_cast<double>(best)));
    std::uint64_t end = sp.M + sp.L;
    if (end >= a.size()) {
        sp.plateau_ok = false;
        sp.plateau_dev = std::numeric_limits<double>::infinity();
        return sp;
    }
    for (std::uint64_t w = sp.M; w <= end; ++w) sp.plateau_dev = std::max(sp.plateau_dev, std::fabs(a[w] - a[sp.M]));
    sp.plateau_ok = sp.plateau_dev < std::pow(eps, 1.5);
    return sp;
}

int variation_scale(double d, const ContinuedFraction& cf) {
    auto threshold = [&](int n) {
        double q = cf.q_double(n);
        return 1.0 / (q * std::log(q));
    };
    if (!(d > 0) || d >= threshold(2)) fail(ErrorKind::ScaleOutOfRange, "distance must lie in (0, 1/(q_2 log q_2))");
    for (int n = 2; n + 1 <= cf.depth(); ++n)
        if (threshold(n + 1) < d && d <= threshold(n)) return n;
    fail(ErrorKind::ScaleOutOfRange, "distance below the deepest scale");
}

CaseReport classify_case(CirclePoint x, CirclePoint xp, CirclePoint y, CirclePoint yp, const ContinuedFraction& cf,
                         double zeta, double c_pq) {
    double dx = (x - xp).dist(), dy = (y - yp).dist();
    CaseReport r;
    r.x_scale = variation_scale(dx, cf);
    r.v_scale = variation_scale(dy, cf);
    r.kind = r.x_scale == r.v_scale ? ShearCase::SecondOrder : ShearCase::Asynchronous;
    r.T = zeta * c_pq * std::min({1 / dx, 1 / dy, cf.q_double(r.v_scale + 1)});
    return r;
}

double StepProbe::operator()(double t) const {
    auto it = std::upper_bound(breaks.begin(), breaks.end(), t);
    return values[static_cast<std::size_t>(it - breaks.begin())];
}

double StepProbe::integral(double lo, double hi) const {
    if (hi <= lo) return 0.0;
    double total = 0, cur = lo;
    std::size_t i = static_cast<std::size_t>(std::upper_bound(breaks.begin(), breaks.end(), lo) - breaks.begin());
    while (cur < hi) {
        double next = i < breaks.size() ? std::min(breaks[i], hi) : hi;
        total += values[i] * (next - cur);
        cur = next;
        ++i;
    }
    return total;
}

void validate_triple(const GoodTriple& g) {
    auto bad = [](const char* m) { fail(ErrorKind::InvalidTriple, m); };
    if (!(g.d > 0 && g.d < 1) || !(g.xi > 0 && g.xi < 1)) bad("need 0 < d, xi < 1");
    if (!(g.L > 0)) bad("interval length must be positive");
    double lo = g.M, hi = g.M + g.L;
    if (g.kind == TripleKind::PAL) {
        if (g.pieces.empty()) bad("PAL needs at least one piece");
        if (static_cast<double>(g.pieces.size()) > g.L / g.d) bad("more than |I|/d pieces");
        double measure = 0;
        for (std::size_t i = 0; i < g.pieces.size(); ++i) {
            const auto& pc = g.pieces[i];
            if (!(pc.lo < pc.hi) || pc.lo < lo || pc.hi > hi) bad("piece outside I or empty");
            if (i > 0 && pc.lo < g.pieces[i - 1].hi) bad("pieces overlap or are unordered");
            if (i > 0 && !(std::fabs(pc.R - g.pieces[i - 1].R) < g.xi)) bad("|R_{i+1} - R_i| >= xi");
            measure += pc.hi - pc.lo;
        }
        if (!(measure > (1 - g.xi) * g.L)) bad("|U| <= (1 - xi)|I|");
        if (std::fabs(g.pieces[0].R) > g.xi * g.L) bad("|R_1| > xi |I|");
    } else {
        if (!g.a || !g.a_prime) bad("SAL needs a and a'");
        if (std::fabs(g.a(lo) - lo) > g.xi * g.L || std::fabs(g.a(hi) - hi) > g.xi * g.L)
            bad("endpoint deviation exceeds xi |I|");
        const int grid = 10000;
        for (int i = 0; i <= grid; ++i) {
            double t = lo + g.L * i / grid;
            double da = g.a_prime(t);
            if (!(da > 1 - g.xi && da <= 1 + g.xi)) bad("a' outside (1 - xi, 1 + xi]");
        }
    }
}

LemmaReport almost_linear_check(const GoodTriple& g, const StepProbe& f) {
    validate_triple(g);
    for (double v : f.values)
        if (!(v > 0 && v <= 1)) fail(ErrorKind::InvalidArgument, "probe values must lie in (0, 1]");
    double lo = g.M, hi = g.M + g.L;
    double lhs = 0;
    if (g.kind == TripleKind::PAL) {
        double covered = 0;
        for (const auto& pc : g.pieces) {
            lhs += f.integral(pc.lo + pc.R, pc.hi + pc.R);
            covered += pc.hi - pc.lo;
        }
        lhs += g.L - covered;
    } else {
        // a is increasing: integrate the probe over preimages of its steps
        auto inverse = [&](double b) {
            double l = lo, h = hi;
            if (b <= g.a(l)) return l;
            if (b >= g.a(h)) return h;
            for (int it = 0; it < 200; ++it) {
                double mid = 0.5 * (l + h);
                if (mid <= l || mid >= h) break;
                (g.a(mid) < b ? l : h) = mid;
            }
            return 0.5 * (l + h);
        };
        double prev = lo;
        for (std::size_t i = 0; i < f.breaks.size(); ++i) {
            double t = inverse(f.breaks[i]);
            lhs += f.values[i] * (t - prev);
            prev = t;
        }
        lhs += f.values.back() * (hi - prev);
    }
    double rhs = f.integral(lo, hi);
    LemmaReport r;
    r.lemma_id = "almost-linear";
    r.measured = lhs / g.L - rhs / g.L;
    r.bound = 9 * g.xi / g.d;
    r.margin = r.bound - r.measured;
    r.pass = r.measured < r.bound;
    r.inputs = {{"kind", g.kind == TripleKind::PAL ? 0.0 : 1.0}, {"L", g.L}, {"d", g.d}, {"xi", g.xi},
                {"pieces", static_cast<double>(g.pieces.size())}};
    return r;
}

double combinatorial_expression(double p, double q, double j1, double j2, double A, double B) {
    double a2 = 1 / (A * A), b2 = 1 / (B * B);
    return std::max(std::fabs(q * j1 * a2 - p * j2 * b2), std::fabs(q * q * j1 * a2 / A - p * p * j2 * b2 / B));
}

CombinatorialResult combinatorial_search(double U, double V, double p, double q, double K, const GridSpec& grid) {
    if (U == 0 || V == 0 || p == 0 || q == 0 || p == q) fail(ErrorKind::InvalidArgument, "need nonzero U, V, p, q, p != q");
    CombinatorialResult res;
    auto same = [](double a, double b) { return std::fabs(a - b) <= 1e-12 * std::max(std::fabs(a), std::fabs(b)); };
    double ratio = p / q;
    const double js[2] = {U, V};
    if (same(ratio, U / V) || same(ratio, V / U) || same(ratio, 1.0)) {
        res.excluded = true;
        // p/q = j2/j1 and B = A p/q
        for (double j1 : js)
            for (double j2 : js)
                if (same(ratio, j2 / j1)) res.family_j1 = j1, res.family_j2 = j2;
        res.family_ratio = q / p;
        for (int i = 0; i < 200; ++i) {
            double A = grid.a_min * std::pow(grid.a_max / grid.a_min, i / 199.0);
            double B = A / res.family_ratio;
            double scale = std::max(std::fabs(q * res.family_j1 / (A * A)), std::fabs(q * q * res.family_j1 / (A * A * A)));
            res.family_residual = std::max(
                res.family_residual,
                combinatorial_expression(p, q, res.family_j1, res.family_j2, A, B) / scale);
        }
    }

    std::vector<double> cs;
    for (int i = 0; i < grid.c_points; ++i) {
        double c = grid.c_min * std::pow(grid.c_max / grid.c_min, grid.c_points > 1 ? i / (grid.c_points - 1.0) : 0.0);
        cs.push_back(c);
        cs.push_back(-c);
    }
    // zeros of each expression in C = A/B
    for (double j1 : js)
        for (double j2 : js) {
            double s = q * j1 / (p * j2);
            if (s > 0) cs.push_back(std::sqrt(s)), cs.push_back(-std::sqrt(s));
            cs.push_back(std::cbrt(q * q * j1 / (p * p * j2)));
        }
    std::vector<double> minima(static_cast<std::size_t>(grid.a_points));
    std::vector<double> as(minima.size());
    for (int i = 0; i < grid.a_points; ++i) {
        double A = grid.a_min * std::pow(grid.a_max / grid.a_min, grid.a_points > 1 ? i / (grid.a_points - 1.0) : 0.0);
        as[static_cast<std::size_t>(i)] = A;
        double m = std::numeric_limits<double>::infinity();
        for (double C : cs)
            for (double j1 : js)
                for (double j2 : js) m = std::min(m, combinatorial_expression(p, q, j1, j2, A, A / C));
        minima[static_cast<std::size_t>(i)] = m;
    }
    res.grid_points = static_cast<std::uint64_t>(grid.a_points) * cs.size() * 4;
    std::size_t k = 0;
    while (k < minima.size() && minima[k] >= K) ++k;
    if (k == 0) {
        res.c_threshold = 0;
        res.min_over_grid_of_max = minima.empty() ? 0 : minima[0];
        return res;
    }
    double a_star = as[k - 1];
    res.c_threshold = a_star / 10;
    res.min_over_grid_of_max = *std::min_element(minima.begin(), minima.begin() + static_cast<std::ptrdiff_t>(k));

    Rng rng = instance_rng(grid.seed, 0);
    for (int i = 0; i < grid.random_checks; ++i) {
        double A = grid.a_min * std::pow(a_star / grid.a_min, uniform01(rng));
        double C = grid.c_min * std::pow(grid.c_max / grid.c_min, uniform01(rng));
        if (rng() & 1) C = -C;
        double j1 = js[rng() & 1], j2 = js[rng() & 1];
        if (combinatorial_expression(p, q, j1, j2, A, A / C) < K) ++res.random_counterexamples;
    }
    return res;
}

}  // namespace arnoldflow
