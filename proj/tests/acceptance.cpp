// One PASS/FAIL line per acceptance criterion. Criteria passed with
// --expect-fail are still reported but do not change the exit status.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "arnoldflow/birkhoff.hpp"
#include "arnoldflow/calibrate.hpp"
#include "arnoldflow/mobius.hpp"
#include "arnoldflow/numeric.hpp"
#include "arnoldflow/orbit.hpp"
#include "arnoldflow/shear.hpp"
#include "arnoldflow/sl2.hpp"
#include "arnoldflow/specialflow.hpp"
#include "arnoldflow/suite.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace arnoldflow;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

const ContinuedFraction& golden() {
    static const ContinuedFraction cf = cf_expand(AlphaSource::golden(), 40);
    return cf;
}
const ContinuedFraction& sqrt2() {
    static const ContinuedFraction cf = cf_expand(AlphaSource::sqrt2_minus_1(), 40);
    return cf;
}
const ContinuedFraction& constructed() {
    static const ContinuedFraction cf = construct_alpha_in_D(3, 40).cf;
    return cf;
}

Verdict cf_bounds() {
    int checked = 0, bad = 0;
    for (const auto* cf : {&golden(), &sqrt2(), &constructed()}) {
        for (int n = cf->a(1) >= 2 ? 0 : 1; n + 1 < cf->depth(); ++n) {
            ++checked;
            if (!dist_qn_alpha(*cf, n).strictly_inside) ++bad;
        }
    }
    return {bad == 0, std::to_string(checked) + " scales, " + std::to_string(bad) + " violations"};
}

Verdict ostrowski_round_trip() {
    int bad = 0;
    for (const auto* cf : {&golden(), &sqrt2()})
        for (std::uint64_t N = 1; N <= 100000; ++N)
            if (ostrowski_decode(ostrowski_encode(N, *cf)) != N) ++bad;
    return {bad == 0, "N <= 1e5 on golden and sqrt2-1, " + std::to_string(bad) + " failures"};
}

Verdict denjoy_koksma() {
    RoofSpec f = canonical_roof().normalized();
    int checks = 0, bad = 0;
    for (const auto* cf : {&golden(), &constructed()}) {
        Rng rng = instance_rng(301, cf == &golden() ? 0 : 1);
        for (int i = 0; i < 100; ++i) {
            CirclePoint x = gen::point(rng);
            for (int n = 1; n < cf->depth() && cf->q_double(n) <= 1e5; ++n) {
                for (const BVFunction& g : {bv_trig(1, 1, 0.5), bv_from_truncated(truncate(f, *cf, n, 0)),
                                            bv_from_truncated(truncate(f, *cf, n, 1))}) {
                    ++checks;
                    if (!denjoy_koksma_check(g, x, n, *cf).pass) ++bad;
                }
            }
        }
    }
    return {bad == 0, std::to_string(checks) + " checks, " + std::to_string(bad) + " violations"};
}

Verdict spacing() {
    int checks = 0, bad = 0;
    for (const auto* cf : {&golden(), &sqrt2()}) {
        Rng rng = instance_rng(401, cf == &golden() ? 0 : 1);
        for (int n = 1; n < cf->depth() && cf->q_double(n) <= 1e4; ++n) {
            for (int k = 0; k < 4; ++k) {
                CirclePoint x = k == 0 ? CirclePoint{} : gen::point(rng);
                SpacingVerdict v = spacing_check(x, n, *cf);
                ++checks;
                if (!v.min_gap_ok || !v.gap_cover_ok) ++bad;
            }
        }
    }
    return {bad == 0, std::to_string(checks) + " orbits, " + std::to_string(bad) + " violations"};
}

Verdict oracle_equivalence() {
    const auto& cf = constructed();
    RoofSpec f = canonical_roof().normalized();
    Rng rng = instance_rng(501, 0);
    int cr_bad = 0, sig_bad = 0, sum_bad = 0;
    double worst_rel = 0;
    std::vector<int> small;  // scales with q_{n+1} <= 1e5
    for (int n = 1; n + 1 <= cf.depth() && cf.q_double(n + 1) <= 1e5; ++n) small.push_back(n);
    for (int i = 0; i < 1000; ++i) {
        CirclePoint x = gen::point(rng);
        int n = small[rng() % small.size()];
        ClosestReturn a = closest_return(x, n, cf, Method::Naive), b = closest_return(x, n, cf, Method::Accelerated);
        if (a.i != b.i || a.dist_turns != b.dist_turns) ++cr_bad;
        double M = 0.5 + 2 * uniform01(rng);
        if (sigma_membership(x, n, M, cf, Method::Naive).member != sigma_membership(x, n, M, cf, Method::Accelerated).member)
            ++sig_bad;
        auto len = static_cast<std::int64_t>(1 + rng() % 1'000'000);
        double s1 = birkhoff_sum(f, x, len, 0, cf, SumMethod::NaiveCompensated);
        double s2 = birkhoff_sum(f, x, len, 0, cf, SumMethod::OstrowskiBlocked);
        double rel = std::fabs(s1 - s2) / std::max(1.0, std::fabs(s1));
        worst_rel = std::max(worst_rel, rel);
        if (rel > 1e-8) ++sum_bad;
    }
    return {cr_bad + sig_bad + sum_bad == 0, "closest " + std::to_string(cr_bad) + ", sigma " + std::to_string(sig_bad) +
                                                 ", sums " + std::to_string(sum_bad) + " mismatches; worst sum rel " +
                                                 fmt("%.2e", worst_rel)};
}

// Scale for a target r: closest q_n in log scale whose complement of Sigma_n(1)
// is non-empty (it is empty when a_{n+1} is large), r capped at q_{n+1}.
struct GrowthScale {
    int n = -1;
    std::uint64_t r = 0;
};

GrowthScale growth_scale(double target, std::uint64_t seed) {
    const auto& cf = constructed();
    std::vector<int> order;
    for (int n = 1; n + 1 < cf.depth() && cf.q_fits(n + 1); ++n) order.push_back(n);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return std::fabs(std::log(cf.q_double(a) / target)) < std::fabs(std::log(cf.q_double(b) / target));
    });
    Rng rng = instance_rng(seed, 99);
    for (int n : order) {
        for (int k = 0; k < 200; ++k)
            if (!sigma_membership(gen::point(rng), n, 1, cf).member)
                return {n, std::min(static_cast<std::uint64_t>(target), cf.qn(n + 1))};
    }
    return {};
}

// sampled x outside Sigma_n(1) with the slope within tol of the rate
std::pair<int, int> growth_at(const GrowthScale& sc, double tol, int count, std::uint64_t seed) {
    const auto& cf = constructed();
    RoofSpec f = canonical_roof().normalized();
    double rate = shear_rate(f), rd = static_cast<double>(sc.r);
    Rng rng = instance_rng(seed, 0);
    int within = 0, sampled = 0;
    while (sampled < count) {
        CirclePoint x = gen::point(rng);
        if (sigma_membership(x, sc.n, 1, cf).member) continue;
        ++sampled;
        double slope = birkhoff_sum(f, x, static_cast<std::int64_t>(sc.r), 1, cf) / (rd * std::log(rd));
        if (std::fabs(slope - rate) <= tol * std::fabs(rate)) ++within;
    }
    return {within, sampled};
}

Verdict growth_law() {
    GrowthScale s6 = growth_scale(1e6, 601), s5 = growth_scale(1e5, 602);
    if (s6.n < 0 || s5.n < 0) return {false, "no scale with points outside Sigma_n(1)"};
    auto [w6, n6] = growth_at(s6, 0.10, 30, 601);
    auto [w5, n5] = growth_at(s5, 0.15, 30, 602);
    bool ok = w6 >= 0.9 * n6 && w5 == n5;
    return {ok, "r=" + std::to_string(s6.r) + " (n=" + std::to_string(s6.n) + ") within 10%: " + std::to_string(w6) + "/" +
                    std::to_string(n6) + " (need 90%); r=" + std::to_string(s5.r) + " (n=" + std::to_string(s5.n) +
                    ") within 15%: " + std::to_string(w5) + "/" + std::to_string(n5) + " (need all)"};
}

Verdict calibrate() {
    CalibrationConfig cfg;
    CalibrationRun run = calibrate_freeze(canonical_roof(), all_families(), cfg);
    int est = 0, failed = 0, rows = 0;
    double worst = 1e300;
    for (const auto& o : run.outcomes) {
        ++est;
        rows += o.test_count;
        if (!o.pass()) ++failed;
        worst = std::min(worst, o.min_test_margin);
    }
    return {run.pass(), std::to_string(est) + " estimates, " + std::to_string(rows) + " test rows, " +
                            std::to_string(failed) + " failing estimates"};
}

Verdict flow_laws() {
    const auto& cf = constructed();
    FlowRoof f = FlowRoof::from(canonical_roof().normalized());
    Rng rng = instance_rng(801, 0);
    double worst_semi = 0, worst_resc = 0;
    for (int i = 0; i < 100; ++i) {
        CirclePoint z = gen::point(rng);
        FlowPoint p{z, uniform01(rng) * f.eval(z)};
        double s = gen::between(rng, -1e4, 1e4), t = gen::between(rng, -1e4, 1e4);
        FlowPoint a = evolve(f, evolve(f, p, s, cf), t, cf), b = evolve(f, p, s + t, cf);
        worst_semi = std::max(worst_semi, (a.z - b.z).dist() + std::fabs(a.r - b.r));
        LemmaReport r = verify_rescaling(f, gen::between(rng, 0.5, 2), p, t, cf);
        for (const auto& sub : r.sub) worst_resc = std::max(worst_resc, sub.measured);
    }
    return {worst_semi < 1e-8 && worst_resc < 1e-8,
            "worst semigroup " + fmt("%.2e", worst_semi) + ", worst rescaling " + fmt("%.2e", worst_resc)};
}

Verdict almost_linear() {
    Rng rng = instance_rng(901, 0);
    int bad = 0;
    double worst = -1e300;
    for (int i = 0; i < 1000; ++i) {
        GoodTriple g = i % 2 ? gen::pal(rng) : gen::sal(rng);
        StepProbe pr = gen::probe(rng, g, i % 4 == 1);
        LemmaReport r = almost_linear_check(g, pr);
        if (!r.pass) ++bad;
        worst = std::max(worst, r.measured / r.bound);
    }
    return {bad == 0, "1000 triples, " + std::to_string(bad) + " violations, worst measured/bound " + fmt("%.3f", worst)};
}

Verdict combinatorial() {
    CombinatorialResult ok = combinatorial_search(1, 2, 1, 3, 10);
    CombinatorialResult ex = combinatorial_search(1, 2, 1, 2, 10);
    bool pass = !ok.excluded && ok.c_threshold > 0 && ok.random_counterexamples == 0 && ok.min_over_grid_of_max >= 10 &&
                ok.grid_points >= 1'000'000 && ex.excluded && ex.family_j1 == 2 && ex.family_j2 == 1 &&
                ex.family_ratio == 2 && ex.family_residual < 1e-12;
    return {pass, "admissible: " + std::to_string(ok.grid_points) + " grid points, c threshold " +
                      fmt("%.3g", ok.c_threshold) + ", " + std::to_string(ok.random_counterexamples) +
                      " counterexamples; excluded family residual " + fmt("%.1e", ex.family_residual)};
}

Verdict sl2_identities() {
    Rng rng = instance_rng(1101, 0);
    int bad = 0;
    for (int i = 0; i < 1000; ++i) {
        double t = std::copysign(std::pow(10.0, gen::between(rng, -6, 6)), gen::between(rng, -1, 1));
        double s = gen::between(rng, -50, 50);
        if (!(renorm_residual(t, s) < renorm_contract(t, s))) ++bad;
        Mat2 Y;
        for (int k = 0; k < 6; ++k) {
            double v = gen::between(rng, -1, 1);
            Y = Y * (k % 3 == 0 ? horocycle(v) : k % 3 == 1 ? geodesic(v) : opposite_horocycle(v));
        }
        LocalCoords want{gen::between(rng, -0.1, 0.1), gen::between(rng, -0.1, 0.1), gen::between(rng, -0.1, 0.1)};
        LocalCoords lc = local_coords(local_matrix(want) * Y, Y);
        if (!(lc.residual < 1e-10)) ++bad;
        if (!(product_identity(lc, 1 / std::sqrt(std::fabs(lc.r))).relative < 1e-9)) ++bad;
    }
    std::vector<double> grid;
    for (int T = 1; T <= 1000; ++T) grid.push_back(T);
    QuadraticReport q = drift_quadratic_check(0, 1e-4, grid, 1);
    bool closed = q.found && q.grid_first == 100 && std::fabs(q.root - 100) < 1e-10 * 100 &&
                  std::fabs(q.refined - q.root) < 1e-10 * q.root && q.law_residual < 1e-10;
    return {bad == 0 && closed, std::to_string(bad) + " contract violations in 3000 checks; quadratic root " +
                                    fmt("%.12g", q.root) + ", law residual " + fmt("%.1e", q.law_residual)};
}

Verdict mobius() {
    MobiusTable big = mobius_sieve(kSieveLimit);
    Rng rng = instance_rng(1201, 0);
    int bad = 0;
    for (int i = 0; i < 10000; ++i) {
        std::uint64_t n = 1 + rng() % kSieveLimit;
        if (big(n) != oracle::mobius_trial(n)) ++bad;
    }
    double mert = std::fabs(static_cast<double>(mertens(big, 1'000'000))) / 1e6;
    const auto& cf = constructed();
    FlowRoof f = FlowRoof::from(canonical_roof().normalized());
    auto band = height_band_observable(f);
    const int points = 8;
    double o[3] = {0, 0, 0}, u[3] = {0, 0, 0};
    for (int i = 0; i < points; ++i) {
        Rng r = instance_rng(1202, static_cast<std::uint64_t>(i));
        FlowPoint x0{gen::point(r), 0};
        auto s = flow_samples(f, band, x0, 1.0, 2'001'000, cf);
        const std::uint64_t N[3] = {10'000, 100'000, 1'000'000}, H[3] = {100, 316, 1000};
        for (int k = 0; k < 3; ++k) {
            o[k] += std::fabs(orthogonality_sum(s, big, N[k])) / points;
            u[k] += usic_statistic(s, big, N[k], H[k]) / points;
        }
    }
    bool trend = o[1] <= o[0] && o[2] <= o[1] && u[1] <= u[0] && u[2] <= u[1];
    return {bad == 0 && mert < 1e-3 && trend,
            std::to_string(bad) + " sieve mismatches; |M(1e6)|/1e6 = " + fmt("%.2e", mert) + "; ortho " + fmt("%.2e", o[0]) +
                " " + fmt("%.2e", o[1]) + " " + fmt("%.2e", o[2]) + "; usic " + fmt("%.3f", u[0]) + " " + fmt("%.3f", u[1]) +
                " " + fmt("%.3f", u[2])};
}

Verdict forward_backward() {
    int admissible = 0, bad = 0, small_adm = 0, small_bad = 0;
    for (const auto* cf : {&golden(), &constructed()}) {
        std::vector<int> scales, small;
        for (int s = 3; s + 1 <= cf->depth() && cf->q_fits(s + 1) && cf->q_double(s + 1) < 1e12; ++s)
            (cf->q_double(s) >= 1e4 ? scales : small).push_back(s);
        Rng rng = instance_rng(1301, cf == &golden() ? 0 : 1);
        auto run = [&](const std::vector<int>& pool, int want, int& adm, int& fails) {
            int got = 0;
            while (got < want) {
                int s = pool[rng() % pool.size()];
                double qs = cf->q_double(s);
                CirclePoint y = gen::point(rng);
                CirclePoint yp = y + CirclePoint::from_double(uniform01(rng) / (qs * std::log(qs)));
                ForwardBackward r = forward_backward_classify(y, yp, s, *cf);
                if (!r.hypotheses()) continue;
                ++got;
                ++adm;
                if (!r.forward_ok && !r.backward_ok) ++fails;
            }
        };
        run(scales, 500, admissible, bad);
        run(small, 200, small_adm, small_bad);
    }
    return {bad == 0 && admissible >= 1000, std::to_string(admissible) + " admissible at q_s >= 1e4, " +
                                                std::to_string(bad) + " with neither flag; below 1e4 (reported only): " +
                                                std::to_string(small_bad) + "/" + std::to_string(small_adm)};
}

Verdict determinism() {
    ExperimentConfig c;
    c.checks = {"dk", "special-times", "flow-laws"};
    SuiteResult a = run_suite(c), b = run_suite(c);
    c.workers = 4;
    SuiteResult w = run_suite(c);
    bool same = a.csv == b.csv && a.summary_json == b.summary_json && a.csv == w.csv && a.summary_json == w.summary_json;
    return {same && !a.rows.empty(), std::to_string(a.rows.size()) + " rows, runs and worker counts 1/4 " +
                                         (same ? "byte-identical" : "differ")};
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> expect_fail;
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if ((a == "--expect-fail" || a == "--only") && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            std::string tok;
            while (std::getline(ss, tok, ',')) (a == "--only" ? only : expect_fail).insert(std::stoi(tok));
        } else {
            std::fprintf(stderr, "usage: %s [--expect-fail i,j] [--only i,j]\n", argv[0]);
            return 2;
        }
    }
    struct Criterion {
        int id;
        const char* name;
        double limit_s;
        std::function<Verdict()> run;
    };
    const Criterion all[] = {
        {1, "continued fraction bounds", 1, cf_bounds},
        {2, "Ostrowski round trip", 5, ostrowski_round_trip},
        {3, "Denjoy-Koksma", 30, denjoy_koksma},
        {4, "orbit spacing", 60, spacing},
        {5, "oracle equivalence", 120, oracle_equivalence},
        {6, "growth law", 300, growth_law},
        {7, "calibrate-freeze", 600, calibrate},
        {8, "flow laws", 10, flow_laws},
        {9, "almost linear reparametrizations", 10, almost_linear},
        {10, "combinatorial search", 30, combinatorial},
        {11, "SL(2,R) identities", 1, sl2_identities},
        {12, "Mobius statistics", 300, mobius},
        {13, "forward/backward disjunction", 120, forward_backward},
        {14, "determinism", 600, determinism},
    };
    int unexpected = 0;
    for (const auto& c : all) {
        if (!only.empty() && !only.count(c.id)) continue;
        auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("error: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool in_time = secs <= c.limit_s;
        bool pass = v.pass && in_time;
        std::printf("%s %2d %s: %s; %.2f s (limit %.0f s)%s\n", pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str(), secs,
                    c.limit_s, expect_fail.count(c.id) && !pass ? " [expected]" : "");
        std::fflush(stdout);
        if (!pass && !expect_fail.count(c.id)) ++unexpected;
    }
    return unexpected == 0 ? 0 : 1;
}
