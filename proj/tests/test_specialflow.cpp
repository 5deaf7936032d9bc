#include <doctest.h>

#include <cmath>
#include <numbers>

#include "arnoldflow/errors.hpp"
#include "arnoldflow/numeric.hpp"
#include "arnoldflow/specialflow.hpp"

using namespace arnoldflow;

namespace {

CirclePoint random_point(Rng& rng) {
    u128 hi = rng();
    return CirclePoint{(hi << 64) | rng()};
}

const ContinuedFraction& golden() {
    static const ContinuedFraction cf = cf_expand(AlphaSource::golden(), 60);
    return cf;
}

const ContinuedFraction& constructed() {
    static const ContinuedFraction cf = construct_alpha_in_D(3, 40).cf;
    return cf;
}

FlowPoint random_flow_point(const FlowRoof& f, Rng& rng) {
    CirclePoint z = random_point(rng);
    return {z, uniform01(rng) * f.eval(z)};
}

}  // namespace

TEST_CASE("constant roof examples") {
    FlowRoof one = FlowRoof::constant(1);
    CirclePoint x = CirclePoint::from_double(0.2);
    CHECK(hit_count(one, x, 0, 7.3, golden()).n == 7);
    CHECK(hit_count(one, x, 0, 0, golden()).n == 0);
    CHECK(hit_count(one, x, 0, -0.5, golden()).n == -1);
    FlowPoint p = evolve(one, {x, 0}, 2.5, golden());
    CHECK(p.z == golden().shift(x, 2));
    CHECK(p.r == doctest::Approx(0.5));
    FlowPoint same = evolve(one, {x, 0.25}, 0, golden());
    CHECK(same.z == x);
    CHECK(same.r == 0.25);
}

TEST_CASE("hit counts from the estimate match stepping") {
    FlowRoof f = FlowRoof::from(canonical_roof());
    Rng rng = instance_rng(41, 0);
    for (int rep = 0; rep < 100; ++rep) {
        FlowPoint p = random_flow_point(f, rng);
        double t = (rep % 5 == 0 ? -1 : 1) * 1e5 * uniform01(rng);
        HitCount a = hit_count(f, p.z, p.r, t, constructed());
        HitCount b = hit_count_stepping(f, p.z, p.r, t, constructed());
        CHECK(a.n == b.n);
        // sandwich holds against a fresh Birkhoff sum
        double lo = f.sum(p.z, a.n, constructed()), hi = f.sum(p.z, a.n + 1, constructed());
        double tol = 1e-9 * std::max(1.0, std::fabs(t));
        CHECK(lo <= t + p.r + tol);
        CHECK(t + p.r < hi + tol);
    }
}

TEST_CASE("boundary ties are flagged") {
    FlowRoof one = FlowRoof::constant(1);
    CirclePoint x = CirclePoint::from_double(0.2);
    HitCount h = hit_count(one, x, 0, 3, golden());
    CHECK(h.n == 3);
    CHECK(h.ambiguous);
    CHECK_FALSE(hit_count(one, x, 0, 3.5, golden()).ambiguous);
}

TEST_CASE("evolve keeps points in the region and is a flow") {
    FlowRoof f = FlowRoof::from(canonical_roof());
    Rng rng = instance_rng(42, 0);
    for (int rep = 0; rep < 100; ++rep) {
        FlowPoint p = random_flow_point(f, rng);
        double t1 = 2000 * uniform01(rng) - 1000, t2 = 2000 * uniform01(rng) - 1000;
        FlowPoint a = evolve(f, evolve(f, p, t1, golden()), t2, golden());
        FlowPoint b = evolve(f, p, t1 + t2, golden());
        CHECK(a.r >= 0);
        CHECK(a.r < f.eval(a.z));
        CHECK((a.z - b.z).dist() + std::fabs(a.r - b.r) < 1e-8);
    }
}

TEST_CASE("rescaling conjugacy") {
    FlowRoof one = FlowRoof::constant(1);
    CirclePoint x = CirclePoint::from_double(0.2);
    FlowPoint a = evolve(one, {x, 0}, 1.5, golden());
    FlowPoint b = evolve(one.scaled(2), {x, 0}, 3, golden());
    CHECK(a.z == golden().shift(x, 1));
    CHECK(b.z == a.z);
    CHECK(b.r == doctest::Approx(1.0));
    CHECK(verify_rescaling(one, 1, {x, 0.3}, 5.5, golden()).sub[0].measured == 0.0);

    FlowRoof f = FlowRoof::from(canonical_roof());
    Rng rng = instance_rng(43, 0);
    for (double c : {0.5, std::numbers::pi / 3, 2.0})
        for (int rep = 0; rep < 34; ++rep) {
            FlowPoint p = random_flow_point(f, rng);
            LemmaReport r = verify_rescaling(f, c, p, 1000 * uniform01(rng), constructed());
            CHECK(r.all_pass());
        }
}

TEST_CASE("hit counts grow linearly") {
    FlowRoof one = FlowRoof::constant(1);
    LemmaReport triv = verify_hit_linearity(one, {CirclePoint::from_double(0.3), 0.1}, 1e4, golden());
    CHECK(triv.measured < 1);
    CHECK(triv.pass);

    FlowRoof f = FlowRoof::from(canonical_roof().normalized());
    Rng rng = instance_rng(44, 0);
    int pass = 0;
    for (int rep = 0; rep < 10; ++rep) {
        FlowPoint p = random_flow_point(f, rng);
        LemmaReport r = verify_hit_linearity(f, p, 1e5, constructed(), {2.0, 100, 20});
        pass += r.pass;
    }
    CHECK(pass == 10);
    CHECK_THROWS_AS(verify_hit_linearity(f, {CirclePoint::from_double(0.3), 0.1}, 10, constructed()), Error);
}
