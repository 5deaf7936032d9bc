#include "arnoldflow/specialflow.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "arnoldflow/errors.hpp"
#include "arnoldflow/numeric.hpp"

namespace arnoldflow {

FlowRoof FlowRoof::from(const RoofSpec& f) {
    FlowRoof r;
    r.spec_ = f;
    return r;
}

FlowRoof FlowRoof::constant(double c) {
    if (!(c > 0) || !std::isfinite(c)) fail(ErrorKind::InvalidArgument, "constant roof must be positive");
    FlowRoof r;
    r.c_ = c;
    return r;
}

double FlowRoof::eval(CirclePoint z) const {
    if (!spec_) return c_;
    if (z.dist() < kSingularGuard) fail(ErrorKind::SingularOrbit, "orbit point within 1e-15 of 0");
    return spec_->eval(z);
}

double FlowRoof::integral() const { return spec_ ? spec_->integral() : c_; }

FlowRoof FlowRoof::scaled(double c) const { return spec_ ? from(spec_->scaled(c)) : constant(c_ * c); }

double FlowRoof::sum(CirclePoint x, std::int64_t n, const ContinuedFraction& cf) const {
    if (spec_) return birkhoff_sum(*spec_, x, n, 0, cf);
    return c_ * static_cast<double>(n);
}

namespace {

double tolerance(double tau) { return 1e-12 * std::max(1.0, std::fabs(tau)); }

// Moves n until below <= tau < below + f(x + n alpha), using direct terms.
HitCount settle(const FlowRoof& f, CirclePoint x, double tau, std::int64_t n, double below,
                const ContinuedFraction& cf) {
    std::uint64_t steps = 0;
    for (;;) {
        if (++steps > kSumBudget) fail(ErrorKind::BudgetExceeded, "hit count correction exceeds budget");
        if (below > tau) {
            --n;
            below -= f.eval(cf.shift(x, n));
            continue;
        }
        double next = f.eval(cf.shift(x, n));
        if (tau - below >= next) {
            below += next;
            ++n;
            continue;
        }
        HitCount h;
        h.n = n;
        h.below = below;
        double tol = tolerance(tau);
        h.ambiguous = tau - below <= tol || below + next - tau <= tol;
        return h;
    }
}

}  // namespace

HitCount hit_count(const FlowRoof& f, CirclePoint x, double s, double t, const ContinuedFraction& cf) {
    double tau = t + s;
    if (!std::isfinite(tau)) fail(ErrorKind::InvalidArgument, "time must be finite");
    double est = std::floor(tau / f.integral());
    if (std::fabs(est) > static_cast<double>(kSumBudget)) fail(ErrorKind::BudgetExceeded, "time exceeds budget");
    auto n0 = static_cast<std::int64_t>(est);
    return settle(f, x, tau, n0, f.sum(x, n0, cf), cf);
}

HitCount hit_count_stepping(const FlowRoof& f, CirclePoint x, double s, double t, const ContinuedFraction& cf) {
    double tau = t + s;
    if (!std::isfinite(tau)) fail(ErrorKind::InvalidArgument, "time must be finite");
    return settle(f, x, tau, 0, 0.0, cf);
}

FlowPoint evolve(const FlowRoof& f, FlowPoint p, double t, const ContinuedFraction& cf) {
    if (!(p.r >= 0) || !(p.r < f.eval(p.z))) fail(ErrorKind::InvalidArgument, "flow point outside the region");
    HitCount h = hit_count(f, p.z, p.r, t, cf);
    return {cf.shift(p.z, h.n), (t + p.r) - h.below};
}

LemmaReport verify_rescaling(const FlowRoof& f, double c, FlowPoint p, double t, const ContinuedFraction& cf) {
    if (!(c > 0)) fail(ErrorKind::InvalidArgument, "rescaling factor must be positive");
    auto residual = [&](const FlowRoof& g, FlowPoint q) {
        FlowPoint a = evolve(g, q, t / c, cf);
        a.r *= c;
        FlowPoint b = evolve(g.scaled(c), {q.z, c * q.r}, t, cf);
        return (a.z - b.z).dist() + std::fabs(a.r - b.r);
    };
    LemmaReport top;
    top.lemma_id = "flow-rescaling";
    top.inputs = {{"c", c}, {"t", t}, {"r", p.r}, {"x", p.z.value()}};
    // the unit roof starts from the same relative height
    FlowPoint unit{p.z, p.r / f.eval(p.z)};
    for (auto [id, g, q] : {std::tuple{"rescaling", f, p}, std::tuple{"constant-time-change", FlowRoof::constant(1), unit}}) {
        LemmaReport s;
        s.lemma_id = id;
        s.measured = residual(g, q);
        s.bound = 1e-8;
        s.margin = s.bound - s.measured;
        s.pass = s.measured < s.bound;
        top.sub.push_back(s);
    }
    top.pass = top.all_pass();
    return top;
}

LemmaReport verify_hit_linearity(const FlowRoof& f, FlowPoint p, double t_max, const ContinuedFraction& cf,
                                 const HitLinearityOptions& opt) {
    if (!(t_max >= opt.t_min)) fail(ErrorKind::HypothesisFailed, "t_max below the threshold t_min");
    LemmaReport r;
    r.lemma_id = "hit-linearity";
    r.constant = opt.C;
    double I = f.integral();
    double worst_ratio = -1, worst_t = 0;
    int amb = 0;
    for (int sign : {1, -1})
        for (int i = 0; i < opt.samples; ++i) {
            double t = sign * opt.t_min * std::pow(t_max / opt.t_min, opt.samples > 1 ? i / (opt.samples - 1.0) : 1.0);
            HitCount h = hit_count(f, p.z, p.r, t, cf);
            amb += h.ambiguous;
            double dev = std::fabs(static_cast<double>(h.n) * I - t);
            double shape = std::cbrt(std::fabs(t));
            if (dev / shape > worst_ratio) {
                worst_ratio = dev / shape;
                worst_t = t;
                r.measured = dev;
                r.shape = shape;
            }
        }
    r.bound = opt.C * r.shape;
    r.margin = r.bound - r.measured;
    r.pass = r.measured < r.bound;
    int n = 0;
    while (n + 1 <= cf.max_machine_index() && cf.q_double(n + 1) <= t_max) ++n;
    GoodSetResult g = good_set_membership(p.z, GoodSetKind::EPrime, n, cf);
    r.inputs = {{"t_min", opt.t_min}, {"t_max", t_max}, {"worst_t", worst_t}, {"scale", n},
                {"e_prime_member", g.member ? 1.0 : 0.0}, {"ambiguous", amb}};
    return r;
}

}  // namespace arnoldflow
