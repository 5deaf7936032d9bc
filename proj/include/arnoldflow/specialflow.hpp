#pragma once

#include <cstdint>
#include <optional>

#include "arnoldflow/birkhoff.hpp"
#include "arnoldflow/roof.hpp"

namespace arnoldflow {

// Roof for the flow: an Arnol'd roof or a positive constant.
class FlowRoof {
public:
    static FlowRoof from(const RoofSpec& f);
    static FlowRoof constant(double c);

    double eval(CirclePoint z) const;
    double integral() const;
    FlowRoof scaled(double c) const;
    // f^{(n)}(x), signed n
    double sum(CirclePoint x, std::int64_t n, const ContinuedFraction& cf) const;
    bool is_constant() const { return !spec_; }

private:
    std::optional<RoofSpec> spec_;
    double c_ = 1;
};

struct FlowPoint {
    CirclePoint z;
    double r = 0;
};

struct HitCount {
    std::int64_t n = 0;
    double below = 0;  // f^{(n)}(x)
    bool ambiguous = false;  // t + s within 1e-12 max(1, |t + s|) of f^{(n)} or f^{(n+1)}
};

// n with f^{(n)}(x) <= t + s < f^{(n+1)}(x): estimate from the mean, then step.
HitCount hit_count(const FlowRoof& f, CirclePoint x, double s, double t, const ContinuedFraction& cf);
// Oracle: step one return at a time from n = 0.
HitCount hit_count_stepping(const FlowRoof& f, CirclePoint x, double s, double t, const ContinuedFraction& cf);

FlowPoint evolve(const FlowRoof& f, FlowPoint p, double t, const ContinuedFraction& cf);

// Sub-reports "rescaling" ((x,s) -> (x, c s) intertwines time t/c under f with
// time t under c f) and "constant-time-change" (same identity for f = 1).
LemmaReport verify_rescaling(const FlowRoof& f, double c, FlowPoint p, double t, const ContinuedFraction& cf);

struct HitLinearityOptions {
    double C = 1;
    double t_min = 100;
    int samples = 40;  // geometric grid on [t_min, t_max], both signs
};

// |n(x,s,t) int f - t| < C |t|^{1/3} on the grid; inputs record E'-membership of x
// at the scale q_n <= t_max < q_{n+1}.
LemmaReport verify_hit_linearity(const FlowRoof& f, FlowPoint p, double t_max, const ContinuedFraction& cf,
                                 const HitLinearityOptions& opt = {});

}  // namespace arnoldflow
