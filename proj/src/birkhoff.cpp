#include "arnoldflow/birkhoff.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "arnoldflow/errors.hpp"
#include "arnoldflow/numeric.hpp"

namespace arnoldflow {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

// Inlined copy of RoofSpec::eval_split for the summation loops.
struct Kernel {
    double am, ap, c0;
    int order;
    double fact;  // (order-1)!
    double sgn;   // (-1)^order
    struct Harmonic {
        double w, c, d, scale;
    };
    std::vector<Harmonic> harmonics;

    Kernel(const RoofSpec& f, int ord) : am(f.A_minus()), ap(f.A_plus()), c0(f.c0()), order(ord) {
        if (ord < 0 || ord > 4) fail(ErrorKind::InvalidArgument, "derivative order must be 0..4");
        static const double facts[] = {1, 1, 1, 2, 6};
        fact = facts[ord];
        sgn = ord % 2 == 0 ? 1.0 : -1.0;
        std::size_t K = std::max(f.cos_coeffs().size(), f.sin_coeffs().size());
        for (std::size_t k = 1; k <= K; ++k) {
            double c = k <= f.cos_coeffs().size() ? f.cos_coeffs()[k - 1] : 0.0;
            double d = k <= f.sin_coeffs().size() ? f.sin_coeffs()[k - 1] : 0.0;
            if (c == 0 && d == 0) continue;
            double w = kTwoPi * static_cast<double>(k);
            harmonics.push_back({w, c, d, std::pow(w, ord)});
        }
    }

    double operator()(u128 t) const {
        double u = turns_to_double(t);
        double v = turns_to_double(static_cast<u128>(-t));
        if (std::min(u, v) < kSingularGuard) fail(ErrorKind::SingularOrbit, "orbit point within 1e-15 of 0");
        double r;
        switch (order) {
            case 0:
                r = -am * std::log(u) - ap * std::log(v) + c0;
                break;
            case 1:
                r = -am / u + ap / v;
                break;
            case 2:
                r = am / (u * u) + ap / (v * v);
                break;
            case 3: {
                double u3 = u * u * u, v3 = v * v * v;
                r = 2 * (-am / u3 + ap / v3);
                break;
            }
            default: {
                double u2 = u * u, v2 = v * v;
                r = 6 * (am / (u2 * u2) + ap / (v2 * v2));
                break;
            }
        }
        for (const auto& h : harmonics) {
            double ct = std::cos(h.w * u), st = std::sin(h.w * u);
            // d^k/dx^k of c cos + d sin
            double a, b;
            switch (order % 4) {
                case 0: a = h.c * ct + h.d * st; break;
                case 1: a = -h.c * st + h.d * ct; break;
                case 2: a = -h.c * ct - h.d * st; break;
                default: a = h.c * st - h.d * ct; break;
            }
            b = h.scale * a;
            r += b;
        }
        return r;
    }
};

void check_budget(std::uint64_t n) {
    if (n > kSumBudget) fail(ErrorKind::BudgetExceeded, "Birkhoff sum length exceeds 1e8");
}

template <class F>
double sum_naive(const F& term, u128 start, u128 step, std::uint64_t n) {
    CompensatedSum acc;
    u128 t = start;
    for (std::uint64_t j = 0; j < n; ++j, t += step) acc.add(term(t));
    return acc.value();
}

// Same terms as sum_naive, grouped into greedy blocks of lengths q_j.
template <class F>
double sum_blocked(const F& term, u128 start, u128 step, std::uint64_t n, const ContinuedFraction& cf) {
    CompensatedSum total;
    u128 t = start;
    int j = cf.max_machine_index();
    std::uint64_t left = n;
    while (left > 0) {
        while (j > 0 && cf.qn(j) > left) --j;
        std::uint64_t len = cf.qn(j);
        double block = sum_naive(term, t, step, len);
        total.add(block);
        t += static_cast<u128>(len) * step;
        left -= len;
    }
    return total.value();
}

template <class F>
double signed_sum(const F& term, CirclePoint x, std::int64_t n, const ContinuedFraction& cf, SumMethod method) {
    if (n == 0) return 0.0;
    std::uint64_t m = n > 0 ? static_cast<std::uint64_t>(n) : static_cast<std::uint64_t>(-(n + 1)) + 1;
    check_budget(m);
    CirclePoint start = n > 0 ? x : cf.shift(x, n);
    double s = method == SumMethod::NaiveCompensated ? sum_naive(term, start.turns, cf.alpha.turns, m)
                                                     : sum_blocked(term, start.turns, cf.alpha.turns, m, cf);
    return n > 0 ? s : -s;
}

double logq(double q) { return std::log(q); }

LemmaReport make_upper(std::string id, double measured, double shape, double C) {
    LemmaReport r;
    r.lemma_id = std::move(id);
    r.measured = measured;
    r.shape = shape;
    r.constant = C;
    r.bound = C * shape;
    r.margin = r.bound - measured;
    r.pass = measured <= r.bound;
    return r;
}

LemmaReport not_applicable(std::string id, std::string why) {
    LemmaReport r;
    r.lemma_id = std::move(id);
    r.applicable = false;
    r.pass = true;
    r.note = std::move(why);
    return r;
}

}  // namespace

bool LemmaReport::all_pass() const {
    if (applicable && !pass) return false;
    for (const auto& s : sub)
        if (!s.all_pass()) return false;
    return true;
}

double birkhoff_sum(const RoofSpec& f, CirclePoint x, std::int64_t n, int order, const ContinuedFraction& cf,
                    SumMethod method) {
    Kernel k(f, order);
    return signed_sum(k, x, n, cf, method);
}

double birkhoff_sum_bv(const BVFunction& g, CirclePoint x, std::int64_t n, const ContinuedFraction& cf) {
    auto term = [&](u128 t) { return g.eval(CirclePoint{t}); };
    return signed_sum(term, x, n, cf, SumMethod::NaiveCompensated);
}

std::vector<double> prefix_sums(const RoofSpec& f, CirclePoint x, std::uint64_t n, int order,
                                const ContinuedFraction& cf) {
    check_budget(n);
    Kernel k(f, order);
    std::vector<double> out(n + 1);
    CompensatedSum acc;
    u128 t = x.turns;
    out[0] = 0.0;
    for (std::uint64_t j = 0; j < n; ++j, t += cf.alpha.turns) {
        acc.add(k(t));
        out[j + 1] = acc.value();
    }
    return out;
}

LemmaReport denjoy_koksma_check(const BVFunction& g, CirclePoint x, int n, const ContinuedFraction& cf) {
    double q = static_cast<double>(cf.qn(n));
    double S = birkhoff_sum_bv(g, x, static_cast<std::int64_t>(cf.qn(n)), cf);
    LemmaReport r = make_upper("denjoy-koksma", std::fabs(S - q * g.integral), 2.0, g.variation);
    r.inputs = {{"n", n}, {"q_n", q}, {"sum", S}, {"integral", g.integral}, {"variation", g.variation}};
    r.note = g.name;
    return r;
}

LemmaReport verify_special_times(const RoofSpec& f, CirclePoint x, int n, const ContinuedFraction& cf,
                                 const SpecialTimeConstants& c) {
    std::uint64_t qn = cf.qn(n);
    double q = static_cast<double>(qn);
    ClosestReturn cr = closest_return(x, n, cf);
    double B = cr.B;
    if (!(B > 0)) fail(ErrorKind::SingularOrbit, "orbit hits the singularity");
    CirclePoint xi = cf.shift(x, static_cast<std::int64_t>(cr.i));

    LemmaReport top;
    top.lemma_id = "special-times";
    top.inputs = {{"n", n}, {"q_n", q}, {"B", B}, {"i", static_cast<double>(cr.i)}};
    for (int order = 0; order <= 4; ++order) {
        double S = birkhoff_sum(f, x, static_cast<std::int64_t>(qn), order, cf);
        double dev, shape;
        if (order == 0) {
            dev = std::fabs(S - q * f.integral());
            shape = logq(q) + std::fabs(std::log(B));
        } else if (order == 1) {
            dev = std::fabs(S - shear_rate(f) * q * logq(q));
            shape = q * (1 + 1 / B);
        } else {
            dev = std::fabs(S - f.eval(xi, order));
            shape = std::pow(q, order);
        }
        LemmaReport r = make_upper("special-times." + std::to_string(order), dev, shape, c.C[order]);
        r.inputs = {{"sum", S}};
        top.sub.push_back(std::move(r));
    }
    top.pass = top.all_pass();
    return top;
}

LemmaReport verify_f_bound(const RoofSpec& f, CirclePoint x, std::uint64_t T, const ContinuedFraction& cf, double C,
                           SampleMode mode) {
    if (T < 2) fail(ErrorKind::InvalidArgument, "T must be at least 2");
    double Td = static_cast<double>(T);
    double w = 1.0 / (2 * Td * std::pow(std::log(Td), 4));
    RangeMin rm = range_min(x, 0, T + 1, cf);
    HitTest ht = window_hit(rm.dist_turns, Window::of(w));
    if (ht.hit) {
        LemmaReport r = not_applicable("f-bound", "orbit enters the 1/(2T log^4 T) window");
        r.inputs = {{"T", Td}, {"closest_index", static_cast<double>(rm.index)}};
        return r;
    }
    std::vector<double> S = prefix_sums(f, x, T, 0, cf);
    double I = f.integral();
    double worst = 0;
    std::uint64_t worst_m = 0;
    auto visit = [&](std::uint64_t m) {
        double d = std::fabs(S[m] - I * static_cast<double>(m));
        if (d > worst) worst = d, worst_m = m;
    };
    if (mode == SampleMode::Exhaustive) {
        for (std::uint64_t m = 0; m <= T; ++m) visit(m);
    } else {
        for (int j = 0; j <= cf.max_machine_index() && cf.qn(j) <= T; ++j) visit(cf.qn(j));
        for (int s = 0; s < 200; ++s) {
            double m = std::pow(Td, s / 199.0);
            visit(std::min<std::uint64_t>(T, static_cast<std::uint64_t>(std::llround(m))));
        }
    }
    LemmaReport r = make_upper("f-bound", worst, std::pow(Td, 0.2), C);
    r.inputs = {{"T", Td}, {"worst_m", static_cast<double>(worst_m)}, {"window", w}};
    r.note = ht.near_boundary ? "near window boundary" : "";
    return r;
}

LemmaReport verify_fprime_far(const RoofSpec& f, CirclePoint x, std::uint64_t r, int n, double M, double eps,
                              const ContinuedFraction& cf) {
    double q = cf.q_double(n), q1 = cf.q_double(n + 1), rd = static_cast<double>(r);
    Membership mem = sigma_membership(x, n, M, cf);
    if (mem.member) fail(ErrorKind::HypothesisFailed, "x lies in Sigma_n(M)");
    double e2 = eps * eps, e4 = e2 * e2;
    if (rd > M * q1) fail(ErrorKind::HypothesisFailed, "r exceeds M q_{n+1}");
    double S = birkhoff_sum(f, x, static_cast<std::int64_t>(r), 1, cf);
    LemmaReport rep;
    if (rd >= e4 * q) {
        double main = shear_rate(f) * rd * std::log(rd);
        rep = make_upper("fprime-far", std::fabs(S - main), rd * std::log(rd), e2);
        rep.inputs = {{"sum", S}, {"main", main}};
    } else {
        rep = make_upper("fprime-far.small", std::fabs(S), q * std::log(q), e2);
        rep.inputs = {{"sum", S}};
    }
    rep.inputs.insert(rep.inputs.begin(), {{"r", rd}, {"n", n}, {"eps", eps}, {"M", M}});
    rep.note = mem.near_boundary ? "near Sigma boundary" : "";
    return rep;
}

LemmaReport verify_fprime_goodscale(const RoofSpec& f, CirclePoint x, std::uint64_t T, std::uint64_t r,
                                    std::uint64_t s, int n, double eps, const ContinuedFraction& cf, double C,
                                    const GoodScaleOptions& opt) {
    double q = cf.q_double(n), q1 = cf.q_double(n + 1);
    double Td = static_cast<double>(T), rd = static_cast<double>(r), sd = static_cast<double>(s);
    ClosestReturn cr = closest_return(x, n, cf);
    double B = cr.B;
    std::vector<std::pair<std::string, double>> in = {{"n", n}, {"T", Td}, {"r", rd}, {"s", sd}, {"B", B}};
    if (!(q * std::log(q) <= Td && Td < q1)) {
        auto rep = not_applicable("fprime-goodscale", "T outside [q_n log q_n, q_{n+1})");
        rep.inputs = in;
        return rep;
    }
    if (!(rd < B * Td / 2) || std::fabs(rd - sd) > eps * eps * eps * B * Td) {
        auto rep = not_applicable("fprime-goodscale", "r >= B T/2 or |r - s| > eps^3 B T");
        rep.inputs = in;
        return rep;
    }
    Membership mem = sigma_membership(x, n, opt.M, cf);
    if (mem.member && opt.strict_sigma) fail(ErrorKind::HypothesisFailed, "x lies in Sigma_n(M)");
    in.push_back({"sigma_member", mem.member ? 1.0 : 0.0});

    double Sr = birkhoff_sum(f, x, static_cast<std::int64_t>(r), 1, cf);
    double Ss = birkhoff_sum(f, x, static_cast<std::int64_t>(s), 1, cf);
    double rate = shear_rate(f), lq = std::log(q);
    LemmaReport top = make_upper("fprime-goodscale", std::fabs(Sr - rate * rd * lq), Td, C);
    top.inputs = in;
    top.note = mem.member ? "x in Sigma_n(M); estimate taken under the B_{n,x} condition" : "";
    LemmaReport shortr =
        make_upper("fprime-goodscale.short", std::fabs(Sr - Ss - rate * (rd - sd) * lq), Td, eps * eps);
    top.sub.push_back(std::move(shortr));
    return top;
}

ResonantReport resonant_decomposition(const RoofSpec& f, CirclePoint x, std::uint64_t r, const ContinuedFraction& cf,
                                      double delta, Method method) {
    if (r < 1) fail(ErrorKind::InvalidArgument, "r must be positive");
    ResonantReport rr;
    rr.r = r;
    rr.delta = delta;
    int j = 0;
    while (j + 1 <= cf.max_machine_index() && cf.qn(j + 1) <= r) ++j;
    if (j + 1 > cf.depth()) fail(ErrorKind::DepthExceeded, "q_{j_r+1} beyond depth");
    rr.j_r = j;
    double rd = static_cast<double>(r), qj = cf.q_double(j), qj1 = cf.q_double(j + 1);
    rr.sum = birkhoff_sum(f, x, static_cast<std::int64_t>(r), 1, cf);
    rr.main_term = shear_rate(f) * rd * std::log(qj);
    rr.measured_residual = std::fabs(rr.sum - rr.main_term);
    RangeMin rm = range_min(x, 0, r, cf, method);
    rr.max_inv_dist = 1.0 / rm.dist();
    rr.res_bound_1 = (rd / qj) * rr.max_inv_dist;
    rr.res_bound_2 = rr.max_inv_dist + 2 * qj1 * std::log(rd / qj);
    rr.res_choice = rr.res_bound_1 <= rr.res_bound_2 ? 1 : 2;
    rr.res = std::min(rr.res_bound_1, rr.res_bound_2);
    double dq = delta * qj * std::log(std::max(qj, 1.0));
    rr.shape = rd + dq + rr.res;
    rr.error_budget_terms = {{"r", rd}, {"delta q log q", dq}, {"Res", rr.res}};
    return rr;
}

LemmaReport resonant_report(const ResonantReport& rr, double C) {
    LemmaReport r = make_upper("resonant", rr.measured_residual, rr.shape, C);
    r.inputs = {{"r", static_cast<double>(rr.r)}, {"j_r", rr.j_r}, {"sum", rr.sum},
                {"main", rr.main_term}, {"Res", rr.res}, {"res_choice", rr.res_choice}};
    return r;
}

LemmaReport verify_higher_derivatives(const RoofSpec& f, CirclePoint x, int n, std::uint64_t k, std::uint64_t w,
                                      double eps, const ContinuedFraction& cf, const HigherDerivativeConstants& c,
                                      int n0) {
    std::uint64_t qn = cf.qn(n);
    double q = static_cast<double>(qn), q1 = cf.q_double(n + 1), kd = static_cast<double>(k);
    ClosestReturn cr = closest_return(x, n, cf);
    double B = cr.B;
    if (!(B > 0)) fail(ErrorKind::SingularOrbit, "orbit hits the singularity");
    CirclePoint xi = cf.shift(x, static_cast<std::int64_t>(cr.i));

    LemmaReport top;
    top.lemma_id = "higher-derivatives";
    top.inputs = {{"n", n}, {"q_n", q}, {"B", B}, {"k", kd}, {"w", static_cast<double>(w)}, {"eps", eps}};

    bool ok67 = B >= std::pow(eps, 0.2) && k >= 1 && kd <= std::pow(B, 5) * q1 / (6 * q);
    bool ok68 = B < c.c68_threshold && k >= 1 && kd <= B * q1 / (6 * q);
    for (int j = 2; j <= 4; ++j) {
        std::string tag = std::to_string(j);
        double fj = f.eval(xi, j);
        double S = (ok67 || ok68) ? birkhoff_sum(f, x, static_cast<std::int64_t>(k * qn), j, cf) : 0.0;
        if (ok67) {
            auto r = make_upper("near-return." + tag, std::fabs(S - kd * fj), kd * std::pow(q, j), c.C67[j - 2]);
            r.inputs = {{"sum", S}, {"term", fj}};
            top.sub.push_back(std::move(r));
        } else {
            top.sub.push_back(not_applicable("near-return." + tag, "needs B >= eps^{1/5}, k <= B^5 q_{n+1}/(6 q_n)"));
        }
        if (ok68) {
            auto up = make_upper("close-return." + tag, std::fabs(S), kd * std::fabs(fj), c.C68_upper[j - 2]);
            up.inputs = {{"sum", S}, {"term", fj}};
            LemmaReport lo;
            lo.lemma_id = "close-return." + tag + ".lower";
            lo.measured = std::fabs(S);
            lo.shape = kd * std::fabs(fj);
            lo.constant = c.c68_lower[j - 2];
            lo.bound = lo.constant * lo.shape;
            lo.margin = lo.measured - lo.bound;
            lo.pass = lo.measured >= lo.bound;
            top.sub.push_back(std::move(up));
            top.sub.push_back(std::move(lo));
        } else {
            top.sub.push_back(not_applicable("close-return." + tag, "needs B < c, k <= B q_{n+1}/(6 q_n)"));
        }
    }
    if (w > 0) {
        double wd = static_cast<double>(w);
        if (n0 >= 0 && w >= cf.qn(n0) && wd <= B * q1 / 4 - q) {
            double S = birkhoff_sum(f, x, static_cast<std::int64_t>(w), 2, cf);
            auto r = make_upper("second-derivative-run", std::fabs(S), (wd / q) * f.eval(xi, 2), c.D69);
            r.inputs = {{"sum", S}};
            top.sub.push_back(std::move(r));
        } else {
            top.sub.push_back(not_applicable("second-derivative-run", "needs q_{n0} <= w <= B q_{n+1}/4 - q_n"));
        }
    }
    top.pass = top.all_pass();
    return top;
}

}  // namespace arnoldflow
