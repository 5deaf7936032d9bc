#include "arnoldflow/roof.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <json.hpp>

#include "arnoldflow/errors.hpp"

namespace arnoldflow {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

double factorial(int k) {
    double r = 1;
    for (int i = 2; i <= k; ++i) r *= i;
    return r;
}

// cos(t + j pi/2) and sin(t + j pi/2) without rounding the phase
double cos_shift(double c, double s, int j) {
    switch (((j % 4) + 4) % 4) {
    case 0: return c;
    case 1: return -s;
    case 2: return -c;
    default: return s;
    }
}

double sin_shift(double c, double s, int j) {
    switch (((j % 4) + 4) % 4) {
    case 0: return s;
    case 1: return c;
    case 2: return -s;
    default: return -c;
    }
}

}  // namespace

RoofSpec::RoofSpec(double a_minus, double a_plus, double c0, std::vector<double> cos_coeffs,
                   std::vector<double> sin_coeffs)
    : a_minus_(a_minus), a_plus_(a_plus), c0_(c0), cos_(std::move(cos_coeffs)), sin_(std::move(sin_coeffs)) {
    if (!(a_minus_ > 0) || !(a_plus_ > 0)) fail(ErrorKind::InvalidArgument, "A_minus and A_plus must be positive");
    if (a_minus_ == a_plus_) fail(ErrorKind::InvalidArgument, "A_minus must differ from A_plus");
    for (double v : cos_)
        if (!std::isfinite(v)) fail(ErrorKind::InvalidArgument, "non-finite coefficient");
    for (double v : sin_)
        if (!std::isfinite(v)) fail(ErrorKind::InvalidArgument, "non-finite coefficient");
    if (!std::isfinite(c0_)) fail(ErrorKind::InvalidArgument, "non-finite coefficient");
    certify_positive();
}

double RoofSpec::smooth(double x, int order) const {
    double v = order == 0 ? c0_ : 0.0;
    std::size_t K = std::max(cos_.size(), sin_.size());
    for (std::size_t k = 1; k <= K; ++k) {
        double c = k <= cos_.size() ? cos_[k - 1] : 0.0;
        double d = k <= sin_.size() ? sin_[k - 1] : 0.0;
        if (c == 0 && d == 0) continue;
        double w = kTwoPi * static_cast<double>(k);
        double t = w * x;
        double ct = std::cos(t), st = std::sin(t);
        double scale = std::pow(w, order);
        v += scale * (c * cos_shift(ct, st, order) + d * sin_shift(ct, st, order));
    }
    return v;
}

double RoofSpec::eval_split(double u, double v, int order) const {
    if (order < 0 || order > 4) fail(ErrorKind::InvalidArgument, "derivative order must be 0..4");
    if (!(u > 0) || !(v > 0)) fail(ErrorKind::SingularPoint, "roof evaluated at the singularity");
    double logs;
    if (order == 0) {
        logs = -a_minus_ * std::log(u) - a_plus_ * std::log(v);
    } else {
        double fk = factorial(order - 1);
        double sgn = (order % 2 == 0) ? 1.0 : -1.0;
        logs = a_minus_ * sgn * fk * std::pow(u, -order) + a_plus_ * fk * std::pow(v, -order);
    }
    return logs + smooth(u, order);
}

double RoofSpec::eval(CirclePoint x, int order) const {
    if (x.turns == 0) fail(ErrorKind::SingularPoint, "roof evaluated at the singularity");
    return eval_split(x.value(), x.complement(), order);
}

double RoofSpec::eval(double x, int order) const {
    if (!(x > 0 && x < 1)) fail(ErrorKind::SingularPoint, "roof evaluated outside (0,1)");
    return eval_split(x, 1.0 - x, order);
}

RoofSpec RoofSpec::scaled(double c) const {
    if (!(c > 0)) fail(ErrorKind::NonPositiveAfterNormalize, "scale factor must be positive");
    std::vector<double> cc = cos_, ss = sin_;
    for (auto& v : cc) v *= c;
    for (auto& v : ss) v *= c;
    return RoofSpec(a_minus_ * c, a_plus_ * c, c0_ * c, cc, ss);
}

RoofSpec RoofSpec::normalized() const {
    double I = integral();
    if (!(I > 0)) fail(ErrorKind::NonPositiveAfterNormalize, "roof integral is not positive");
    try {
        return scaled(1.0 / I);
    } catch (const Error& e) {
        fail(ErrorKind::NonPositiveAfterNormalize, e.what());
    }
}

double RoofSpec::smooth_min_bound() const {
    double b = c0_;
    for (double c : cos_) b -= std::fabs(c);
    for (double d : sin_) b -= std::fabs(d);
    return b;
}

double RoofSpec::smooth_lipschitz() const {
    double L = 0;
    for (std::size_t k = 1; k <= cos_.size(); ++k) L += kTwoPi * k * std::fabs(cos_[k - 1]);
    for (std::size_t k = 1; k <= sin_.size(); ++k) L += kTwoPi * k * std::fabs(sin_[k - 1]);
    return L;
}

void RoofSpec::certify_positive() const {
    // Lower bound on a cell [a,b]: the log parts are monotone, g moves by at most L (b-a)/2
    // from its midpoint value. Cells that do not certify are split.
    double L = smooth_lipschitz();
    double gmin = smooth_min_bound();
    auto lower = [&](double a, double b) {
        double lm = -a_minus_ * std::log(b);
        double lp = a > 0 ? -a_plus_ * std::log1p(-a) : 0.0;
        double g = std::max(gmin, smooth(0.5 * (a + b), 0) - 0.5 * L * (b - a));
        return lm + lp + g;
    };
    const int cells = 10000;
    std::vector<std::pair<double, double>> stack;
    for (int i = cells - 1; i >= 0; --i) {
        double a = static_cast<double>(i) / cells, b = static_cast<double>(i + 1) / cells;
        stack.emplace_back(a, b);
    }
    std::size_t work = 0;
    while (!stack.empty()) {
        auto [a, b] = stack.back();
        stack.pop_back();
        if (lower(a, b) > 0) continue;
        // the last cell touches 1 from the left: -log(1-x) is unbounded there,
        // so its lower bound uses the left endpoint only (already in lower()).
        if (b - a < 1e-12 || ++work > 2'000'000) {
            double mid = 0.5 * (a + b);
            fail(ErrorKind::InvalidArgument, "roof is not certified positive near x = " + std::to_string(mid));
        }
        double m = 0.5 * (a + b);
        stack.emplace_back(m, b);
        stack.emplace_back(a, m);
    }
}

std::string RoofSpec::to_json() const {
    nlohmann::json j;
    j["A_minus"] = a_minus_;
    j["A_plus"] = a_plus_;
    j["c0"] = c0_;
    j["cos_coeffs"] = cos_;
    j["sin_coeffs"] = sin_;
    return j.dump();
}

RoofSpec RoofSpec::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        fail(ErrorKind::ConfigInvalid, std::string("roof JSON: ") + e.what());
    }
    if (!j.is_object()) fail(ErrorKind::ConfigInvalid, "roof JSON must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        if (k != "A_minus" && k != "A_plus" && k != "c0" && k != "cos_coeffs" && k != "sin_coeffs")
            fail(ErrorKind::ConfigInvalid, "unknown roof key '" + k + "'");
    }
    try {
        double am = j.at("A_minus").get<double>();
        double ap = j.at("A_plus").get<double>();
        double c0 = j.value("c0", 0.0);
        auto cc = j.value("cos_coeffs", std::vector<double>{});
        auto ss = j.value("sin_coeffs", std::vector<double>{});
        return RoofSpec(am, ap, c0, cc, ss);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::ConfigInvalid, std::string("roof JSON: ") + e.what());
    }
}

RoofSpec canonical_roof() { return RoofSpec(0.6, 0.3, 0.1); }

TruncatedRoof::TruncatedRoof(RoofSpec base, double qn, int order)
    : base_(std::move(base)), qn_(qn), h_(1.0 / (4.0 * qn)), order_(order) {
    if (order < 0 || order > 4) fail(ErrorKind::InvalidArgument, "derivative order must be 0..4");
    if (!(qn >= 1)) fail(ErrorKind::InvalidArgument, "q_n must be >= 1");
    h_turns_ = CirclePoint::from_double(h_).turns;
}

double TruncatedRoof::eval(CirclePoint x) const {
    if (x.dist_turns() <= h_turns_) return 0.0;
    return base_.eval(x, order_);
}

double TruncatedRoof::integral() const {
    const RoofSpec& f = base_;
    double h = h_;
    if (order_ == 0) {
        // integral of f over [-h, h] removed from the total
        double log_tail = h - h * std::log(h);                 // int_0^h -log t
        double other_tail = (1 - h) * std::log1p(-h) + h;      // int_0^h -log(1-t)
        double g_part = 2 * h * f.c0();
        for (std::size_t k = 1; k <= f.cos_coeffs().size(); ++k)
            g_part += f.cos_coeffs()[k - 1] * std::sin(kTwoPi * k * h) / (std::numbers::pi * k);
        double cut = (f.A_minus() + f.A_plus()) * (log_tail + other_tail) + g_part;
        return f.integral() - cut;
    }
    // integral over [h, 1-h] of f^{(order)} is a difference of f^{(order-1)}
    return f.eval(1 - h, order_ - 1) - f.eval(h, order_ - 1);
}

TruncatedRoof truncate(const RoofSpec& f, const ContinuedFraction& cf, int n, int order) {
    if (n < 0 || n > cf.depth()) fail(ErrorKind::DepthExceeded, "truncation scale beyond depth");
    return TruncatedRoof(f, cf.q_double(n), order);
}

double variation(const TruncatedRoof& fbar) {
    int order = fbar.order();
    if (order > 1) fail(ErrorKind::InvalidArgument, "variation only for orders 0 and 1");
    const RoofSpec& f = fbar.base();
    double h = fbar.half_width();
    auto F = [&](double x) { return f.eval(x, order); };
    auto dF = [&](double x) { return f.eval(x, order + 1); };
    // partition [h, 1-h] at the zeros of F'; grid is geometric near both ends
    std::vector<double> grid;
    const int per_side = 4000;
    double ratio = std::pow(0.5 / h, 1.0 / per_side);
    for (int i = 0; i <= per_side; ++i) grid.push_back(h * std::pow(ratio, i));
    for (int i = per_side - 1; i >= 0; --i) grid.push_back(1 - h * std::pow(ratio, i));
    std::size_t K = std::max(f.cos_coeffs().size(), f.sin_coeffs().size());
    if (K > 0) {
        int uniform = static_cast<int>(200 * K);
        for (int i = 1; i < uniform; ++i) grid.push_back(h + (1 - 2 * h) * i / uniform);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    std::vector<double> pts{h};
    double prev = dF(grid[0]);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        double cur = dF(grid[i]);
        if ((prev < 0 && cur > 0) || (prev > 0 && cur < 0)) {
            double a = grid[i - 1], b = grid[i], fa = prev;
            for (int it = 0; it < 200 && b - a > 1e-16; ++it) {
                double m = 0.5 * (a + b);
                double fm = dF(m);
                if ((fm < 0) == (fa < 0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            pts.push_back(0.5 * (a + b));
        }
        prev = cur;
    }
    pts.push_back(1 - h);
    double var = std::fabs(F(h)) + std::fabs(F(1 - h));  // jumps at the window edges
    for (std::size_t i = 1; i < pts.size(); ++i) var += std::fabs(F(pts[i]) - F(pts[i - 1]));
    return var;
}

BVFunction bv_from_truncated(const TruncatedRoof& fbar) {
    BVFunction b;
    b.name = "truncated-roof-order" + std::to_string(fbar.order());
    b.eval = [fbar](CirclePoint x) { return fbar.eval(x); };
    b.variation = variation(fbar);
    b.integral = fbar.integral();
    return b;
}

BVFunction bv_trig(int k, double c, double d, double mean) {
    if (k < 1) fail(ErrorKind::InvalidArgument, "frequency must be >= 1");
    BVFunction b;
    b.name = "trig-k" + std::to_string(k);
    b.eval = [k, c, d, mean](CirclePoint x) {
        double t = kTwoPi * k * x.value();
        return mean + c * std::cos(t) + d * std::sin(t);
    };
    b.variation = 4.0 * k * std::hypot(c, d);
    b.integral = mean;
    return b;
}

BVFunction bv_constant(double c) {
    BVFunction b;
    b.name = "constant";
    b.eval = [c](CirclePoint) { return c; };
    b.variation = 0;
    b.integral = c;
    return b;
}

}  // namespace arnoldflow
