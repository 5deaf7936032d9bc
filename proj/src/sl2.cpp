#include "arnoldflow/sl2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "arnoldflow/errors.hpp"

namespace arnoldflow {

double Mat2::max_abs() const { return std::max({std::fabs(a), std::fabs(b), std::fabs(c), std::fabs(d)}); }

Mat2 Mat2::inverse() const {
    double D = det();
    if (D == 0) fail(ErrorKind::InvalidArgument, "singular matrix");
    return {d / D, -b / D, -c / D, a / D};
}

Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

Mat2 operator-(const Mat2& x, const Mat2& y) { return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d}; }

Mat2 operator*(double k, const Mat2& x) { return {k * x.a, k * x.b, k * x.c, k * x.d}; }

Mat2 horocycle(double t) { return {1, t, 0, 1}; }
Mat2 geodesic(double s) { return {std::exp(s), 0, 0, std::exp(-s)}; }
Mat2 opposite_horocycle(double r) { return {1, 0, r, 1}; }

Mat2 exp_traceless(const Mat2& A) {
    if (std::fabs(A.a + A.d) > 1e-14 * (1 + A.max_abs())) fail(ErrorKind::InvalidArgument, "matrix is not traceless");
    double m2 = -A.det();
    double ch, sh;  // cosh(mu), sinh(mu)/mu, with mu^2 = m2
    if (m2 > 0) {
        double mu = std::sqrt(m2);
        ch = std::cosh(mu);
        sh = std::sinh(mu) / mu;
    } else if (m2 < 0) {
        double mu = std::sqrt(-m2);
        ch = std::cos(mu);
        sh = std::sin(mu) / mu;
    } else {
        ch = 1;
        sh = 1;
    }
    return {ch + sh * A.a, sh * A.b, sh * A.c, ch + sh * A.d};
}

double renorm_residual(double t, double s) {
    Mat2 lhs = horocycle(t) * geodesic(s);
    Mat2 rhs = geodesic(s) * horocycle(std::exp(-2 * s) * t);
    return (lhs - rhs).max_abs();
}

double renorm_contract(double t, double s) { return 1e-10 * (1 + std::fabs(t) * std::exp(std::fabs(s))); }

Mat2 local_matrix(const LocalCoords& lc) {
    return horocycle(lc.vbar) * Mat2{std::exp(lc.s), 0, lc.r, std::exp(-lc.s)};
}

LocalCoords local_coords(const Mat2& X, const Mat2& Y) {
    Mat2 M = X * Y.inverse();
    if (!(M.d > 0)) fail(ErrorKind::DecompositionFailed, "lower-right entry of XY^{-1} must be positive");
    LocalCoords lc;
    lc.r = M.c;
    lc.s = 0.0 - std::log(M.d);  // no -0 for M22 = 1
    lc.vbar = M.b / M.d;
    lc.residual = (M - local_matrix(lc)).max_abs();
    return lc;
}

double chi_eval(double s, double r, double t) { return std::exp(-2 * s) * t - std::exp(-3 * s) * r * t * t; }

ProductIdentity product_identity(const LocalCoords& lc, double T) {
    ProductIdentity p;
    double chi = chi_eval(lc.s, lc.r, T);
    p.lhs = horocycle(T) * local_matrix(lc) * horocycle(-chi);
    p.v = std::exp(-3 * lc.s) * lc.r * lc.r * T * T * T;
    p.rhs = horocycle(lc.vbar) * Mat2{std::exp(lc.s) + lc.r * T, p.v, lc.r, std::exp(-lc.s) - lc.r * chi};
    p.relative = (p.lhs - p.rhs).max_abs() / std::max(1.0, p.rhs.max_abs());
    return p;
}

namespace {

// smallest positive root of a T^2 + b T + c = 0, +inf if none
double first_positive_root(double a, double b, double c) {
    double best = std::numeric_limits<double>::infinity();
    auto take = [&](double x) {
        if (x > 0) best = std::min(best, x);
    };
    if (a == 0) {
        if (b != 0) take(-c / b);
        return best;
    }
    double disc = b * b - 4 * a * c;
    if (disc < 0) return best;
    double sq = std::sqrt(disc);
    // stable pair of roots
    double qq = -0.5 * (b + std::copysign(sq, b));
    if (qq != 0) {
        take(qq / a);
        take(c / qq);
    }
    return best;
}

}  // namespace

QuadraticReport drift_quadratic_check(double s, double r, const std::vector<double>& T_grid, double shift) {
    QuadraticReport rep;
    double es = std::exp(-2 * s), e3 = std::exp(-3 * s);
    auto gap = [&](double T) { return chi_eval(s, r, T) - T; };
    for (double T : T_grid) {
        double g = gap(T);
        rep.T.push_back(T);
        rep.gap.push_back(g);
        if (T != 0) rep.law_residual = std::max(rep.law_residual, std::fabs((chi_eval(s, r, T) - es * T) / (T * T) + e3 * r));
    }
    // gap(T) = -e3 r T^2 + (es - 1) T; |gap| = shift
    double a = -e3 * r, b = es - 1;
    rep.root = std::min(first_positive_root(a, b, -shift), first_positive_root(a, b, shift));
    // grid test tolerant to rounding of the shift level
    const double level = shift * (1 - 1e-12);
    double prev = 0;
    for (std::size_t i = 0; i < rep.T.size(); ++i) {
        if (rep.T[i] > 0 && std::fabs(rep.gap[i]) >= level) {
            rep.found = true;
            rep.grid_first = rep.T[i];
            double lo = prev, hi = rep.T[i];
            for (int it = 0; it < 200 && hi - lo > 0; ++it) {
                double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                (std::fabs(gap(mid)) >= shift ? hi : lo) = mid;
            }
            rep.refined = hi;
            break;
        }
        if (rep.T[i] > 0) prev = rep.T[i];
    }
    return rep;
}

}  // namespace arnoldflow
