#pragma once

#include <vector>

namespace arnoldflow {

struct Mat2 {
    double a = 1, b = 0, c = 0, d = 1;  // [[a, b], [c, d]]

    double det() const { return a * d - b * c; }
    double max_abs() const;
    Mat2 inverse() const;  // general 2x2 inverse
    friend Mat2 operator*(const Mat2& x, const Mat2& y);
    friend Mat2 operator-(const Mat2& x, const Mat2& y);
    friend Mat2 operator*(double k, const Mat2& x);
    friend bool operator==(const Mat2&, const Mat2&) = default;
};

Mat2 horocycle(double t);           // h_t = [[1, t], [0, 1]]
Mat2 geodesic(double s);            // g_s = diag(e^s, e^{-s})
Mat2 opposite_horocycle(double r);  // v_r = [[1, 0], [r, 1]]

// Lie algebra generators: h_t = exp(tU), g_s = exp(sX), v_r = exp(rV).
inline constexpr Mat2 kU{0, 1, 0, 0};
inline constexpr Mat2 kV{0, 0, 1, 0};
inline constexpr Mat2 kX{1, 0, 0, -1};

// exp of a traceless matrix: A^2 = -det(A) I gives cosh / sinh closed form.
Mat2 exp_traceless(const Mat2& A);

// max-entry residual of h_t g_s - g_s h_{e^{-2s} t}
double renorm_residual(double t, double s);
double renorm_contract(double t, double s);  // 1e-10 (1 + |t| e^{|s|})

struct LocalCoords {
    double vbar = 0, s = 0, r = 0;
    double residual = 0;  // |XY^{-1} - h_vbar [[e^s, 0], [r, e^{-s}]]|_max
};

// Solves XY^{-1} = h_vbar [[e^s, 0], [r, e^{-s}]]; DecompositionFailed unless (XY^{-1})_22 > 0.
LocalCoords local_coords(const Mat2& X, const Mat2& Y);
Mat2 local_matrix(const LocalCoords& lc);

double chi_eval(double s, double r, double t);  // e^{-2s} t - e^{-3s} r t^2

struct ProductIdentity {
    Mat2 lhs, rhs;
    double v = 0;         // e^{-3s} r^2 T^3
    double relative = 0;  // |lhs - rhs|_max / max(1, |rhs|_max)
};

// h_T (XY^{-1}) h_{-chi(T)} against h_vbar [[e^s + rT, v], [r, e^{-s} - r chi(T)]]
ProductIdentity product_identity(const LocalCoords& lc, double T);

struct QuadraticReport {
    std::vector<double> T, gap;        // gap = chi(T) - T on the grid
    double law_residual = 0;           // max |(chi(T) - e^{-2s}T)/T^2 + e^{-3s} r| over T != 0
    bool found = false;
    double grid_first = 0;             // first grid T with |chi(T) - T| >= shift
    double root = 0;                   // smallest T > 0 with |chi(T) - T| = shift, closed form
    double refined = 0;                // same root by bisection between grid points
};

QuadraticReport drift_quadratic_check(double s, double r, const std::vector<double>& T_grid, double shift);

}  // namespace arnoldflow
