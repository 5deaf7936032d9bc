#pragma once

#include <functional>
#include <string>
#include <vector>

#include "arnoldflow/circle.hpp"
#include "arnoldflow/contfrac.hpp"

namespace arnoldflow {

// f(x) = A_-(-log x) + A_+(-log(1-x)) + g(x),
// g(x) = c0 + sum_k cos_coeffs[k-1] cos 2 pi k x + sin_coeffs[k-1] sin 2 pi k x.
class RoofSpec {
public:
    RoofSpec() = default;
    // Validates A_-, A_+ > 0, A_- != A_+ and certifies f > 0 on (0,1).
    RoofSpec(double a_minus, double a_plus, double c0, std::vector<double> cos_coeffs = {},
             std::vector<double> sin_coeffs = {});

    double A_minus() const { return a_minus_; }
    double A_plus() const { return a_plus_; }
    double c0() const { return c0_; }
    const std::vector<double>& cos_coeffs() const { return cos_; }
    const std::vector<double>& sin_coeffs() const { return sin_; }

    // order 0..4; throws SingularPoint at x = 0
    double eval(CirclePoint x, int order = 0) const;
    // x in (0,1)
    double eval(double x, int order = 0) const;
    // log-free part: the order-th derivative of g
    double smooth(double x, int order) const;
    // order-th derivative from the pieces u = {x}, v = 1 - {x}
    double eval_split(double u, double v, int order) const;

    double integral() const { return a_minus_ + a_plus_ + c0_; }
    RoofSpec normalized() const;
    RoofSpec scaled(double c) const;

    // bounds on g and g' used for positivity certification
    double smooth_min_bound() const;
    double smooth_lipschitz() const;

    std::string to_json() const;
    static RoofSpec from_json(const std::string& text);

private:
    void certify_positive() const;

    double a_minus_ = 1, a_plus_ = 2, c0_ = 0;
    std::vector<double> cos_, sin_;
};

// A_- = 0.6, A_+ = 0.3, g = 0.1: integral 1.
RoofSpec canonical_roof();

// f (or its derivative) outside [-h, h], zero inside; h = 1/(4 q_n).
class TruncatedRoof {
public:
    TruncatedRoof(RoofSpec base, double qn, int order);
    double eval(CirclePoint x) const;
    double half_width() const { return h_; }
    int order() const { return order_; }
    double qn() const { return qn_; }
    const RoofSpec& base() const { return base_; }
    double integral() const;

private:
    RoofSpec base_;
    double qn_;
    double h_;
    u128 h_turns_;
    int order_;
};

TruncatedRoof truncate(const RoofSpec& f, const ContinuedFraction& cf, int n, int order);

// Total variation on the circle, order 0 or 1.
double variation(const TruncatedRoof& fbar);

// Bounded-variation test function for Denjoy-Koksma checks.
struct BVFunction {
    std::string name;
    std::function<double(CirclePoint)> eval;
    double variation = 0;
    double integral = 0;
};

BVFunction bv_from_truncated(const TruncatedRoof& fbar);
// c cos 2 pi k x + d sin 2 pi k x + mean; variation 4k sqrt(c^2 + d^2)
BVFunction bv_trig(int k, double c, double d, double mean = 0);
BVFunction bv_constant(double c);

}  // namespace arnoldflow
