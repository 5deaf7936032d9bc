#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "arnoldflow/birkhoff.hpp"
#include "arnoldflow/roof.hpp"

namespace arnoldflow {

// a_w = p (f^{(w)}(x) - f^{(w)}(x')) - q (f^{(m)}(y) - f^{(m)}(y')), m = floor(zeta w).
struct DriftSeries {
    double p = 1, q = 2, zeta = 0.5;
    CirclePoint x, xp, y, yp;
    std::vector<double> a;  // w = 0..w_max
    // |a_{w+1} - a_w| bounded by the summed step terms; largest excess observed
    double continuity_excess = 0;
};

DriftSeries drift_sequence(const RoofSpec& f, double p, double q, CirclePoint x, CirclePoint xp, CirclePoint y,
                           CirclePoint yp, std::uint64_t w_max, const ContinuedFraction& cf);

// a_w recomputed from four birkhoff_sum calls.
double drift_value(const RoofSpec& f, const DriftSeries& s, std::uint64_t w, const ContinuedFraction& cf);

struct Splitting {
    std::uint64_t M = 0;  // splitting time
    std::uint64_t L = 0;  // floor(kappa M)
    int shift_sign = 0;   // a_M ~ shift_sign r_pq
    std::uint64_t first_entry = 0;
    bool plateau_ok = false;  // |a_s - a_M| < eps^{3/2} for s in [M, M + kappa M]
    double plateau_dev = 0;
};

// First w with |a_w -/+ r_pq| < eps; M is the best-aligned w of the run of
// consecutive entries that starts there (smallest on ties).
std::optional<Splitting> splitting_time(const DriftSeries& s, double r_pq, double eps, double kappa);

enum class ShearCase { Asynchronous, SecondOrder };

struct CaseReport {
    int x_scale = 0;
    int v_scale = 0;
    ShearCase kind = ShearCase::SecondOrder;
    double T = 0;
};

// Scale n with 1/(q_{n+1} log q_{n+1}) < d <= 1/(q_n log q_n), n >= 2.
int variation_scale(double d, const ContinuedFraction& cf);

CaseReport classify_case(CirclePoint x, CirclePoint xp, CirclePoint y, CirclePoint yp, const ContinuedFraction& cf,
                         double zeta, double c_pq);

// Step function into (0,1]: values[0] below breaks[0], values[i] on
// [breaks[i-1], breaks[i]), values.back() from breaks.back() on.
struct StepProbe {
    std::vector<double> breaks;
    std::vector<double> values;
    double operator()(double t) const;
    double integral(double lo, double hi) const;
};

enum class TripleKind { PAL, SAL };

struct PalPiece {
    double lo, hi, R;  // a(t) = t + R on (lo, hi)
};

struct GoodTriple {
    TripleKind kind = TripleKind::PAL;
    double M = 0, L = 1;
    double d = 0.5, xi = 0.1;
    std::vector<PalPiece> pieces;                 // PAL; U is their union
    std::function<double(double)> a, a_prime;    // SAL
};

// Throws InvalidTriple when the definition fails.
void validate_triple(const GoodTriple& g);

// (1/L) int f(a(t)) dt < (1/L) int f(s) ds + 9 xi/d. Off U the integrand is
// taken as 1 (the largest value f can have), so the check covers every extension of a.
LemmaReport almost_linear_check(const GoodTriple& g, const StepProbe& f);

struct GridSpec {
    int a_points = 1000;
    int c_points = 500;  // per sign of C = A/B
    double a_min = 1e-6, a_max = 1e2;
    double c_min = 1e-4, c_max = 1e4;
    int random_checks = 100000;
    std::uint64_t seed = 1;
};

struct CombinatorialResult {
    bool excluded = false;  // p/q in {1, U/V, V/U}
    double c_threshold = 0;  // largest c with no grid point A <= 10c below K
    double min_over_grid_of_max = 0;  // over A <= 10 c_threshold
    std::uint64_t grid_points = 0;
    std::uint64_t random_counterexamples = 0;  // independent draws with A <= 10c
    // excluded case: j1, j2 and B = A / ratio make both expressions vanish
    double family_j1 = 0, family_j2 = 0, family_ratio = 0;
    double family_residual = 0;
};

// max(|q j1 A^-2 - p j2 B^-2|, |q^2 j1 A^-3 - p^2 j2 B^-3|)
double combinatorial_expression(double p, double q, double j1, double j2, double A, double B);

CombinatorialResult combinatorial_search(double U, double V, double p, double q, double K, const GridSpec& grid = {});

}  // namespace arnoldflow
