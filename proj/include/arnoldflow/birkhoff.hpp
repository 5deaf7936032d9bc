#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "arnoldflow/circle.hpp"
#include "arnoldflow/contfrac.hpp"
#include "arnoldflow/orbit.hpp"
#include "arnoldflow/roof.hpp"

namespace arnoldflow {

enum class SumMethod { NaiveCompensated, OstrowskiBlocked };

inline constexpr double kSingularGuard = 1e-15;
inline constexpr std::uint64_t kSumBudget = 100'000'000;

// sum_{j=0}^{n-1} f^{(order)}(x + j alpha); negative n via
// f^{(-n)}(z) = -f^{(n)}(z - n alpha).
double birkhoff_sum(const RoofSpec& f, CirclePoint x, std::int64_t n, int order, const ContinuedFraction& cf,
                    SumMethod method = SumMethod::NaiveCompensated);

double birkhoff_sum_bv(const BVFunction& g, CirclePoint x, std::int64_t n, const ContinuedFraction& cf);

// f^{(m)}(x) for m = 0..n (n + 1 values), one compensated pass.
std::vector<double> prefix_sums(const RoofSpec& f, CirclePoint x, std::uint64_t n, int order,
                                const ContinuedFraction& cf);

// Slope of the f' Birkhoff sums: f'^{(r)}(x) ~ (A_+ - A_-) r log r.
inline double shear_rate(const RoofSpec& f) { return f.A_plus() - f.A_minus(); }

struct LemmaReport {
    std::string lemma_id;
    std::vector<std::pair<std::string, double>> inputs;
    double measured = 0;  // deviation from the main term (or the quantity being bounded)
    double bound = 0;
    double margin = 0;    // bound - measured (lower bounds: measured - bound)
    bool pass = true;
    bool applicable = true;
    double constant = 0;  // calibrated constant in force
    double shape = 0;     // bound / constant
    std::string note;
    std::vector<LemmaReport> sub;

    double ratio() const { return shape > 0 ? measured / shape : 0.0; }
    bool all_pass() const;
};

// |g^{(q_n)}(x) - q_n int g| <= 2 Var(g), evaluated without tolerance.
LemmaReport denjoy_koksma_check(const BVFunction& g, CirclePoint x, int n, const ContinuedFraction& cf);

// Constants for the special-time estimates, one per derivative order 0..4.
struct SpecialTimeConstants {
    double C[5] = {1, 1, 1, 1, 1};
};

// Five estimates at the return time q_n; orders 2..4 compare against the term
// at i = i_{n,x}. The roof must be normalized.
LemmaReport verify_special_times(const RoofSpec& f, CirclePoint x, int n, const ContinuedFraction& cf,
                                 const SpecialTimeConstants& c);

enum class SampleMode { Sampled, Exhaustive };

// max_{m in [0,T]} |f^{(m)}(x) - m| against C T^{1/5}; requires the orbit up to T
// to avoid [-1/(2T log^4 T), 1/(2T log^4 T)] (else not applicable).
LemmaReport verify_f_bound(const RoofSpec& f, CirclePoint x, std::uint64_t T, const ContinuedFraction& cf, double C,
                           SampleMode mode = SampleMode::Sampled);

// Growth law far from the singularity: for eps^4 q_n <= r <= M q_{n+1},
// |f'^{(r)}(x) - rate r log r| <= eps^2 r log r; for r <= eps^4 q_n,
// |f'^{(r)}(x)| < eps^2 q_n log q_n. Throws HypothesisFailed if x in Sigma_n(M).
LemmaReport verify_fprime_far(const RoofSpec& f, CirclePoint x, std::uint64_t r, int n, double M, double eps,
                              const ContinuedFraction& cf);

struct GoodScaleOptions {
    double M = 2;
    bool strict_sigma = false;  // throw HypothesisFailed when x in Sigma_n(M)
};

// |f'^{(r)}(x) - rate r log q_n| <= C T and
// |f'^{(r)}(x) - f'^{(s)}(x) - rate (r - s) log q_n| < eps^2 T.
LemmaReport verify_fprime_goodscale(const RoofSpec& f, CirclePoint x, std::uint64_t T, std::uint64_t r,
                                    std::uint64_t s, int n, double eps, const ContinuedFraction& cf, double C,
                                    const GoodScaleOptions& opt = {});

struct ResonantReport {
    std::uint64_t r = 0;
    int j_r = 0;
    double main_term = 0;  // rate r log q_{j_r}
    double sum = 0;        // f'^{(r)}(x)
    double measured_residual = 0;
    double max_inv_dist = 0;  // max_{0<=i<r} 1/‖x + i alpha‖
    double res_bound_1 = 0;
    double res_bound_2 = 0;
    double res = 0;
    int res_choice = 1;  // which expression attains the min
    double delta = 1;
    double shape = 0;  // r + delta q_{j_r} log q_{j_r} + Res
    std::vector<std::pair<std::string, double>> error_budget_terms;
};

ResonantReport resonant_decomposition(const RoofSpec& f, CirclePoint x, std::uint64_t r, const ContinuedFraction& cf,
                                      double delta = 1.0, Method method = Method::Accelerated);

LemmaReport resonant_report(const ResonantReport& rr, double C);

struct HigherDerivativeConstants {
    double C67[3] = {1, 1, 1};  // orders 2,3,4
    double C68_upper[3] = {1, 1, 1};
    double c68_lower[3] = {0, 0, 0};
    double c68_threshold = 0.25;      // B_{n,x} < c for the two-sided estimate
    double D69 = 1;
};

// Sub-reports "near-return.j", "close-return.j[.lower]" (j = 2,3,4) and
// "second-derivative-run"; each is marked not applicable when its hypotheses
// on B_{n,x}, k or w fail. Pass w = 0 to skip the last one.
LemmaReport verify_higher_derivatives(const RoofSpec& f, CirclePoint x, int n, std::uint64_t k, std::uint64_t w,
                                      double eps, const ContinuedFraction& cf, const HigherDerivativeConstants& c,
                                      int n0 = 1);

}  // namespace arnoldflow
