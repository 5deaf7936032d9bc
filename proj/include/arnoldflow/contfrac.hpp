#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "arnoldflow/circle.hpp"

namespace arnoldflow {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

enum class AlphaSourceKind { ExplicitQuotients, QuadraticIrrational, DecimalLiteral };

const char* alpha_source_name(AlphaSourceKind k);

// (a + b sqrt(d)) / c
struct QuadraticSurd {
    BigInt a, b, d, c;
};

struct AlphaSource {
    AlphaSourceKind kind = AlphaSourceKind::ExplicitQuotients;
    std::vector<std::uint64_t> quotients;
    QuadraticSurd surd;
    std::string decimal;

    // Accepts "golden", "sqrt2", "quad:a,b,d,c", a comma separated quotient
    // list ("2,3,1" or "[2,3,1]"), or a decimal literal ("0.4142...").
    static AlphaSource parse(const std::string& text);
    static AlphaSource golden();
    static AlphaSource sqrt2_minus_1();
    static AlphaSource from_quotients(std::vector<std::uint64_t> a);
    static AlphaSource quadratic(long long a, long long b, long long d, long long c);
    static AlphaSource from_decimal(std::string digits);
};

class ContinuedFraction {
public:
    AlphaSourceKind source = AlphaSourceKind::ExplicitQuotients;
    // quotients[k] is a_{k+1}; depth K = quotients.size().
    std::vector<std::uint64_t> quotients;
    // p[n], q[n] for n = 0..K.
    std::vector<BigInt> p, q;

    // Certified enclosure alpha_lo <= alpha <= alpha_hi.
    BigRational alpha_lo, alpha_hi;
    // alpha rounded to 2^-128.
    CirclePoint alpha;

    int depth() const { return static_cast<int>(quotients.size()); }
    std::uint64_t a(int n) const;  // a_n, 1 <= n <= K
    std::uint64_t qn(int n) const;  // throws DepthExceeded if n > K or q_n >= 2^63
    std::uint64_t pn(int n) const;
    double q_double(int n) const;
    bool q_fits(int n) const;
    // largest n <= K with q_n < 2^62
    int max_machine_index() const;

    // x + k alpha for any signed k
    CirclePoint shift(CirclePoint x, std::int64_t k) const {
        return CirclePoint{x.turns + static_cast<u128>(static_cast<i128>(k)) * alpha.turns};
    }
};

ContinuedFraction cf_expand(const AlphaSource& src, int depth);

// Continued fraction built from an explicit quotient list; alpha is completed
// with a tail of 1s past the list.
ContinuedFraction cf_from_quotients(const std::vector<std::uint64_t>& a);

struct DistInterval {
    double lo = 0, hi = 0;  // outward-rounded enclosure of ‖q_n alpha‖
    BigRational exact_lo, exact_hi;
    bool strictly_inside = false;  // 1/(2q_{n+1}) < lo and hi < 1/q_{n+1}, exactly
};

DistInterval dist_qn_alpha(const ContinuedFraction& cf, int n);

struct OstrowskiDigits {
    // digits[j] multiplies q_j, j = 0..K-1
    std::vector<std::uint64_t> digits;
    const ContinuedFraction* cf = nullptr;
    int highest() const;
};

// N < q_K is representable at depth K.
OstrowskiDigits ostrowski_encode(const BigInt& N, const ContinuedFraction& cf);
OstrowskiDigits ostrowski_encode(std::uint64_t N, const ContinuedFraction& cf);
BigInt ostrowski_decode(const OstrowskiDigits& d);
void validate_digits(const OstrowskiDigits& d);

struct DiophantineReport {
    int depth = 0;
    int prefix_end = 0;  // first n with q_n >= 8
    std::vector<bool> in_k_alpha;    // index n = 0..K-1
    std::vector<bool> d2_witness;    // index n = 0..K-1
    std::vector<bool> d3_violation;  // index n = 0..K-1
    std::vector<double> d1_partial_sums;
    bool d1_trend_decreasing = false;
    double d_alpha = 1.0;

    std::vector<int> k_alpha_indices() const;
    std::vector<int> witness_indices() const;
    std::vector<int> violation_indices() const;
    int violations_past_prefix() const;
};

DiophantineReport check_diophantine(const ContinuedFraction& cf);

// Raw Diophantine predicates on a pair (q_n, q_{n+1}), natural log.
bool in_k_alpha(double qn, double qn1);
bool is_d2_witness(double qn, double qn1);
bool is_d3_violation(double qn, double qn1);

enum class WitnessProfile { Minimal, Saturated };

struct ConstructedAlpha {
    ContinuedFraction cf;
    int prefix_end = 0;
    std::vector<int> witness_indices;  // designed positions n (a_{n+1} enlarged)
};

// Minimal: a_{n+1} = ceil(log q_n log log q_n) at witness positions.
// Saturated: a_{n+1} = floor(log^2 q_n) - 1 at witness positions, the largest
// quotient that keeps (D3).
ConstructedAlpha construct_alpha_in_D(int witness_gap, int depth,
                                      WitnessProfile profile = WitnessProfile::Minimal);

}  // namespace arnoldflow
