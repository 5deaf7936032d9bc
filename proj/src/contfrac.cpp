#include "arnoldflow/contfrac.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "arnoldflow/errors.hpp"

namespace arnoldflow {

namespace {

// convergents need q beyond 2^140 so that alpha is pinned well below 2^-128
const BigInt kPrecisionTarget = BigInt(1) << 140;

BigInt floor_div(const BigInt& a, const BigInt& b) {
    BigInt q = a / b;
    BigInt r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) q -= 1;
    return q;
}

void fill_convergents(const std::vector<std::uint64_t>& a, std::vector<BigInt>& p, std::vector<BigInt>& q) {
    p.assign(a.size() + 1, 0);
    q.assign(a.size() + 1, 0);
    p[0] = 0;
    q[0] = 1;
    BigInt pm1 = 1, qm1 = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        p[k + 1] = BigInt(a[k]) * p[k] + (k == 0 ? pm1 : p[k - 1]);
        q[k + 1] = BigInt(a[k]) * q[k] + (k == 0 ? qm1 : q[k - 1]);
    }
}

u128 rational_to_turns(const BigRational& r) {
    // round(frac(r) * 2^128)
    BigInt num = boost::multiprecision::numerator(r);
    BigInt den = boost::multiprecision::denominator(r);
    BigInt fl = floor_div(num, den);
    num -= fl * den;
    BigInt scaled = ((num << 129) + den) / (den * 2);
    BigInt mask = (BigInt(1) << 128) - 1;
    scaled &= mask;
    u128 out = 0;
    for (int limb = 1; limb >= 0; --limb) {
        BigInt part = (scaled >> (64 * limb)) & BigInt(0xFFFFFFFFFFFFFFFFULL);
        out = (out << 64) | static_cast<u128>(part.convert_to<std::uint64_t>());
    }
    return out;
}

// Sets alpha data from an (extended) quotient list whose convergents bracket alpha.
void set_alpha_from_extended(ContinuedFraction& cf, const std::vector<std::uint64_t>& ext) {
    std::vector<BigInt> p, q;
    fill_convergents(ext, p, q);
    std::size_t m = ext.size();
    BigRational r1(p[m - 1], q[m - 1]);
    BigRational r2(p[m], q[m]);
    cf.alpha_lo = std::min(r1, r2);
    cf.alpha_hi = std::max(r1, r2);
    cf.alpha = CirclePoint{rational_to_turns(r2)};
}

std::vector<std::uint64_t> surd_quotients(const QuadraticSurd& s, const BigInt& stop_q, std::size_t min_count) {
    if (s.c == 0) fail(ErrorKind::InvalidArgument, "quadratic irrational with zero denominator");
    if (s.d < 0) fail(ErrorKind::InvalidArgument, "negative radicand");
    if (s.b == 0) fail(ErrorKind::RationalInput, "b = 0 gives a rational number");
    BigInt root = boost::multiprecision::sqrt(s.d);
    if (root * root == s.d) fail(ErrorKind::RationalInput, "radicand is a perfect square");

    int sign = s.b > 0 ? 1 : -1;
    BigInt P = s.a * sign;
    BigInt Q = s.c * sign;
    BigInt D = s.b * s.b * s.d;
    if ((D - P * P) % Q != 0) {
        BigInt absQ = Q < 0 ? BigInt(-Q) : Q;
        P *= absQ;
        D *= Q * Q;
        Q *= absQ;
    }
    BigInt sq = boost::multiprecision::sqrt(D);
    std::vector<std::uint64_t> out;
    BigInt q_prev = 0, q_cur = 1;
    bool first = true;
    for (;;) {
        BigInt a;
        if (Q > 0)
            a = floor_div(P + sq, Q);
        else
            a = -(floor_div(P + sq, -Q) + 1);
        if (!first) {
            if (a <= 0 || a > BigInt(std::numeric_limits<std::uint64_t>::max()))
                fail(ErrorKind::InvalidArgument, "partial quotient out of range");
            out.push_back(a.convert_to<std::uint64_t>());
            BigInt qn = a * q_cur + q_prev;
            q_prev = q_cur;
            q_cur = qn;
            if (out.size() >= min_count && q_cur > stop_q) break;
        }
        first = false;
        P = a * Q - P;
        Q = (D - P * P) / Q;
    }
    return out;
}

struct DecimalValue {
    BigInt num;
    BigInt den;  // 10^k
};

DecimalValue parse_decimal(const std::string& text) {
    std::string s = text;
    bool neg = false;
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) {
        neg = s[i] == '-';
        ++i;
    }
    BigInt num = 0, den = 1;
    bool seen_point = false, seen_digit = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c == '.') {
            if (seen_point) fail(ErrorKind::InvalidArgument, "malformed decimal: " + text);
            seen_point = true;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            num = num * 10 + (c - '0');
            if (seen_point) den *= 10;
            seen_digit = true;
        } else {
            fail(ErrorKind::InvalidArgument, "malformed decimal: " + text);
        }
    }
    if (!seen_digit) fail(ErrorKind::InvalidArgument, "malformed decimal: " + text);
    if (neg) num = -num;
    return {num, den};
}

// Full continued fraction of num/den including a_0 (Euclid).
std::vector<BigInt> rational_cf(BigInt num, BigInt den) {
    std::vector<BigInt> out;
    while (den != 0) {
        BigInt a = floor_div(num, den);
        out.push_back(a);
        BigInt r = num - a * den;
        num = den;
        den = r;
    }
    return out;
}

ContinuedFraction decimal_expand(const std::string& text, int depth) {
    DecimalValue d = parse_decimal(text);
    std::vector<BigInt> lo = rational_cf(d.num - 1, d.den);
    std::vector<BigInt> hi = rational_cf(d.num + 1, d.den);
    std::vector<BigInt> mid = rational_cf(d.num, d.den);
    // last quotient of a finite expansion is ambiguous ([..,a] = [..,a-1,1])
    std::size_t common = 0;
    std::size_t limit = std::min(lo.size(), hi.size());
    limit = limit == 0 ? 0 : limit - 1;
    while (common < limit && lo[common] == hi[common]) ++common;
    // common counts a_0 as well
    int certified = common == 0 ? -1 : static_cast<int>(common) - 1;
    if (certified < depth) {
        int mid_len = static_cast<int>(mid.size()) - 1;  // quotients after a_0
        if (mid_len <= std::max(certified, 0) + 1)
            fail(ErrorKind::RationalInput, "decimal " + text + " has a terminating expansion of length " +
                                               std::to_string(mid_len));
        fail(ErrorKind::InsufficientPrecision, "decimal " + text + " certifies only " +
                                                   std::to_string(std::max(certified, 0)) + " quotients");
    }
    ContinuedFraction cf;
    cf.source = AlphaSourceKind::DecimalLiteral;
    for (int k = 1; k <= depth; ++k) {
        if (mid[k] > BigInt(std::numeric_limits<std::uint64_t>::max()))
            fail(ErrorKind::InvalidArgument, "partial quotient out of range");
        cf.quotients.push_back(mid[k].convert_to<std::uint64_t>());
    }
    fill_convergents(cf.quotients, cf.p, cf.q);
    BigRational a0(lo[0]);
    cf.alpha_lo = BigRational(d.num - 1, d.den) - a0;
    cf.alpha_hi = BigRational(d.num + 1, d.den) - a0;
    cf.alpha = CirclePoint{rational_to_turns(BigRational(d.num, d.den))};
    return cf;
}

std::vector<std::uint64_t> parse_quotient_list(const std::string& text) {
    std::string s;
    for (char c : text)
        if (c != '[' && c != ']' && !std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    std::vector<std::uint64_t> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) fail(ErrorKind::InvalidArgument, "empty quotient in list: " + text);
        for (char c : tok)
            if (!std::isdigit(static_cast<unsigned char>(c)))
                fail(ErrorKind::InvalidArgument, "bad quotient '" + tok + "'");
        std::uint64_t v = std::stoull(tok);
        if (v == 0) fail(ErrorKind::InvalidArgument, "partial quotients must be positive");
        out.push_back(v);
    }
    if (out.empty()) fail(ErrorKind::InvalidArgument, "empty quotient list");
    return out;
}

}  // namespace

const char* alpha_source_name(AlphaSourceKind k) {
    switch (k) {
    case AlphaSourceKind::ExplicitQuotients: return "explicit-quotients";
    case AlphaSourceKind::QuadraticIrrational: return "quadratic-irrational";
    case AlphaSourceKind::DecimalLiteral: return "decimal-literal";
    }
    return "?";
}

AlphaSource AlphaSource::golden() { return quadratic(-1, 1, 5, 2); }
AlphaSource AlphaSource::sqrt2_minus_1() { return quadratic(-1, 1, 2, 1); }

AlphaSource AlphaSource::from_quotients(std::vector<std::uint64_t> a) {
    AlphaSource s;
    s.kind = AlphaSourceKind::ExplicitQuotients;
    s.quotients = std::move(a);
    return s;
}

AlphaSource AlphaSource::quadratic(long long a, long long b, long long d, long long c) {
    AlphaSource s;
    s.kind = AlphaSourceKind::QuadraticIrrational;
    s.surd = QuadraticSurd{a, b, d, c};
    return s;
}

AlphaSource AlphaSource::from_decimal(std::string digits) {
    AlphaSource s;
    s.kind = AlphaSourceKind::DecimalLiteral;
    s.decimal = std::move(digits);
    return s;
}

AlphaSource AlphaSource::parse(const std::string& text) {
    if (text == "golden") return golden();
    if (text == "sqrt2") return sqrt2_minus_1();
    if (text.rfind("quad:", 0) == 0) {
        std::stringstream ss(text.substr(5));
        std::string tok;
        std::vector<BigInt> v;
        while (std::getline(ss, tok, ',')) {
            try {
                v.emplace_back(tok);
            } catch (const std::exception&) {
                fail(ErrorKind::InvalidArgument, "bad integer '" + tok + "' in " + text);
            }
        }
        if (v.size() != 4) fail(ErrorKind::InvalidArgument, "quad: expects a,b,d,c");
        AlphaSource s;
        s.kind = AlphaSourceKind::QuadraticIrrational;
        s.surd = QuadraticSurd{v[0], v[1], v[2], v[3]};
        return s;
    }
    if (text.find('.') != std::string::npos) return from_decimal(text);
    return from_quotients(parse_quotient_list(text));
}

std::uint64_t ContinuedFraction::a(int n) const {
    if (n < 1 || n > depth()) fail(ErrorKind::DepthExceeded, "a_" + std::to_string(n) + " beyond depth");
    return quotients[n - 1];
}

bool ContinuedFraction::q_fits(int n) const {
    return n >= 0 && n <= depth() && q[n] < (BigInt(1) << 63);
}

std::uint64_t ContinuedFraction::qn(int n) const {
    if (n < 0 || n > depth()) fail(ErrorKind::DepthExceeded, "q_" + std::to_string(n) + " beyond depth " + std::to_string(depth()));
    if (!q_fits(n)) fail(ErrorKind::DepthExceeded, "q_" + std::to_string(n) + " exceeds machine range");
    return q[n].convert_to<std::uint64_t>();
}

std::uint64_t ContinuedFraction::pn(int n) const {
    if (n < 0 || n > depth()) fail(ErrorKind::DepthExceeded, "p_" + std::to_string(n) + " beyond depth");
    if (p[n] >= (BigInt(1) << 63)) fail(ErrorKind::DepthExceeded, "p_" + std::to_string(n) + " exceeds machine range");
    return p[n].convert_to<std::uint64_t>();
}

double ContinuedFraction::q_double(int n) const {
    if (n < 0 || n > depth()) fail(ErrorKind::DepthExceeded, "q_" + std::to_string(n) + " beyond depth");
    return q[n].convert_to<double>();
}

int ContinuedFraction::max_machine_index() const {
    int n = 0;
    while (n + 1 <= depth() && q[n + 1] < (BigInt(1) << 62)) ++n;
    return n;
}

ContinuedFraction cf_from_quotients(const std::vector<std::uint64_t>& a) {
    ContinuedFraction cf;
    cf.source = AlphaSourceKind::ExplicitQuotients;
    cf.quotients = a;
    for (auto v : a)
        if (v == 0) fail(ErrorKind::InvalidArgument, "partial quotients must be positive");
    fill_convergents(cf.quotients, cf.p, cf.q);
    std::vector<std::uint64_t> ext = a;
    BigInt qa = cf.q.back(), qb = cf.q.size() > 1 ? cf.q[cf.q.size() - 2] : BigInt(0);
    while (qa <= kPrecisionTarget || ext.size() < a.size() + 2) {
        ext.push_back(1);
        BigInt next = qa + qb;
        qb = qa;
        qa = next;
    }
    set_alpha_from_extended(cf, ext);
    return cf;
}

ContinuedFraction cf_expand(const AlphaSource& src, int depth) {
    if (depth < 2) fail(ErrorKind::InvalidArgument, "depth must be at least 2");
    switch (src.kind) {
    case AlphaSourceKind::ExplicitQuotients: {
        if (static_cast<int>(src.quotients.size()) < depth)
            fail(ErrorKind::DepthExceeded, "explicit list has " + std::to_string(src.quotients.size()) +
                                               " quotients, depth " + std::to_string(depth) + " requested");
        // alpha is defined by the full list (then a tail of 1s); the cf is truncated
        ContinuedFraction full = cf_from_quotients(src.quotients);
        ContinuedFraction cf = full;
        cf.quotients.resize(depth);
        cf.p.resize(depth + 1);
        cf.q.resize(depth + 1);
        return cf;
    }
    case AlphaSourceKind::QuadraticIrrational: {
        std::vector<std::uint64_t> ext = surd_quotients(src.surd, kPrecisionTarget, depth + 2);
        ContinuedFraction cf;
        cf.source = AlphaSourceKind::QuadraticIrrational;
        cf.quotients.assign(ext.begin(), ext.begin() + depth);
        fill_convergents(cf.quotients, cf.p, cf.q);
        set_alpha_from_extended(cf, ext);
        return cf;
    }
    case AlphaSourceKind::DecimalLiteral:
        return decimal_expand(src.decimal, depth);
    }
    fail(ErrorKind::InvalidArgument, "unknown alpha source");
}

DistInterval dist_qn_alpha(const ContinuedFraction& cf, int n) {
    if (n < 0 || n >= cf.depth() - 1)
        fail(ErrorKind::DepthExceeded, "dist_qn_alpha needs n < depth - 1 (n=" + std::to_string(n) + ")");
    BigRational qn(cf.q[n]);
    BigRational e1 = qn * cf.alpha_lo;
    BigRational e2 = qn * cf.alpha_hi;
    // nearest integer to q_n alpha, taken at the midpoint of the enclosure
    BigRational mid = (e1 + e2) / 2;
    BigInt m = floor_div(boost::multiprecision::numerator(mid) * 2 + boost::multiprecision::denominator(mid),
                         boost::multiprecision::denominator(mid) * 2);
    BigRational d1 = e1 - BigRational(m);
    BigRational d2 = e2 - BigRational(m);
    if ((d1 < 0) != (d2 < 0) && d1 != 0 && d2 != 0)
        fail(ErrorKind::InsufficientPrecision, "enclosure of q_n alpha straddles an integer");
    if (d1 < 0) d1 = -d1;
    if (d2 < 0) d2 = -d2;
    DistInterval out;
    out.exact_lo = std::min(d1, d2);
    out.exact_hi = std::max(d1, d2);
    BigRational lower(BigInt(1), cf.q[n + 1] * 2);
    BigRational upper(BigInt(1), cf.q[n + 1]);
    out.strictly_inside = out.exact_lo > lower && out.exact_hi < upper;
    out.lo = std::nextafter(out.exact_lo.convert_to<double>(), 0.0);
    out.hi = std::nextafter(out.exact_hi.convert_to<double>(), 1.0);
    return out;
}

int OstrowskiDigits::highest() const {
    for (int j = static_cast<int>(digits.size()) - 1; j >= 0; --j)
        if (digits[j] != 0) return j;
    return -1;
}

OstrowskiDigits ostrowski_encode(const BigInt& N, const ContinuedFraction& cf) {
    int K = cf.depth();
    if (N <= 0) fail(ErrorKind::NotRepresentable, "N must be positive");
    if (N >= cf.q[K])
        fail(ErrorKind::NotRepresentable, "N >= q_K at depth " + std::to_string(K));
    OstrowskiDigits d;
    d.cf = &cf;
    d.digits.assign(K, 0);
    BigInt rest = N;
    for (int j = K - 1; j >= 0; --j) {
        if (rest >= cf.q[j]) {
            BigInt b = rest / cf.q[j];
            d.digits[j] = b.convert_to<std::uint64_t>();
            rest -= b * cf.q[j];
        }
    }
    return d;
}

OstrowskiDigits ostrowski_encode(std::uint64_t N, const ContinuedFraction& cf) {
    return ostrowski_encode(BigInt(N), cf);
}

void validate_digits(const OstrowskiDigits& d) {
    if (!d.cf) fail(ErrorKind::InvalidDigits, "digits without a continued fraction");
    const ContinuedFraction& cf = *d.cf;
    if (static_cast<int>(d.digits.size()) > cf.depth())
        fail(ErrorKind::InvalidDigits, "more digits than depth");
    if (d.highest() < 0) fail(ErrorKind::InvalidDigits, "no nonzero digit");
    for (std::size_t j = 0; j < d.digits.size(); ++j) {
        std::uint64_t bound = cf.quotients[j] - (j == 0 ? 1 : 0);  // b_0 < a_1, b_j <= a_{j+1}
        if (d.digits[j] > bound)
            fail(ErrorKind::InvalidDigits, "digit " + std::to_string(j) + " exceeds its bound");
        if (j >= 1 && d.digits[j] == cf.quotients[j] && d.digits[j - 1] != 0)
            fail(ErrorKind::InvalidDigits, "maximal digit " + std::to_string(j) + " must be followed by a zero digit below");
    }
}

BigInt ostrowski_decode(const OstrowskiDigits& d) {
    validate_digits(d);
    BigInt n = 0;
    for (std::size_t j = 0; j < d.digits.size(); ++j) n += BigInt(d.digits[j]) * d.cf->q[j];
    return n;
}

bool in_k_alpha(double qn, double qn1) {
    if (qn < 2) return false;
    return qn1 <= qn * std::pow(std::log(qn), 7.0 / 8.0);
}

bool is_d2_witness(double qn, double qn1) {
    if (qn < 3) return false;
    double l = std::log(qn);
    return qn1 >= qn * l * std::log(l);
}

bool is_d3_violation(double qn, double qn1) {
    if (qn < 2) return false;
    double l = std::log(qn);
    return qn1 > qn * l * l;
}

std::vector<int> DiophantineReport::k_alpha_indices() const {
    std::vector<int> v;
    for (std::size_t n = 0; n < in_k_alpha.size(); ++n)
        if (in_k_alpha[n]) v.push_back(static_cast<int>(n));
    return v;
}

std::vector<int> DiophantineReport::witness_indices() const {
    std::vector<int> v;
    for (std::size_t n = 0; n < d2_witness.size(); ++n)
        if (d2_witness[n]) v.push_back(static_cast<int>(n));
    return v;
}

std::vector<int> DiophantineReport::violation_indices() const {
    std::vector<int> v;
    for (std::size_t n = 0; n < d3_violation.size(); ++n)
        if (d3_violation[n]) v.push_back(static_cast<int>(n));
    return v;
}

int DiophantineReport::violations_past_prefix() const {
    int c = 0;
    for (std::size_t n = static_cast<std::size_t>(prefix_end); n < d3_violation.size(); ++n) c += d3_violation[n];
    return c;
}

DiophantineReport check_diophantine(const ContinuedFraction& cf) {
    int K = cf.depth();
    if (K < 4) fail(ErrorKind::InvalidArgument, "check_diophantine needs depth >= 4");
    DiophantineReport r;
    r.depth = K;
    r.prefix_end = K;
    for (int n = 0; n <= K; ++n)
        if (cf.q[n] >= 8) {
            r.prefix_end = n;
            break;
        }
    double partial = 0.0;
    for (int n = 0; n < K; ++n) {
        double qn = cf.q_double(n), qn1 = cf.q_double(n + 1);
        bool k = in_k_alpha(qn, qn1);
        r.in_k_alpha.push_back(k);
        r.d2_witness.push_back(is_d2_witness(qn, qn1));
        r.d3_violation.push_back(is_d3_violation(qn, qn1));
        if (!k && qn >= 2) partial += std::pow(std::log(qn), -7.0 / 8.0);
        r.d1_partial_sums.push_back(partial);
        if (qn >= 2) {
            double l = std::log(qn);
            r.d_alpha = std::max(r.d_alpha, qn1 / (qn * l * l));
        }
    }
    // trend: the second half of the indices adds no more than the first half
    int half = K / 2;
    double first = r.d1_partial_sums[half - 1];
    double second = r.d1_partial_sums[K - 1] - r.d1_partial_sums[half - 1];
    r.d1_trend_decreasing = second <= first;
    return r;
}

ConstructedAlpha construct_alpha_in_D(int witness_gap, int depth, WitnessProfile profile) {
    if (witness_gap < 2) fail(ErrorKind::InvalidArgument, "witness_gap must be >= 2");
    if (depth < 8) fail(ErrorKind::InvalidArgument, "depth must be >= 8");
    ConstructedAlpha out;
    std::vector<std::uint64_t> a;
    BigInt q_prev = 0, q_cur = 1;  // q_{-1}, q_0
    out.prefix_end = -1;
    for (int n = 0; n < depth; ++n) {
        // choose a_{n+1} knowing q_n = q_cur
        double qn = q_cur.convert_to<double>();
        if (out.prefix_end < 0 && qn >= 8) out.prefix_end = n;
        std::uint64_t an1 = 1;
        if (n > 0 && n % witness_gap == 0 && qn >= 8) {
            double l = std::log(qn);
            if (profile == WitnessProfile::Minimal) {
                an1 = static_cast<std::uint64_t>(std::ceil(l * std::log(l)));
                // guard against rounding in the ceiling
                while (static_cast<double>(an1) * qn < qn * l * std::log(l)) ++an1;
            } else {
                an1 = static_cast<std::uint64_t>(std::floor(l * l)) - 1;
            }
            if (an1 < 1) an1 = 1;
            out.witness_indices.push_back(n);
        }
        a.push_back(an1);
        BigInt next = BigInt(an1) * q_cur + q_prev;
        q_prev = q_cur;
        q_cur = next;
    }
    if (out.prefix_end < 0) out.prefix_end = depth;
    out.cf = cf_from_quotients(a);
    return out;
}

}  // namespace arnoldflow
