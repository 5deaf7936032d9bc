#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <map>
#include <numeric>

#include "arnoldflow/contfrac.hpp"
#include "arnoldflow/errors.hpp"

using namespace arnoldflow;
using Float50 = boost::multiprecision::cpp_bin_float_50;

namespace {

std::vector<std::uint64_t> q_prefix(const ContinuedFraction& cf, int count) {
    std::vector<std::uint64_t> v;
    for (int n = 0; n < count; ++n) v.push_back(cf.qn(n));
    return v;
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::InvalidArgument;
}

// ‖q alpha‖ evaluated directly from a 50-digit value of alpha
double float_dist(const Float50& alpha, std::uint64_t q) {
    Float50 v = alpha * q;
    Float50 frac = v - floor(v);
    Float50 d = frac < 0.5 ? frac : 1 - frac;
    return d.convert_to<double>();
}

}  // namespace

TEST_CASE("convergent denominators for the basic examples") {
    auto golden = cf_expand(AlphaSource::golden(), 7);
    CHECK(q_prefix(golden, 7) == std::vector<std::uint64_t>{1, 1, 2, 3, 5, 8, 13});
    for (auto a : golden.quotients) CHECK(a == 1);

    auto s2 = cf_expand(AlphaSource::sqrt2_minus_1(), 5);
    CHECK(q_prefix(s2, 5) == std::vector<std::uint64_t>{1, 2, 5, 12, 29});

    auto ex = cf_expand(AlphaSource::parse("[2,3,1]"), 3);
    CHECK(ex.quotients == std::vector<std::uint64_t>{2, 3, 1});
    CHECK(q_prefix(ex, 4) == std::vector<std::uint64_t>{1, 2, 7, 9});
}

TEST_CASE("recurrence and coprimality hold exactly") {
    for (auto src : {AlphaSource::golden(), AlphaSource::sqrt2_minus_1(), AlphaSource::parse("quad:1,2,7,5")}) {
        auto cf = cf_expand(src, 40);
        for (int n = 1; n < cf.depth(); ++n) {
            CHECK(cf.q[n + 1] == BigInt(cf.quotients[n]) * cf.q[n] + cf.q[n - 1]);
            CHECK(cf.p[n + 1] == BigInt(cf.quotients[n]) * cf.p[n] + cf.p[n - 1]);
            CHECK(boost::multiprecision::gcd(cf.p[n], cf.q[n]) == 1);
            BigInt det = cf.p[n] * cf.q[n - 1] - cf.p[n - 1] * cf.q[n];
            CHECK(det == ((n % 2 == 1) ? 1 : -1));
        }
    }
}

TEST_CASE("quadratic expansions match a floating oracle") {
    // (1 + 2 sqrt 7)/5 = 1.258...; quotients of the fractional part
    auto cf = cf_expand(AlphaSource::parse("quad:1,2,7,5"), 12);
    Float50 x = (1 + 2 * sqrt(Float50(7))) / 5;
    x -= floor(x);
    for (int k = 0; k < 12; ++k) {
        x = 1 / x;
        Float50 a = floor(x);
        CHECK(cf.quotients[k] == a.convert_to<std::uint64_t>());
        x -= a;
    }
    // negative b: (3 - sqrt 2)/1 = 1.5857...
    auto neg = cf_expand(AlphaSource::parse("quad:3,-1,2,1"), 8);
    Float50 y = 3 - sqrt(Float50(2));
    y -= floor(y);
    for (int k = 0; k < 8; ++k) {
        y = 1 / y;
        Float50 a = floor(y);
        CHECK(neg.quotients[k] == a.convert_to<std::uint64_t>());
        y -= a;
    }
}

TEST_CASE("rational quadratic inputs are rejected") {
    CHECK(kind_of([] { cf_expand(AlphaSource::parse("quad:1,1,4,3"), 5); }) == ErrorKind::RationalInput);
    CHECK(kind_of([] { cf_expand(AlphaSource::parse("quad:1,0,5,3"), 5); }) == ErrorKind::RationalInput);
}

TEST_CASE("decimal literals certify quotients or refuse") {
    auto cf = cf_expand(AlphaSource::parse("0.41421356237309504880168872420969807856967187537694"), 20);
    for (auto a : cf.quotients) CHECK(a == 2);
    CHECK(kind_of([] { cf_expand(AlphaSource::parse("0.41421356"), 20); }) == ErrorKind::InsufficientPrecision);
    CHECK(kind_of([] { cf_expand(AlphaSource::parse("0.5"), 3); }) == ErrorKind::RationalInput);
    CHECK(kind_of([] { cf_expand(AlphaSource::parse("0.25"), 4); }) == ErrorKind::RationalInput);
}

TEST_CASE("dist_qn_alpha is certified and matches the extended precision oracle") {
    auto s2 = cf_expand(AlphaSource::sqrt2_minus_1(), 30);
    auto d1 = dist_qn_alpha(s2, 1);
    CHECK(d1.strictly_inside);
    CHECK(d1.lo == doctest::Approx(0.17157).epsilon(1e-4));
    CHECK(d1.lo > 0.1);
    CHECK(d1.hi < 0.2);

    auto g = cf_expand(AlphaSource::golden(), 30);
    auto d2 = dist_qn_alpha(g, 2);
    CHECK(d2.strictly_inside);
    CHECK(d2.lo > 1.0 / 6);
    CHECK(d2.hi < 1.0 / 3);

    Float50 alpha_s2 = sqrt(Float50(2)) - 1;
    Float50 alpha_g = (sqrt(Float50(5)) - 1) / 2;
    for (int n = 1; n < 28; ++n) {
        auto r = dist_qn_alpha(s2, n);
        CHECK(r.strictly_inside);
        double oracle = float_dist(alpha_s2, s2.qn(n));
        CHECK(r.lo <= oracle);
        CHECK(oracle <= r.hi);
        auto rg = dist_qn_alpha(g, n);
        double og = float_dist(alpha_g, g.qn(n));
        CHECK(rg.lo <= og);
        CHECK(og <= rg.hi);
    }
    CHECK(kind_of([&] { dist_qn_alpha(g, 29); }) == ErrorKind::DepthExceeded);
}

TEST_CASE("golden n = 0 sits outside the open bound") {
    // q_0 = q_1 = 1: ‖alpha‖ = 0.38 < 1/2, the bound needs q_1 > q_0
    auto g = cf_expand(AlphaSource::golden(), 10);
    CHECK_FALSE(dist_qn_alpha(g, 0).strictly_inside);
    auto s2 = cf_expand(AlphaSource::sqrt2_minus_1(), 10);
    CHECK(dist_qn_alpha(s2, 0).strictly_inside);
}

TEST_CASE("ostrowski examples") {
    auto g = cf_expand(AlphaSource::golden(), 12);
    auto d = ostrowski_encode(10, g);
    for (std::size_t j = 0; j < d.digits.size(); ++j) CHECK(d.digits[j] == ((j == 5 || j == 2) ? 1u : 0u));
    CHECK(ostrowski_decode(d) == 10);

    for (int m = 1; m < g.depth(); ++m) {
        auto e = ostrowski_encode(g.qn(m), g);
        CHECK(e.highest() == m);
        CHECK(e.digits[m] == 1);
    }

    OstrowskiDigits zero{std::vector<std::uint64_t>(12, 0), &g};
    CHECK(kind_of([&] { ostrowski_decode(zero); }) == ErrorKind::InvalidDigits);
    OstrowskiDigits bad{std::vector<std::uint64_t>(12, 0), &g};
    bad.digits[1] = g.a(2);
    bad.digits[2] = 1;
    CHECK(kind_of([&] { ostrowski_decode(bad); }) == ErrorKind::InvalidDigits);
    CHECK(kind_of([&] { ostrowski_encode(g.qn(12), g); }) == ErrorKind::NotRepresentable);
}

TEST_CASE("every valid digit vector hits a distinct integer below q_K") {
    // enumerate all valid digit strings by brute force and compare against encode
    for (auto src : {AlphaSource::parse("[2,3,1,2,4,1,3]"), AlphaSource::golden()}) {
        auto cf = cf_expand(src, 7);
        std::map<std::uint64_t, int> hits;
        std::vector<std::uint64_t> digits(cf.depth(), 0);
        std::function<void(int)> rec = [&](int j) {
            if (j == cf.depth()) {
                OstrowskiDigits d{digits, &cf};
                if (d.highest() < 0) return;
                try {
                    validate_digits(d);
                } catch (const Error&) {
                    return;
                }
                std::uint64_t n = 0;
                for (int k = 0; k < cf.depth(); ++k) n += digits[k] * cf.qn(k);
                hits[n]++;
                return;
            }
            for (std::uint64_t b = 0; b <= cf.quotients[j]; ++b) {
                digits[j] = b;
                rec(j + 1);
            }
            digits[j] = 0;
        };
        rec(0);
        std::uint64_t qK = cf.qn(cf.depth());
        CHECK(hits.size() == qK - 1);
        for (auto& [n, c] : hits) {
            CHECK(c == 1);
            CHECK(n < qK);
            auto enc = ostrowski_encode(n, cf);
            std::uint64_t back = 0;
            for (int k = 0; k < cf.depth(); ++k) back += enc.digits[k] * cf.qn(k);
            CHECK(back == n);
        }
    }
}

TEST_CASE("diophantine report and constructor") {
    auto built = construct_alpha_in_D(3, 30);
    auto rep = check_diophantine(built.cf);
    CHECK(rep.witness_indices().size() >= 9);
    CHECK(rep.violations_past_prefix() == 0);
    for (int n : built.witness_indices) CHECK(rep.d2_witness[n]);
    for (int n = 1; n < built.cf.depth(); ++n) CHECK(built.cf.q[n + 1] >= built.cf.q[n] + built.cf.q[n - 1]);

    auto plain = construct_alpha_in_D(31, 30);
    CHECK(plain.witness_indices.empty());
    for (auto a : plain.cf.quotients) CHECK(a == 1);

    auto sat = construct_alpha_in_D(3, 30, WitnessProfile::Saturated);
    CHECK(check_diophantine(sat.cf).violations_past_prefix() == 0);

    auto g = cf_expand(AlphaSource::golden(), 40);
    auto gr = check_diophantine(g);
    for (int n : gr.witness_indices()) CHECK(g.q[n] < 100);
    for (int n = 0; n < g.depth(); ++n) {
        double qn = g.q_double(n), qn1 = g.q_double(n + 1);
        bool expect = qn >= 2 && qn1 <= qn * std::pow(std::log(qn), 0.875);
        CHECK(gr.in_k_alpha[n] == expect);
    }
    CHECK(gr.d_alpha >= 1.0);
}
