#include "arnoldflow/mobius.hpp"

#include <algorithm>
#include <cmath>

#include "arnoldflow/errors.hpp"
#include "arnoldflow/numeric.hpp"

namespace arnoldflow {

namespace {

constexpr std::uint64_t kSegment = 1 << 18;

std::vector<std::uint64_t> small_primes(std::uint64_t n) {
    std::vector<bool> comp(n + 1, false);
    std::vector<std::uint64_t> out;
    for (std::uint64_t i = 2; i <= n; ++i) {
        if (comp[i]) continue;
        out.push_back(i);
        for (std::uint64_t j = i * i; j <= n; j += i) comp[j] = true;
    }
    return out;
}

}  // namespace

MobiusTable mobius_sieve(std::uint64_t N) {
    if (N > kSieveLimit) fail(ErrorKind::BudgetExceeded, "sieve limit is 1e8");
    std::vector<std::int8_t> mu(N + 1, 0);
    if (N == 0) return MobiusTable(std::move(mu));
    auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(N)));
    while (root * root > N) --root;
    while ((root + 1) * (root + 1) <= N) ++root;
    const auto primes = small_primes(root);
    std::vector<std::uint64_t> rem(kSegment);
    std::vector<std::int8_t> sign(kSegment);
    for (std::uint64_t lo = 1; lo <= N; lo += kSegment) {
        std::uint64_t hi = std::min(N + 1, lo + kSegment);
        std::size_t len = hi - lo;
        for (std::size_t i = 0; i < len; ++i) {
            rem[i] = lo + i;
            sign[i] = 1;
        }
        for (std::uint64_t p : primes) {
            if (p * p > hi - 1) break;
            for (std::uint64_t m = (lo + p - 1) / p * p; m < hi; m += p) {
                sign[m - lo] = static_cast<std::int8_t>(-sign[m - lo]);
                rem[m - lo] /= p;
            }
            std::uint64_t p2 = p * p;
            for (std::uint64_t m = (lo + p2 - 1) / p2 * p2; m < hi; m += p2) sign[m - lo] = 0;
        }
        // at most one prime factor above sqrt(n) remains
        for (std::size_t i = 0; i < len; ++i) mu[lo + i] = static_cast<std::int8_t>(rem[i] > 1 ? -sign[i] : sign[i]);
    }
    return MobiusTable(std::move(mu));
}

std::int64_t mertens(const MobiusTable& table, std::uint64_t N) {
    if (N > table.limit()) fail(ErrorKind::SequenceTooShort, "table shorter than N");
    std::int64_t s = 0;
    for (std::uint64_t n = 1; n <= N; ++n) s += table(n);
    return s;
}

std::int64_t mertens(std::uint64_t N) { return mertens(mobius_sieve(N), N); }

namespace {

template <class T>
void require_kbsz(const std::vector<T>& a, std::uint64_t p, std::uint64_t q, std::uint64_t N) {
    if (p == q) fail(ErrorKind::InvalidArgument, "p and q must differ");
    if (N == 0) fail(ErrorKind::InvalidArgument, "N must be positive");
    if (a.size() <= std::max(p, q) * N) fail(ErrorKind::SequenceTooShort, "sequence must reach max(p, q) N");
}

}  // namespace

std::complex<double> kbsz_sum(const std::vector<std::complex<double>>& a, std::uint64_t p, std::uint64_t q,
                              std::uint64_t N) {
    require_kbsz(a, p, q, N);
    CompensatedSum re, im;
    for (std::uint64_t n = 1; n <= N; ++n) {
        auto v = a[p * n] * std::conj(a[q * n]);
        re.add(v.real());
        im.add(v.imag());
    }
    return {re.value() / static_cast<double>(N), im.value() / static_cast<double>(N)};
}

double kbsz_sum(const std::vector<double>& a, std::uint64_t p, std::uint64_t q, std::uint64_t N) {
    require_kbsz(a, p, q, N);
    CompensatedSum s;
    for (std::uint64_t n = 1; n <= N; ++n) s.add(a[p * n] * a[q * n]);
    return s.value() / static_cast<double>(N);
}

Observable constant_observable(double c) {
    return [c](const FlowPoint&) { return c; };
}

Observable height_band_observable(const FlowRoof& f) {
    return [f](const FlowPoint& p) { return p.r < 0.5 * f.eval(p.z) ? 1.0 : -1.0; };
}

Observable base_interval_observable(double lo, double hi) {
    return [lo, hi](const FlowPoint& p) {
        double z = p.z.value();
        return lo <= z && z < hi ? 1.0 : 0.0;
    };
}

std::vector<double> flow_samples(const FlowRoof& f, const Observable& F, FlowPoint x0, double t0, std::uint64_t n_max,
                                 const ContinuedFraction& cf) {
    if (n_max > kSieveLimit) fail(ErrorKind::BudgetExceeded, "at most 1e8 flow samples");
    std::vector<double> out;
    out.reserve(n_max + 1);
    FlowPoint p = x0;
    out.push_back(F(p));
    for (std::uint64_t n = 1; n <= n_max; ++n) {
        p = evolve(f, p, t0, cf);
        out.push_back(F(p));
    }
    return out;
}

double orthogonality_sum(const std::vector<double>& s, const MobiusTable& table, std::uint64_t N) {
    if (N == 0) fail(ErrorKind::InvalidArgument, "N must be positive");
    if (s.size() <= N || table.limit() < N) fail(ErrorKind::SequenceTooShort, "sequence or table shorter than N");
    CompensatedSum acc;
    for (std::uint64_t n = 1; n <= N; ++n) acc.add(s[n] * table(n));
    return acc.value() / static_cast<double>(N);
}

double orthogonality_sum(const FlowRoof& f, const Observable& F, FlowPoint x0, double t0, const MobiusTable& table,
                         std::uint64_t N, const ContinuedFraction& cf) {
    return orthogonality_sum(flow_samples(f, F, x0, t0, N, cf), table, N);
}

double usic_statistic(const std::vector<double>& s, const MobiusTable& table, std::uint64_t M, std::uint64_t H) {
    if (H < 2 || 10 * H > M) fail(ErrorKind::InvalidArgument, "need 2 <= H <= M / 10");
    std::uint64_t end = 2 * M + H;
    if (s.size() < end || table.limit() + 1 < end) fail(ErrorKind::SequenceTooShort, "need values up to 2M + H");
    // prefix[h] = sum_{j < h} s_j mu(j), accumulated in long double over [M, 2M + H)
    std::vector<long double> prefix(end - M + 1, 0);
    for (std::uint64_t h = M; h < end; ++h) prefix[h - M + 1] = prefix[h - M] + static_cast<long double>(s[h]) * table(h);
    CompensatedSum acc;
    for (std::uint64_t m = M; m < 2 * M; ++m) {
        long double w = prefix[m + H - M] - prefix[m - M];
        acc.add(std::fabs(static_cast<double>(w)) / static_cast<double>(H));
    }
    return acc.value() / static_cast<double>(M);
}

double momo_statistic(const std::vector<std::uint64_t>& b, const BlockSource& block, const MobiusTable& table) {
    if (b.size() < 2) fail(ErrorKind::InvalidArgument, "need at least one block");
    if (table.limit() + 1 < b.back()) fail(ErrorKind::SequenceTooShort, "table shorter than the last block");
    CompensatedSum acc;
    for (std::size_t k = 0; k + 1 < b.size(); ++k) {
        if (b[k + 1] <= b[k]) fail(ErrorKind::InvalidArgument, "block boundaries must increase");
        auto v = block(k, b[k], b[k + 1]);
        if (v.size() != b[k + 1] - b[k]) fail(ErrorKind::SequenceTooShort, "block source returned the wrong length");
        CompensatedSum inner;
        for (std::uint64_t n = b[k]; n < b[k + 1]; ++n) inner.add(v[n - b[k]] * table(n));
        acc.add(std::fabs(inner.value()));
    }
    return acc.value() / static_cast<double>(b.back());
}

}  // namespace arnoldflow
