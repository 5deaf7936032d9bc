#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "arnoldflow/specialflow.hpp"

namespace arnoldflow {

inline constexpr std::uint64_t kSieveLimit = 100'000'000;

class MobiusTable {
public:
    MobiusTable() = default;
    explicit MobiusTable(std::vector<std::int8_t> mu) : mu_(std::move(mu)) {}
    std::uint64_t limit() const { return mu_.empty() ? 0 : mu_.size() - 1; }
    int operator()(std::uint64_t n) const { return mu_.at(n); }  // mu(0) stored as 0

private:
    std::vector<std::int8_t> mu_;
};

// Segmented sieve; BudgetExceeded above kSieveLimit.
MobiusTable mobius_sieve(std::uint64_t N);
std::int64_t mertens(const MobiusTable& table, std::uint64_t N);
std::int64_t mertens(std::uint64_t N);

// (1/N) sum_{n<=N} a_{pn} conj(a_{qn}); a is indexed from 0 and needs size > qN.
std::complex<double> kbsz_sum(const std::vector<std::complex<double>>& a, std::uint64_t p, std::uint64_t q,
                              std::uint64_t N);
double kbsz_sum(const std::vector<double>& a, std::uint64_t p, std::uint64_t q, std::uint64_t N);

// Step observables of the flow point.
using Observable = std::function<double(const FlowPoint&)>;
Observable constant_observable(double c);
// +1 on the lower half of each fibre, -1 on the upper half; mean zero for the
// invariant measure since the relative height r / f(z) is uniform on each fibre.
Observable height_band_observable(const FlowRoof& f);
// indicator of lo <= z < hi (base interval, in turns)
Observable base_interval_observable(double lo, double hi);

// F(T_{n t0} x0) for n = 0..n_max, stepping the flow by t0.
std::vector<double> flow_samples(const FlowRoof& f, const Observable& F, FlowPoint x0, double t0, std::uint64_t n_max,
                                 const ContinuedFraction& cf);

// (1/N) sum_{1<=n<=N} s_n mu(n)
double orthogonality_sum(const std::vector<double>& s, const MobiusTable& table, std::uint64_t N);
double orthogonality_sum(const FlowRoof& f, const Observable& F, FlowPoint x0, double t0, const MobiusTable& table,
                         std::uint64_t N, const ContinuedFraction& cf);

// (1/M) sum_{M<=m<2M} |(1/H) sum_{m<=h<m+H} s_h mu(h)|
double usic_statistic(const std::vector<double>& s, const MobiusTable& table, std::uint64_t M, std::uint64_t H);

// Moving-orbit blocks: (1/b_K) sum_{k<K} |sum_{b_k<=n<b_{k+1}} block(k)[n - b_k] mu(n)|,
// block(k) returning the b_{k+1} - b_k values f(T^n x_k).
using BlockSource = std::function<std::vector<double>(std::size_t k, std::uint64_t lo, std::uint64_t hi)>;
double momo_statistic(const std::vector<std::uint64_t>& b, const BlockSource& block, const MobiusTable& table);

}  // namespace arnoldflow
