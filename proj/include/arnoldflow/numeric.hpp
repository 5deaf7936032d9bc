#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>

namespace arnoldflow {

// Neumaier variant of Kahan summation.
class CompensatedSum {
public:
    void add(double v) {
        double t = sum_ + v;
        if (std::fabs(sum_) >= std::fabs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Runs body(i) for i in [0, count) on up to `workers` threads. Each index is
// processed exactly once; callers write into per-index slots so the result
// does not depend on scheduling.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body);

int default_workers();

using Rng = std::mt19937_64;

// Independent stream for instance `index` under a master seed.
Rng instance_rng(std::uint64_t seed, std::uint64_t index);

double uniform01(Rng& rng);

// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace arnoldflow
