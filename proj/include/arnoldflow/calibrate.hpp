#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "arnoldflow/birkhoff.hpp"

namespace arnoldflow {

// Estimate families whose constants are fitted on small scales and then
// frozen for the larger ones.
enum class Family { SpecialTimes, FBound, GoodScale, Resonant, HigherDerivatives };

std::string family_name(Family f);
Family family_from_name(const std::string& name);
std::vector<Family> all_families();

struct CalibrationConfig {
    std::uint64_t seed = 1;
    int samples = 10;  // per scale
    double safety = 2;
    double train_lo = 10, train_hi = 1e3;  // scale in [train_lo, train_hi] trains
    double test_hi = 1e6;                  // scale in (train_hi, test_hi] tests
    int workers = 1;
    double goodscale_eps = 0.5;
    double higher_eps = 0.01;
    double close_return_threshold = 0.4;
    // estimate id -> constant used instead of the fitted one
    std::map<std::string, double> overrides;
};

// One measured inequality: measured <= C shape (or >= for lower bounds).
struct CalibrationRow {
    std::string estimate;
    std::string alpha;
    bool train = true;
    bool lower = false;
    int n = 0;
    double scale = 0;
    std::uint64_t instance = 0;
    double measured = 0;
    double shape = 0;
    double constant = 0;  // frozen constant, filled after fitting
    double margin = 0;
    bool pass = true;
    double ratio() const { return shape > 0 ? measured / shape : 0.0; }
};

struct CalibrationOutcome {
    std::string estimate;
    bool lower = false;
    double constant = 0;
    bool overridden = false;
    int train_count = 0, test_count = 0, test_failures = 0;
    double train_extreme = 0;  // max ratio (min for lower bounds)
    double test_extreme = 0;
    double min_test_margin = 0;
    bool pass() const { return test_failures == 0 && test_count > 0; }
};

struct CalibrationRun {
    std::vector<CalibrationRow> rows;
    std::vector<CalibrationOutcome> outcomes;
    bool pass() const;
};

CalibrationRun calibrate_freeze(const RoofSpec& f, const std::vector<Family>& families, const CalibrationConfig& cfg);

}  // namespace arnoldflow
