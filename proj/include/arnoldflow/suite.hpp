#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "arnoldflow/contfrac.hpp"
#include "arnoldflow/roof.hpp"

namespace arnoldflow {

// Accepts everything AlphaSource::parse does plus "constructed:G" and
// "constructed:G:saturated" (alpha built with witness gap G).
ContinuedFraction parse_alpha(const std::string& spec, int depth);

// Checks the suite can run. Birkhoff-sum families run through calibrate-freeze.
std::vector<std::string> suite_checks();

struct ExperimentConfig {
    std::string alpha = "constructed:3";
    int depth = 40;
    RoofSpec roof = canonical_roof();
    std::vector<std::string> checks;
    int samples = 10;
    std::uint64_t seed = 1;
    int workers = 1;
    double max_q = 1e5;           // largest return time for dk and flow checks
    double train_hi = 1e3;        // calibrate-freeze split
    double test_hi = 1e6;
    double growth_eps = 0.5;      // growth-law tolerance eps^2 r log r
    std::map<std::string, double> constants;  // frozen constants by estimate id
    std::string out_dir = ".";

    // Strict: unknown keys and wrong types raise ConfigInvalid.
    static ExperimentConfig from_json(const std::string& text);
    std::string to_json() const;
};

inline constexpr int kSummarySchema = 1;

// Fixed column order of the suite CSV.
inline constexpr const char* kSuiteCsvHeader =
    "check,instance,alpha,role,n,scale,x,measured,bound,margin,applicable,pass";

struct SuiteRow {
    std::string check;
    std::uint64_t instance = 0;
    std::string alpha;
    std::string role;  // verify | train | test
    int n = 0;
    double scale = 0;
    double x = 0;  // base point in turns, NaN when not applicable
    double measured = 0, bound = 0, margin = 0;
    bool applicable = true;
    bool pass = true;
};

struct SuiteResult {
    std::vector<SuiteRow> rows;
    std::map<std::string, double> constants;  // in force after calibration
    std::string csv;
    std::string summary_json;
    bool pass = true;
    int exit_code() const { return pass ? 0 : 1; }
};

SuiteResult run_suite(const ExperimentConfig& cfg);

std::string suite_csv(const std::vector<SuiteRow>& rows);

}  // namespace arnoldflow
