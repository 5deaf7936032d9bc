#include "arnoldflow/suite.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "arnoldflow/birkhoff.hpp"
#include "arnoldflow/calibrate.hpp"
#include "arnoldflow/errors.hpp"
#include "arnoldflow/numeric.hpp"
#include "arnoldflow/specialflow.hpp"

namespace arnoldflow {

using nlohmann::json;

ContinuedFraction parse_alpha(const std::string& spec, int depth) {
    const std::string tag = "constructed:";
    if (spec.rfind(tag, 0) == 0) {
        std::string rest = spec.substr(tag.size());
        auto profile = WitnessProfile::Minimal;
        if (auto c = rest.find(':'); c != std::string::npos) {
            std::string p = rest.substr(c + 1);
            if (p == "saturated") profile = WitnessProfile::Saturated;
            else if (p != "minimal") fail(ErrorKind::ConfigInvalid, "unknown witness profile '" + p + "'");
            rest = rest.substr(0, c);
        }
        int gap = 0;
        try {
            std::size_t used = 0;
            gap = std::stoi(rest, &used);
            if (used != rest.size()) throw std::invalid_argument(rest);
        } catch (const std::exception&) {
            fail(ErrorKind::ConfigInvalid, "witness gap must be an integer: '" + rest + "'");
        }
        return construct_alpha_in_D(gap, depth, profile).cf;
    }
    return cf_expand(AlphaSource::parse(spec), depth);
}

std::vector<std::string> suite_checks() {
    return {"dk", "special-times", "f-bound", "goodscale", "resonant", "higher-derivatives", "growth", "flow-laws"};
}

namespace {

std::optional<Family> calibrated_family(const std::string& check) {
    if (check == "special-times") return Family::SpecialTimes;
    if (check == "f-bound") return Family::FBound;
    if (check == "goodscale") return Family::GoodScale;
    if (check == "resonant") return Family::Resonant;
    if (check == "higher-derivatives") return Family::HigherDerivatives;
    return std::nullopt;
}

template <class T>
T get_as(const json& j, const std::string& key) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        fail(ErrorKind::ConfigInvalid, "wrong type for '" + key + "'");
    }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorKind::ConfigInvalid, std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) fail(ErrorKind::ConfigInvalid, "config must be a JSON object");
    ExperimentConfig c;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        const json& v = it.value();
        if (k == "alpha") c.alpha = get_as<std::string>(v, k);
        else if (k == "depth") c.depth = get_as<int>(v, k);
        else if (k == "roof") {
            if (v.is_string() && v.get<std::string>() == "canonical") c.roof = canonical_roof();
            else if (v.is_object()) c.roof = RoofSpec::from_json(v.dump());
            else fail(ErrorKind::ConfigInvalid, "roof must be \"canonical\" or an object");
        } else if (k == "checks") c.checks = get_as<std::vector<std::string>>(v, k);
        else if (k == "samples") c.samples = get_as<int>(v, k);
        else if (k == "seed") c.seed = get_as<std::uint64_t>(v, k);
        else if (k == "workers") c.workers = get_as<int>(v, k);
        else if (k == "max_q") c.max_q = get_as<double>(v, k);
        else if (k == "train_hi") c.train_hi = get_as<double>(v, k);
        else if (k == "test_hi") c.test_hi = get_as<double>(v, k);
        else if (k == "growth_eps") c.growth_eps = get_as<double>(v, k);
        else if (k == "constants") c.constants = get_as<std::map<std::string, double>>(v, k);
        else if (k == "out_dir") c.out_dir = get_as<std::string>(v, k);
        else fail(ErrorKind::ConfigInvalid, "unknown config key '" + k + "'");
    }
    auto known = suite_checks();
    for (const auto& ch : c.checks)
        if (std::find(known.begin(), known.end(), ch) == known.end()) fail(ErrorKind::ConfigInvalid, "unknown check '" + ch + "'");
    if (c.depth < 2) fail(ErrorKind::ConfigInvalid, "depth must be at least 2");
    if (c.samples < 1) fail(ErrorKind::ConfigInvalid, "samples must be positive");
    if (c.workers < 1) fail(ErrorKind::ConfigInvalid, "workers must be positive");
    if (!(c.max_q >= 10)) fail(ErrorKind::ConfigInvalid, "max_q must be at least 10");
    if (!(c.train_hi > 10 && c.test_hi > c.train_hi)) fail(ErrorKind::ConfigInvalid, "need 10 < train_hi < test_hi");
    if (!(c.growth_eps > 0 && c.growth_eps < 1)) fail(ErrorKind::ConfigInvalid, "growth_eps must lie in (0, 1)");
    return c;
}

namespace {

// Everything that determines the output; workers and out_dir are excluded.
json config_echo(const ExperimentConfig& c) {
    json j;
    j["alpha"] = c.alpha;
    j["depth"] = c.depth;
    j["roof"] = json::parse(c.roof.to_json());
    j["checks"] = c.checks;
    j["samples"] = c.samples;
    j["seed"] = c.seed;
    j["max_q"] = c.max_q;
    j["train_hi"] = c.train_hi;
    j["test_hi"] = c.test_hi;
    j["growth_eps"] = c.growth_eps;
    j["constants"] = c.constants;
    return j;
}

}  // namespace

std::string ExperimentConfig::to_json() const {
    json j = config_echo(*this);
    j["workers"] = workers;
    j["out_dir"] = out_dir;
    return j.dump(2);
}

namespace {

std::uint64_t check_stream(const std::string& check) {
    auto all = suite_checks();
    return static_cast<std::uint64_t>(std::find(all.begin(), all.end(), check) - all.begin()) << 32;
}

CirclePoint random_point(Rng& rng) {
    u128 hi = rng();
    return CirclePoint{(hi << 64) | rng()};
}

SuiteRow row_of(const LemmaReport& r, const std::string& check, std::uint64_t inst, const std::string& alpha, int n,
                double scale, double x) {
    SuiteRow row;
    row.check = check;
    row.instance = inst;
    row.alpha = alpha;
    row.role = "verify";
    row.n = n;
    row.scale = scale;
    row.x = x;
    row.measured = r.measured;
    row.bound = r.bound;
    row.margin = r.margin;
    row.applicable = r.applicable;
    row.pass = r.pass;
    return row;
}

using InstanceBody = std::function<std::vector<SuiteRow>(std::uint64_t instance, Rng& rng)>;

std::vector<SuiteRow> fan_out(const ExperimentConfig& cfg, const std::string& check, const InstanceBody& body) {
    std::vector<std::vector<SuiteRow>> slots(static_cast<std::size_t>(cfg.samples));
    parallel_for(slots.size(), cfg.workers, [&](std::size_t i) {
        Rng rng = instance_rng(cfg.seed, check_stream(check) + i);
        slots[i] = body(i, rng);
    });
    std::vector<SuiteRow> out;
    for (auto& s : slots) out.insert(out.end(), s.begin(), s.end());
    return out;
}

std::vector<SuiteRow> run_dk(const ExperimentConfig& cfg, const ContinuedFraction& cf) {
    RoofSpec f = cfg.roof.normalized();
    return fan_out(cfg, "dk", [&](std::uint64_t inst, Rng& rng) {
        std::vector<SuiteRow> rows;
        CirclePoint x = random_point(rng);
        for (int n = 1; n < cf.depth() && cf.q_double(n) <= cfg.max_q; ++n) {
            double q = cf.q_double(n);
            std::pair<std::string, BVFunction> probes[] = {{"dk.truncated", bv_from_truncated(truncate(f, cf, n, 0))},
                                                           {"dk.truncated-derivative", bv_from_truncated(truncate(f, cf, n, 1))},
                                                           {"dk.cos", bv_trig(1, 1, 0, 0.5)}};
            for (const auto& [id, g] : probes)
                rows.push_back(row_of(denjoy_koksma_check(g, x, n, cf), id, inst, cfg.alpha, n, q, x.value()));
        }
        return rows;
    });
}

std::vector<SuiteRow> run_growth(const ExperimentConfig& cfg, const ContinuedFraction& cf) {
    RoofSpec f = cfg.roof.normalized();
    return fan_out(cfg, "growth", [&](std::uint64_t inst, Rng& rng) {
        std::vector<SuiteRow> rows;
        CirclePoint x = random_point(rng);
        for (int n = 1; n + 1 <= cf.depth() && cf.q_double(n + 1) <= 10 * cfg.max_q; ++n) {
            if (cf.q_double(n) < 100) continue;
            auto r = cf.qn(n + 1);
            SuiteRow row;
            try {
                row = row_of(verify_fprime_far(f, x, r, n, 1.0, cfg.growth_eps, cf), "growth", inst, cfg.alpha, n,
                             static_cast<double>(r), x.value());
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::HypothesisFailed) throw;
                row = row_of(LemmaReport{}, "growth", inst, cfg.alpha, n, static_cast<double>(r), x.value());
                row.applicable = false;
            }
            rows.push_back(row);
        }
        return rows;
    });
}

std::vector<SuiteRow> run_flow(const ExperimentConfig& cfg, const ContinuedFraction& cf) {
    FlowRoof f = FlowRoof::from(cfg.roof.normalized());
    return fan_out(cfg, "flow-laws", [&](std::uint64_t inst, Rng& rng) {
        std::vector<SuiteRow> rows;
        CirclePoint z = random_point(rng);
        FlowPoint p{z, uniform01(rng) * f.eval(z)};
        double span = std::min(cfg.max_q, 1e4);
        double s = (2 * uniform01(rng) - 1) * span, t = (2 * uniform01(rng) - 1) * span;
        FlowPoint a = evolve(f, evolve(f, p, s, cf), t, cf);
        FlowPoint b = evolve(f, p, s + t, cf);
        LemmaReport semi;
        semi.measured = (a.z - b.z).dist() + std::fabs(a.r - b.r);
        semi.bound = 1e-8;
        semi.margin = semi.bound - semi.measured;
        semi.pass = semi.measured < semi.bound;
        rows.push_back(row_of(semi, "flow-semigroup", inst, cfg.alpha, 0, std::fabs(s) + std::fabs(t), z.value()));
        double c = 0.5 + 1.5 * uniform01(rng);
        LemmaReport resc = verify_rescaling(f, c, p, t, cf);
        for (const auto& sub : resc.sub)
            rows.push_back(row_of(sub, "flow-" + sub.lemma_id, inst, cfg.alpha, 0, std::fabs(t), z.value()));
        return rows;
    });
}

std::string cell(double v) { return std::isnan(v) ? "" : format_double(v); }

}  // namespace

std::string suite_csv(const std::vector<SuiteRow>& rows) {
    std::ostringstream os;
    os << kSuiteCsvHeader << '\n';
    for (const auto& r : rows)
        os << r.check << ',' << r.instance << ',' << r.alpha << ',' << r.role << ',' << r.n << ',' << cell(r.scale) << ','
           << cell(r.x) << ',' << cell(r.measured) << ',' << cell(r.bound) << ',' << cell(r.margin) << ','
           << (r.applicable ? 1 : 0) << ',' << (r.pass ? 1 : 0) << '\n';
    return os.str();
}

SuiteResult run_suite(const ExperimentConfig& cfg) {
    SuiteResult res;
    std::vector<Family> families;
    std::set<std::string> seen;
    std::optional<ContinuedFraction> cf;
    auto alpha = [&]() -> const ContinuedFraction& {
        if (!cf) cf = parse_alpha(cfg.alpha, cfg.depth);
        return *cf;
    };
    for (const auto& check : cfg.checks) {
        if (!seen.insert(check).second) continue;
        if (auto fam = calibrated_family(check)) {
            families.push_back(*fam);
            continue;
        }
        std::vector<SuiteRow> rows;
        if (check == "dk") rows = run_dk(cfg, alpha());
        else if (check == "growth") rows = run_growth(cfg, alpha());
        else if (check == "flow-laws") rows = run_flow(cfg, alpha());
        else fail(ErrorKind::ConfigInvalid, "unknown check '" + check + "'");
        res.rows.insert(res.rows.end(), rows.begin(), rows.end());
    }
    json calib = json::array();
    if (!families.empty()) {
        CalibrationConfig cc;
        cc.seed = cfg.seed;
        cc.samples = cfg.samples;
        cc.train_hi = cfg.train_hi;
        cc.test_hi = cfg.test_hi;
        cc.workers = cfg.workers;
        cc.overrides = cfg.constants;
        CalibrationRun run = calibrate_freeze(cfg.roof, families, cc);
        for (const auto& r : run.rows) {
            SuiteRow row;
            row.check = r.estimate;
            row.instance = r.instance;
            row.alpha = r.alpha;
            row.role = r.train ? "train" : "test";
            row.n = r.n;
            row.scale = r.scale;
            row.x = std::nan("");
            row.measured = r.measured;
            row.bound = r.constant * r.shape;
            row.margin = r.margin;
            row.pass = r.pass;
            res.rows.push_back(row);
        }
        for (const auto& o : run.outcomes) {
            res.constants[o.estimate] = o.constant;
            calib.push_back({{"estimate", o.estimate},
                             {"lower", o.lower},
                             {"constant", o.constant},
                             {"overridden", o.overridden},
                             {"train_rows", o.train_count},
                             {"test_rows", o.test_count},
                             {"test_failures", o.test_failures},
                             {"min_test_margin", o.min_test_margin},
                             {"pass", o.pass()}});
            if (!o.pass()) res.pass = false;
        }
    }
    std::map<std::string, std::array<int, 4>> counts;  // rows, applicable, passed, failed
    for (const auto& r : res.rows) {
        auto& c = counts[r.check];
        ++c[0];
        if (!r.applicable) continue;
        ++c[1];
        if (r.pass) ++c[2];
        else ++c[3];
        if (!r.pass && r.role != "train") res.pass = false;
    }
    json summary;
    summary["schema"] = kSummarySchema;
    summary["config"] = config_echo(cfg);
    json checks = json::object();
    for (const auto& [k, c] : counts) checks[k] = {{"rows", c[0]}, {"applicable", c[1]}, {"passed", c[2]}, {"failed", c[3]}};
    summary["checks"] = checks;
    summary["constants"] = res.constants;
    summary["calibration"] = calib;
    summary["budgets"] = {{"samples", cfg.samples}, {"depth", cfg.depth}, {"max_q", cfg.max_q},
                          {"train_hi", cfg.train_hi}, {"test_hi", cfg.test_hi}, {"rows", res.rows.size()}};
    summary["pass"] = res.pass;
    res.summary_json = summary.dump(2) + "\n";
    res.csv = suite_csv(res.rows);
    return res;
}

}  // namespace arnoldflow
