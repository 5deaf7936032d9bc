#include "arnoldflow/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "arnoldflow/errors.hpp"
#include "arnoldflow/numeric.hpp"

namespace arnoldflow {

namespace {

struct NamedAlpha {
    std::string name;
    ContinuedFraction cf;
};

// Golden-mean quotients except a_{m+1} = 1500: q_m is the only large return gap.
ContinuedFraction single_boost(int m) {
    std::vector<std::uint64_t> a(static_cast<std::size_t>(m) + 40, 1);
    a[static_cast<std::size_t>(m)] = 1500;
    return cf_from_quotients(a);
}

constexpr int kFirstBoost = 4;
constexpr int kBoostPositions[] = {6, 9, 12, 15, 18, 21, 24, 27};

const std::vector<NamedAlpha>& alpha_pool() {
    static const std::vector<NamedAlpha> pool = [] {
        std::vector<NamedAlpha> p = {
            {"constructed-3", construct_alpha_in_D(3, 40).cf},
            {"golden", cf_expand(AlphaSource::golden(), 60)},
            {"saturated-2", construct_alpha_in_D(2, 40, WitnessProfile::Saturated).cf},
            {"saturated-3", construct_alpha_in_D(3, 40, WitnessProfile::Saturated).cf},
        };
        for (int m : kBoostPositions) p.push_back({"boost-" + std::to_string(m), single_boost(m)});
        return p;
    }();
    return pool;
}

struct Task {
    Family family;
    int alpha = 0;
    int n = 0;
    double scale = 0;
    bool train = true;
};

CirclePoint random_point(Rng& rng) {
    u128 hi = rng();
    return CirclePoint{(hi << 64) | rng()};
}

double log_uniform(Rng& rng, double lo, double hi) {
    return std::exp(std::log(lo) + uniform01(rng) * (std::log(hi) - std::log(lo)));
}

std::uint64_t uniform_int(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
    return lo + static_cast<std::uint64_t>(uniform01(rng) * static_cast<double>(hi - lo + 1));
}

CalibrationRow row_from(const LemmaReport& r, const Task& t, const std::string& alpha, bool lower = false) {
    CalibrationRow row;
    row.estimate = r.lemma_id;
    row.alpha = alpha;
    row.train = t.train;
    row.lower = lower;
    row.n = t.n;
    row.scale = t.scale;
    row.measured = r.measured;
    row.shape = r.shape;
    return row;
}

void collect(const LemmaReport& r, const Task& t, const std::string& alpha, std::vector<CalibrationRow>& out) {
    if (r.applicable && r.shape > 0) {
        bool lower = r.lemma_id.size() > 6 && r.lemma_id.ends_with(".lower");
        out.push_back(row_from(r, t, alpha, lower));
    }
    for (const auto& s : r.sub) collect(s, t, alpha, out);
}

class Planner {
public:
    Planner(const CalibrationConfig& cfg) : cfg_(cfg) {}

    // 0 = skip, 1 = train, 2 = test
    int phase(double scale) const {
        if (scale >= cfg_.train_lo && scale <= cfg_.train_hi) return 1;
        if (scale > cfg_.train_hi && scale <= cfg_.test_hi) return 2;
        return 0;
    }

    void add(std::vector<Task>& tasks, Family fam, int alpha, int n, double scale) const {
        int ph = phase(scale);
        if (ph == 0) return;
        for (int s = 0; s < cfg_.samples; ++s) tasks.push_back({fam, alpha, n, scale, ph == 1});
    }

private:
    const CalibrationConfig& cfg_;
};

bool witness_scale(const ContinuedFraction& cf, int n) {
    double q = cf.q_double(n), q1 = cf.q_double(n + 1);
    return q >= 3 && q * std::log(q) < q1;
}

std::vector<Task> plan(const std::vector<Family>& families, const CalibrationConfig& cfg) {
    Planner p(cfg);
    std::vector<Task> tasks;
    const auto& pool = alpha_pool();
    for (Family fam : families) {
        switch (fam) {
            case Family::SpecialTimes:
            case Family::Resonant:
                for (int a : {0, 1})
                    for (int n = 0; n + 1 < pool[a].cf.depth() && pool[a].cf.q_double(n) <= cfg.test_hi; ++n)
                        p.add(tasks, fam, a, n, pool[a].cf.q_double(n));
                break;
            case Family::FBound:
                for (int a : {0, 1})
                    for (int g = 0; g < 16; ++g) {
                        double T = g < 8 ? cfg.train_lo * std::pow(cfg.train_hi / cfg.train_lo, g / 7.0)
                                         : cfg.train_hi * std::pow(cfg.test_hi / cfg.train_hi, (g - 7) / 8.0);
                        p.add(tasks, fam, a, 0, std::floor(T));
                    }
                break;
            case Family::HigherDerivatives:
                for (int i = 0; i < static_cast<int>(std::size(kBoostPositions)); ++i) {
                    int a = kFirstBoost + i, n = kBoostPositions[i];
                    p.add(tasks, fam, a, n, pool[static_cast<std::size_t>(a)].cf.q_double(n));
                }
                [[fallthrough]];
            case Family::GoodScale:
                for (int a : {2, 3})
                    for (int n = 0; n + 1 < pool[a].cf.depth() && pool[a].cf.q_double(n) <= cfg.test_hi; ++n)
                        if (witness_scale(pool[a].cf, n)) p.add(tasks, fam, a, n, pool[a].cf.q_double(n));
                break;
        }
    }
    return tasks;
}

std::vector<CalibrationRow> run_task(const RoofSpec& f, const Task& t, Rng& rng, const CalibrationConfig& cfg) {
    const auto& entry = alpha_pool()[static_cast<std::size_t>(t.alpha)];
    const ContinuedFraction& cf = entry.cf;
    std::vector<CalibrationRow> out;
    int n = t.n;
    switch (t.family) {
        case Family::SpecialTimes: {
            SpecialTimeConstants c;
            collect(verify_special_times(f, random_point(rng), n, cf, c), t, entry.name, out);
            break;
        }
        case Family::FBound: {
            auto T = static_cast<std::uint64_t>(t.scale);
            for (int attempt = 0; attempt < 20; ++attempt) {
                LemmaReport r = verify_f_bound(f, random_point(rng), T, cf, 1.0);
                if (!r.applicable) continue;
                collect(r, t, entry.name, out);
                break;
            }
            break;
        }
        case Family::Resonant: {
            double lo = cf.q_double(n), hi = cf.q_double(n + 1);
            auto r = static_cast<std::uint64_t>(std::floor(log_uniform(rng, lo, hi)));
            r = std::clamp<std::uint64_t>(r, cf.qn(n), cf.qn(n + 1) - (cf.qn(n + 1) > cf.qn(n) ? 1 : 0));
            ResonantReport rr = resonant_decomposition(f, random_point(rng), r, cf);
            collect(resonant_report(rr, 1.0), t, entry.name, out);
            break;
        }
        case Family::GoodScale: {
            double q = cf.q_double(n), q1 = cf.q_double(n + 1), eps = cfg.goodscale_eps;
            for (int attempt = 0; attempt < 20; ++attempt) {
                CirclePoint x = random_point(rng);
                double B = closest_return(x, n, cf).B;
                double Td = std::floor(log_uniform(rng, q * std::log(q), q1));
                auto T = static_cast<std::uint64_t>(std::max(Td, std::ceil(q * std::log(q))));
                double rmax = B * static_cast<double>(T) / 2;
                auto r = static_cast<std::uint64_t>(std::ceil(rmax * (0.05 + 0.95 * uniform01(rng)))) - 1;
                if (r < 1) continue;
                double gap = std::floor(uniform01(rng) * eps * eps * eps * B * static_cast<double>(T));
                std::uint64_t s = r > gap ? r - static_cast<std::uint64_t>(gap) : 0;
                LemmaReport rep = verify_fprime_goodscale(f, x, T, r, s, n, eps, cf, 1.0);
                if (!rep.applicable) continue;
                collect(rep, t, entry.name, out);
                break;
            }
            break;
        }
        case Family::HigherDerivatives: {
            std::uint64_t qn = cf.qn(n);
            double q = static_cast<double>(qn), q1 = cf.q_double(n + 1);
            HigherDerivativeConstants c;
            c.c68_threshold = cfg.close_return_threshold;
            double near_lo = std::max(std::pow(cfg.higher_eps, 0.2), std::pow(6 * q / q1, 0.2));
            double close_lo = 6 * q / q1, close_hi = cfg.close_return_threshold;
            // one instance with B_{n,x} in the near-return regime, one in the close-return regime
            for (int regime = 0; regime < 2; ++regime) {
                // B_{n,x} stays below about (1 + q_n/q_{n+1})/2: 0 sits in a gap of the q_n-orbit
                double lo = regime == 0 ? near_lo : close_lo, hi = regime == 0 ? 0.55 : close_hi;
                if (!(lo < hi)) continue;
                for (int attempt = 0; attempt < 30; ++attempt) {
                    double Bt = lo + (hi - lo) * uniform01(rng);
                    auto j = static_cast<std::int64_t>(uniform_int(rng, 0, qn - 1));
                    CirclePoint x = cf.shift(CirclePoint::from_double(Bt / q), -j);
                    double B = closest_return(x, n, cf).B;
                    double kmax = regime == 0 ? std::pow(B, 5) * q1 / (6 * q) : B * q1 / (6 * q);
                    bool ok = regime == 0 ? B >= std::pow(cfg.higher_eps, 0.2) : B < close_hi;
                    if (!ok || kmax < 1) continue;
                    std::uint64_t k = uniform_int(rng, 1, static_cast<std::uint64_t>(std::floor(kmax)));
                    double whi = B * q1 / 4 - q;
                    std::uint64_t w = 0;
                    if (whi >= q) w = static_cast<std::uint64_t>(std::floor(log_uniform(rng, q, whi)));
                    LemmaReport rep = verify_higher_derivatives(f, x, n, k, w, cfg.higher_eps, cf, c);
                    collect(rep, t, entry.name, out);
                    break;
                }
            }
            break;
        }
    }
    return out;
}

}  // namespace

std::string family_name(Family f) {
    switch (f) {
        case Family::SpecialTimes: return "special-times";
        case Family::FBound: return "f-bound";
        case Family::GoodScale: return "fprime-goodscale";
        case Family::Resonant: return "resonant";
        case Family::HigherDerivatives: return "higher-derivatives";
    }
    return "";
}

Family family_from_name(const std::string& name) {
    for (Family f : all_families())
        if (family_name(f) == name) return f;
    fail(ErrorKind::InvalidArgument, "unknown estimate family: " + name);
}

std::vector<Family> all_families() {
    return {Family::SpecialTimes, Family::FBound, Family::GoodScale, Family::Resonant, Family::HigherDerivatives};
}

bool CalibrationRun::pass() const {
    if (outcomes.empty()) return false;
    return std::all_of(outcomes.begin(), outcomes.end(), [](const auto& o) { return o.pass(); });
}

CalibrationRun calibrate_freeze(const RoofSpec& f, const std::vector<Family>& families, const CalibrationConfig& cfg) {
    if (!(cfg.safety >= 1)) fail(ErrorKind::ConfigInvalid, "safety factor must be >= 1");
    if (!(cfg.train_lo < cfg.train_hi && cfg.train_hi < cfg.test_hi)) fail(ErrorKind::ConfigInvalid, "bad scale ranges");
    RoofSpec fn = f.normalized();
    std::vector<Task> tasks = plan(families, cfg);
    std::vector<std::vector<CalibrationRow>> slots(tasks.size());
    parallel_for(tasks.size(), cfg.workers, [&](std::size_t i) {
        Rng rng = instance_rng(cfg.seed, i);
        slots[i] = run_task(fn, tasks[i], rng, cfg);
        for (auto& r : slots[i]) r.instance = i;
    });

    CalibrationRun run;
    for (auto& s : slots)
        for (auto& r : s) run.rows.push_back(std::move(r));

    std::vector<std::string> ids;
    for (const auto& r : run.rows)
        if (std::find(ids.begin(), ids.end(), r.estimate) == ids.end()) ids.push_back(r.estimate);
    for (const auto& id : ids) {
        CalibrationOutcome o;
        o.estimate = id;
        double hi = 0, lo = std::numeric_limits<double>::infinity();
        for (const auto& r : run.rows) {
            if (r.estimate != id || !r.train) continue;
            o.lower = r.lower;
            ++o.train_count;
            hi = std::max(hi, r.ratio());
            lo = std::min(lo, r.ratio());
        }
        if (o.train_count == 0) {
            for (const auto& r : run.rows)
                if (r.estimate == id) o.lower = r.lower;
            lo = 0;
        }
        o.train_extreme = o.lower ? lo : hi;
        o.constant = o.lower ? lo / cfg.safety : hi * cfg.safety;
        if (auto it = cfg.overrides.find(id); it != cfg.overrides.end()) {
            o.constant = it->second;
            o.overridden = true;
        }
        double test_hi = 0, test_lo = std::numeric_limits<double>::infinity();
        o.min_test_margin = std::numeric_limits<double>::infinity();
        for (auto& r : run.rows) {
            if (r.estimate != id) continue;
            r.constant = o.constant;
            double bound = o.constant * r.shape;
            r.margin = o.lower ? r.measured - bound : bound - r.measured;
            r.pass = o.lower ? r.measured >= bound : r.measured <= bound;
            if (r.train) continue;
            ++o.test_count;
            if (!r.pass) ++o.test_failures;
            test_hi = std::max(test_hi, r.ratio());
            test_lo = std::min(test_lo, r.ratio());
            o.min_test_margin = std::min(o.min_test_margin, r.margin / r.shape);
        }
        o.test_extreme = o.lower ? test_lo : test_hi;
        if (o.test_count == 0) o.min_test_margin = 0;
        run.outcomes.push_back(o);
    }
    return run;
}

}  // namespace arnoldflow
