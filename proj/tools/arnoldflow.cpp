#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "arnoldflow/birkhoff.hpp"
#include "arnoldflow/errors.hpp"
#include "arnoldflow/mobius.hpp"
#include "arnoldflow/numeric.hpp"
#include "arnoldflow/orbit.hpp"
#include "arnoldflow/shear.hpp"
#include "arnoldflow/sl2.hpp"
#include "arnoldflow/specialflow.hpp"
#include "arnoldflow/suite.hpp"

using namespace arnoldflow;
using nlohmann::json;

namespace {

struct Globals {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::string out_dir;
    std::string format = "json";
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::ConfigInvalid, "cannot read '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::ConfigInvalid, "cannot write '" + path.string() + "'");
    out << text;
}

// Config file first, then global flags.
ExperimentConfig base_config(const Globals& g) {
    ExperimentConfig c;
    if (!g.config_path.empty()) c = ExperimentConfig::from_json(read_file(g.config_path));
    if (g.seed) c.seed = *g.seed;
    if (g.workers) c.workers = *g.workers;
    if (!g.out_dir.empty()) c.out_dir = g.out_dir;
    return c;
}

RoofSpec roof_from(const std::string& spec, const ExperimentConfig& c) {
    if (spec.empty()) return c.roof;
    if (spec == "canonical") return canonical_roof();
    return RoofSpec::from_json(read_file(spec));
}

std::string big(const BigInt& v) { return v.str(); }

std::uint64_t as_count(double v, const char* name) {
    if (!(v >= 0) || v > 9.2e18 || v != std::floor(v)) fail(ErrorKind::InvalidArgument, std::string(name) + " must be a non-negative integer");
    return static_cast<std::uint64_t>(v);
}

std::vector<double> number_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            fail(ErrorKind::InvalidArgument, "not a number: '" + item + "'");
        }
    }
    return out;
}

std::map<std::string, double> params_map(const std::string& s) {
    std::map<std::string, double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) fail(ErrorKind::InvalidArgument, "expected key=value, got '" + item + "'");
        try {
            out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
        } catch (const std::exception&) {
            fail(ErrorKind::InvalidArgument, "not a number in '" + item + "'");
        }
    }
    return out;
}

double param(const std::map<std::string, double>& p, const std::string& k, std::optional<double> def = std::nullopt) {
    auto it = p.find(k);
    if (it != p.end()) return it->second;
    if (def) return *def;
    fail(ErrorKind::InvalidArgument, "missing parameter '" + k + "'");
}

json report_json(const LemmaReport& r) {
    json j{{"id", r.lemma_id}, {"measured", r.measured}, {"bound", r.bound}, {"margin", r.margin},
           {"pass", r.pass}, {"applicable", r.applicable}};
    if (!r.note.empty()) j["note"] = r.note;
    json in = json::object();
    for (const auto& [k, v] : r.inputs) in[k] = v;
    j["inputs"] = in;
    if (!r.sub.empty()) {
        j["sub"] = json::array();
        for (const auto& s : r.sub) j["sub"].push_back(report_json(s));
    }
    return j;
}

void emit(const Globals& g, const std::string& name, const std::string& csv, const json& j) {
    std::string js = j.dump(2) + "\n";
    if (!g.out_dir.empty()) {
        if (!csv.empty()) write_file(std::filesystem::path(g.out_dir) / (name + ".csv"), csv);
        write_file(std::filesystem::path(g.out_dir) / (name + ".json"), js);
    }
    std::cout << (g.format == "csv" && !csv.empty() ? csv : js);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Special flows over rotations with logarithmic singularities: numerical checks"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config_path, "JSON experiment config (unknown keys rejected)")->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "master seed");
    app.add_option("--workers", g.workers, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--out-dir", g.out_dir, "directory for report files");
    app.add_option("--format", g.format, "stdout format")->check(CLI::IsMember({"csv", "json"}));
    app.fallthrough();

    // cf
    auto* cf_cmd = app.add_subcommand("cf", "continued fraction expansion and Diophantine checks");
    std::string alpha_spec;
    int depth = 0;
    bool check_d = false;
    std::optional<int> construct_gap;
    std::string profile = "minimal";
    cf_cmd->add_option("--alpha", alpha_spec, "quotients, quad:a,b,d,c, decimal, golden, sqrt2, constructed:G");
    cf_cmd->add_option("--depth", depth, "number of partial quotients");
    cf_cmd->add_flag("--check-diophantine", check_d, "report K_alpha, witnesses and violations");
    cf_cmd->add_option("--construct-d", construct_gap, "build alpha with this witness gap");
    cf_cmd->add_option("--profile", profile, "witness profile")->check(CLI::IsMember({"minimal", "saturated"}));

    // orbit
    auto* orbit_cmd = app.add_subcommand("orbit", "orbit queries");
    double x = 0.1, M = 1, y2 = 0;
    int n = 5;
    std::string query = "closest";
    orbit_cmd->add_option("--alpha", alpha_spec);
    orbit_cmd->add_option("--depth", depth);
    orbit_cmd->add_option("--x", x, "base point in turns");
    orbit_cmd->add_option("--n", n, "scale index");
    orbit_cmd->add_option("--query", query)->check(CLI::IsMember({"closest", "sigma", "spacing", "classify"}));
    orbit_cmd->add_option("--M", M, "Sigma_n(M) multiplier");
    orbit_cmd->add_option("--y2", y2, "second point for classify");

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "run one check family, one CSV row per instance");
    std::string lemma, roof_spec;
    std::optional<int> samples;
    verify_cmd->add_option("--lemma", lemma)->required()->check(CLI::IsMember(suite_checks()));
    verify_cmd->add_option("--roof", roof_spec, "roof JSON file or 'canonical'");
    verify_cmd->add_option("--alpha", alpha_spec);
    verify_cmd->add_option("--samples", samples);

    // flow
    auto* flow_cmd = app.add_subcommand("flow", "special flow evaluation");
    double s_height = 0, t = 1, c = 2;
    std::string flow_check = "evolve";
    flow_cmd->add_option("--roof", roof_spec);
    flow_cmd->add_option("--alpha", alpha_spec);
    flow_cmd->add_option("--depth", depth);
    flow_cmd->add_option("--x", x);
    flow_cmd->add_option("--s", s_height, "height in the fibre");
    flow_cmd->add_option("--t", t, "time");
    flow_cmd->add_option("--c", c, "rescaling factor");
    flow_cmd->add_option("--check", flow_check)->check(CLI::IsMember({"evolve", "rescale", "hits"}));

    // shear
    auto* shear_cmd = app.add_subcommand("shear", "drift series and splitting time");
    double p = 1, q = 2, wmax = 1e5, rpq = 0.05, cpq = 0.01, eps = 0.02, kappa = 0.001;
    std::string points;
    shear_cmd->add_option("--roof", roof_spec);
    shear_cmd->add_option("--alpha", alpha_spec);
    shear_cmd->add_option("--depth", depth);
    shear_cmd->add_option("--p", p);
    shear_cmd->add_option("--q", q);
    shear_cmd->add_option("--points", points, "x,x',y,y' in turns")->required();
    shear_cmd->add_option("--wmax", wmax);
    shear_cmd->add_option("--rpq", rpq);
    shear_cmd->add_option("--cpq", cpq);
    shear_cmd->add_option("--eps", eps);
    shear_cmd->add_option("--kappa", kappa);

    // sl2
    auto* sl2_cmd = app.add_subcommand("sl2", "matrix identities in SL(2,R)");
    std::string sl2_check = "renorm", params;
    sl2_cmd->add_option("--check", sl2_check)->check(CLI::IsMember({"renorm", "coords", "chi"}));
    sl2_cmd->add_option("--params", params, "key=value list");

    // mobius
    auto* mob_cmd = app.add_subcommand("mobius", "Mobius statistics");
    std::string stat = "mertens", Ns = "1000000", Ms, Hs, observable = "band";
    double mp = 2, mq = 3, t0 = 1;
    mob_cmd->add_option("--stat", stat)->check(CLI::IsMember({"mertens", "kbsz", "ortho", "usic", "momo"}));
    mob_cmd->add_option("--N", Ns, "comma separated N values");
    mob_cmd->add_option("--M", Ms, "comma separated M values (usic, momo)");
    mob_cmd->add_option("--H", Hs, "comma separated H values; default round(sqrt(M))");
    mob_cmd->add_option("--p", mp);
    mob_cmd->add_option("--q", mq);
    mob_cmd->add_option("--roof", roof_spec);
    mob_cmd->add_option("--alpha", alpha_spec);
    mob_cmd->add_option("--depth", depth);
    mob_cmd->add_option("--observable", observable, "band | one | base:lo,hi");
    mob_cmd->add_option("--t0", t0, "flow time step between samples");

    auto* suite_cmd = app.add_subcommand("suite", "run the configured checks and write suite.csv / summary.json");

    CLI11_PARSE(app, argc, argv);

    try {
        ExperimentConfig cfg = base_config(g);
        if (!alpha_spec.empty()) cfg.alpha = alpha_spec;
        if (depth > 0) cfg.depth = depth;
        auto alpha = [&] { return parse_alpha(cfg.alpha, cfg.depth); };

        if (*cf_cmd) {
            ContinuedFraction cf = construct_gap
                                       ? construct_alpha_in_D(*construct_gap, cfg.depth,
                                                              profile == "saturated" ? WitnessProfile::Saturated
                                                                                     : WitnessProfile::Minimal)
                                             .cf
                                       : alpha();
            json j;
            j["quotients"] = cf.quotients;
            j["p"] = json::array();
            j["q"] = json::array();
            for (int k = 0; k <= cf.depth(); ++k) {
                j["p"].push_back(big(cf.p[static_cast<std::size_t>(k)]));
                j["q"].push_back(big(cf.q[static_cast<std::size_t>(k)]));
            }
            if (check_d || construct_gap) {
                DiophantineReport d = check_diophantine(cf);
                j["diophantine"] = {{"k_alpha", d.k_alpha_indices()},
                                    {"d2_witnesses", d.witness_indices()},
                                    {"d3_violations", d.violation_indices()},
                                    {"d1_partial_sums", d.d1_partial_sums},
                                    {"violations_past_prefix", d.violations_past_prefix()}};
            }
            emit(g, "cf", "", j);
            return 0;
        }
        if (*orbit_cmd) {
            ContinuedFraction cf = alpha();
            CirclePoint px = CirclePoint::from_double(x);
            json j{{"query", query}, {"x", x}, {"n", n}};
            if (query == "closest") {
                ClosestReturn cr = closest_return(px, n, cf);
                j["i"] = cr.i;
                j["B"] = cr.B;
            } else if (query == "sigma") {
                Membership m = sigma_membership(px, n, M, cf);
                j["M"] = M;
                j["member"] = m.member;
                j["near_boundary"] = m.near_boundary;
                j["closest_index"] = m.closest_index;
                j["closest_dist"] = m.closest_dist;
            } else if (query == "spacing") {
                SpacingVerdict v = spacing_check(px, n, cf);
                j["min_gap"] = v.min_gap;
                j["max_gap"] = v.max_gap;
                j["min_gap_ok"] = v.min_gap_ok;
                j["gap_cover_ok"] = v.gap_cover_ok;
            } else {
                ForwardBackward fb = forward_backward_classify(px, CirclePoint::from_double(y2), n, cf);
                j["y2"] = y2;
                j["forward_ok"] = fb.forward_ok;
                j["backward_ok"] = fb.backward_ok;
                j["hypotheses"] = fb.hypotheses();
                j["near_boundary"] = fb.near_boundary;
            }
            emit(g, "orbit", "", j);
            return 0;
        }
        if (*verify_cmd || *suite_cmd) {
            if (*verify_cmd) {
                cfg.checks = {lemma};
                cfg.roof = roof_from(roof_spec, cfg);
                if (samples) cfg.samples = *samples;
            }
            SuiteResult r = run_suite(cfg);
            std::filesystem::path dir = cfg.out_dir;
            std::string stem = *verify_cmd ? "verify" : "suite";
            write_file(dir / (stem + ".csv"), r.csv);
            write_file(dir / (stem + "_summary.json"), r.summary_json);
            std::cout << (g.format == "csv" ? r.csv : r.summary_json);
            return r.exit_code();
        }
        if (*flow_cmd) {
            ContinuedFraction cf = alpha();
            FlowRoof f = FlowRoof::from(roof_from(roof_spec, cfg).normalized());
            FlowPoint pt{CirclePoint::from_double(x), s_height};
            json j{{"check", flow_check}, {"x", x}, {"s", s_height}, {"t", t}};
            if (flow_check == "evolve") {
                FlowPoint out = evolve(f, pt, t, cf);
                j["x_out"] = out.z.value();
                j["s_out"] = out.r;
                j["in_region"] = out.r >= 0 && out.r < f.eval(out.z);
            } else if (flow_check == "hits") {
                HitCount h = hit_count(f, pt.z, pt.r, t, cf);
                HitCount o = hit_count_stepping(f, pt.z, pt.r, t, cf);
                j["n"] = h.n;
                j["ambiguous"] = h.ambiguous;
                j["oracle_n"] = o.n;
                j["agree"] = h.n == o.n;
            } else {
                LemmaReport r = verify_rescaling(f, c, pt, t, cf);
                j["report"] = report_json(r);
            }
            emit(g, "flow", "", j);
            return 0;
        }
        if (*shear_cmd) {
            ContinuedFraction cf = alpha();
            RoofSpec f = roof_from(roof_spec, cfg).normalized();
            auto pts = number_list(points);
            if (pts.size() != 4) fail(ErrorKind::InvalidArgument, "--points needs four values");
            CirclePoint X = CirclePoint::from_double(pts[0]), Xp = CirclePoint::from_double(pts[1]),
                        Y = CirclePoint::from_double(pts[2]), Yp = CirclePoint::from_double(pts[3]);
            DriftSeries s = drift_sequence(f, p, q, X, Xp, Y, Yp, as_count(wmax, "--wmax"), cf);
            std::ostringstream csv;
            csv << "w,a_w\n";
            for (std::size_t w = 0; w < s.a.size(); ++w) csv << w << ',' << format_double(s.a[w]) << '\n';
            json j{{"p", p}, {"q", q}, {"zeta", s.zeta}, {"continuity_excess", s.continuity_excess}};
            try {
                CaseReport cr = classify_case(X, Xp, Y, Yp, cf, s.zeta, cpq);
                j["case"] = cr.kind == ShearCase::Asynchronous ? "asynchronous" : "second-order";
                j["x_scale"] = cr.x_scale;
                j["v_scale"] = cr.v_scale;
                j["T"] = cr.T;
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::ScaleOutOfRange) throw;
                j["case"] = nullptr;
                j["case_error"] = e.what();
            }
            if (auto sp = splitting_time(s, rpq, eps, kappa)) {
                j["M"] = sp->M;
                j["L"] = sp->L;
                j["shift_sign"] = sp->shift_sign;
                j["first_entry"] = sp->first_entry;
                j["plateau_ok"] = sp->plateau_ok;
                j["plateau_dev"] = sp->plateau_dev;
            } else {
                j["M"] = nullptr;
            }
            emit(g, "shear", csv.str(), j);
            return 0;
        }
        if (*sl2_cmd) {
            auto pm = params_map(params);
            json j{{"check", sl2_check}};
            bool ok = true;
            if (sl2_check == "renorm") {
                double tt = param(pm, "t", 1.0), ss = param(pm, "s", std::log(2.0));
                double res = renorm_residual(tt, ss), con = renorm_contract(tt, ss);
                ok = res < con;
                j.update({{"t", tt}, {"s", ss}, {"residual", res}, {"contract", con}});
            } else if (sl2_check == "coords") {
                Mat2 X{param(pm, "xa", 1), param(pm, "xb", 0), param(pm, "xc", 0.01), param(pm, "xd", 1)};
                Mat2 Y{param(pm, "ya", 1), param(pm, "yb", 0), param(pm, "yc", 0), param(pm, "yd", 1)};
                LocalCoords lc = local_coords(X, Y);
                double TT = param(pm, "T", lc.r != 0 ? 1 / std::sqrt(std::fabs(lc.r)) : 1.0);
                ProductIdentity pi = product_identity(lc, TT);
                ok = lc.residual < 1e-10 && pi.relative < 1e-9;
                j.update({{"vbar", lc.vbar}, {"s", lc.s}, {"r", lc.r}, {"residual", lc.residual}, {"T", TT},
                          {"chi", chi_eval(lc.s, lc.r, TT)}, {"v", pi.v}, {"product_relative", pi.relative}});
            } else {
                double ss = param(pm, "s", 0), rr = param(pm, "r", 1e-4), shift = param(pm, "shift", 1);
                double step = param(pm, "step", 1), tmax = param(pm, "tmax", 1000);
                std::vector<double> grid;
                for (double T = step; T <= tmax; T += step) grid.push_back(T);
                QuadraticReport qr = drift_quadratic_check(ss, rr, grid, shift);
                ok = qr.law_residual < 1e-10 && (!qr.found || std::fabs(qr.refined - qr.root) <= 1e-10 * qr.root);
                j.update({{"s", ss}, {"r", rr}, {"shift", shift}, {"law_residual", qr.law_residual}, {"found", qr.found},
                          {"grid_first", qr.grid_first}, {"root", qr.root}, {"refined", qr.refined}});
            }
            j["pass"] = ok;
            emit(g, "sl2", "", j);
            return ok ? 0 : 1;
        }
        if (*mob_cmd) {
            std::ostringstream csv;
            csv << "scale,value\n";
            json rows = json::array();
            auto add = [&](const std::string& scale, double v) {
                csv << scale << ',' << format_double(v) << '\n';
                rows.push_back({{"scale", scale}, {"value", v}});
            };
            auto Nv = number_list(Ns);
            std::vector<double> Mv = Ms.empty() ? std::vector<double>{} : number_list(Ms);
            std::vector<double> Hv = Hs.empty() ? std::vector<double>{} : number_list(Hs);
            if (!Hv.empty() && Hv.size() != Mv.size()) fail(ErrorKind::InvalidArgument, "--H needs one value per --M");
            auto H_of = [&](std::size_t i) {
                return Hv.empty() ? std::max<std::uint64_t>(2, static_cast<std::uint64_t>(std::llround(std::sqrt(Mv[i]))))
                                  : as_count(Hv[i], "--H");
            };
            std::uint64_t need = 1;
            for (double v : Nv) need = std::max(need, as_count(v, "--N") * (stat == "kbsz" ? as_count(std::max(mp, mq), "--p/--q") : 1));
            for (std::size_t i = 0; i < Mv.size(); ++i) need = std::max(need, 2 * as_count(Mv[i], "--M") + H_of(i));
            MobiusTable table = mobius_sieve(need + 1);
            if (stat == "mertens") {
                for (double v : Nv) add(std::to_string(as_count(v, "--N")), static_cast<double>(mertens(table, as_count(v, "--N"))));
            } else {
                ContinuedFraction cf = alpha();
                FlowRoof f = FlowRoof::from(roof_from(roof_spec, cfg).normalized());
                Observable F;
                if (observable == "band") F = height_band_observable(f);
                else if (observable == "one") F = constant_observable(1);
                else if (observable.rfind("base:", 0) == 0) {
                    auto lh = number_list(observable.substr(5));
                    if (lh.size() != 2) fail(ErrorKind::InvalidArgument, "base observable needs lo,hi");
                    F = base_interval_observable(lh[0], lh[1]);
                } else fail(ErrorKind::InvalidArgument, "unknown observable '" + observable + "'");
                Rng rng = instance_rng(cfg.seed, 0);
                u128 hi = rng();
                FlowPoint x0{CirclePoint{(hi << 64) | rng()}, 0};
                auto samples_v = flow_samples(f, F, x0, t0, need, cf);
                if (stat == "kbsz") {
                    for (double v : Nv) add(std::to_string(as_count(v, "--N")), kbsz_sum(samples_v, as_count(mp, "--p"), as_count(mq, "--q"), as_count(v, "--N")));
                } else if (stat == "ortho") {
                    for (double v : Nv) add(std::to_string(as_count(v, "--N")), orthogonality_sum(samples_v, table, as_count(v, "--N")));
                } else if (stat == "usic") {
                    for (std::size_t i = 0; i < Mv.size(); ++i)
                        add(std::to_string(as_count(Mv[i], "--M")) + ":" + std::to_string(H_of(i)), usic_statistic(samples_v, table, as_count(Mv[i], "--M"), H_of(i)));
                } else {
                    // blocks of length H over [0, 2M), each restarted from its own seeded point
                    for (std::size_t i = 0; i < Mv.size(); ++i) {
                        std::uint64_t Mi = as_count(Mv[i], "--M"), H = H_of(i);
                        std::vector<std::uint64_t> b;
                        for (std::uint64_t v = 0; v < 2 * Mi; v += H) b.push_back(v);
                        b.push_back(2 * Mi);
                        auto src = [&](std::size_t k, std::uint64_t lo, std::uint64_t hi_) {
                            Rng r = instance_rng(cfg.seed, 1 + k);
                            u128 h = r();
                            FlowPoint xk{CirclePoint{(h << 64) | r()}, 0};
                            FlowPoint start = lo ? evolve(f, xk, static_cast<double>(lo) * t0, cf) : xk;
                            auto v = flow_samples(f, F, start, t0, hi_ - lo - 1, cf);
                            return v;
                        };
                        add(std::to_string(Mi) + ":" + std::to_string(H), momo_statistic(b, src, table));
                    }
                }
            }
            emit(g, "mobius", csv.str(), json{{"stat", stat}, {"rows", rows}});
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.kind() == ErrorKind::ConfigInvalid ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
