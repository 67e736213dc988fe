#include "randmoll/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "randmoll/errors.hpp"
#include "randmoll/kernel.hpp"
#include "randmoll/maximal.hpp"
#include "randmoll/mollify.hpp"
#include "randmoll/svg.hpp"

namespace randmoll {

namespace fs = std::filesystem;

namespace {

MollifyPath parse_path(const std::string& p) {
    if (p == "direct") return MollifyPath::direct;
    if (p == "monte-carlo") return MollifyPath::monte_carlo;
    return MollifyPath::fft;
}

// Least-squares slope of v over its last quarter; the convergence trend test.
double last_quarter_slope(const std::vector<double>& v) {
    const std::size_t m = v.size();
    const std::size_t start = m - std::max<std::size_t>(2, m / 4);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (std::size_t i = start; i < m; ++i) {
        double x = static_cast<double>(i), y = v[i];
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++cnt;
    }
    if (cnt < 2) return 0;
    return (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
}

void add_meta(ExperimentReport& rep, const ExperimentConfig& cfg) {
    std::ostringstream hash;
    hash << std::hex << config_hash(cfg);
    rep.metadata.emplace_back("config_hash", hash.str());
    rep.metadata.emplace_back("seed", std::to_string(cfg.seed));
    rep.metadata.emplace_back("profile", cfg.profile);
    rep.metadata.emplace_back("family", cfg.family);
    rep.metadata.emplace_back("function", cfg.function);
    rep.metadata.emplace_back("dim", std::to_string(cfg.dimension));
    rep.metadata.emplace_back("J", std::to_string(cfg.horizon));
}

std::string derived_name(const ExperimentConfig& cfg) {
    if (!cfg.name.empty()) return cfg.name;
    return cfg.experiment + "-" + cfg.family + "-" + cfg.profile;
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

}  // namespace

Profile resolve_profile(const ExperimentConfig& cfg) {
    Profile p = make_profile(cfg.profile, cfg.dimension, cfg.profile_params);
    return cfg.profile_normalize ? normalize(p) : p;
}

FamilySpec resolve_family(const ExperimentConfig& cfg) {
    auto params = cfg.family_params;
    params.emplace("J", static_cast<double>(cfg.horizon));
    params["J"] = std::max(params["J"], static_cast<double>(cfg.horizon));
    return make_family(cfg.family, cfg.dimension, params);
}

CatalogFunction resolve_function(const ExperimentConfig& cfg) {
    return test_function(cfg.function, cfg.dimension, {cfg.box_lo, cfg.box_lo},
                         {cfg.box_hi, cfg.box_hi}, {cfg.resolution, cfg.resolution},
                         cfg.function_params);
}

bool ExperimentReport::failed() const {
    return verdict == "fail" || verdict == "non-converging" || verdict == "not-a.e.-consistent" ||
           verdict == "no-divergence-evidence" || verdict == "unstable";
}

// ---------------------------------------------------------------------------
// convergence
// ---------------------------------------------------------------------------

ExperimentReport convergence_experiment(const ExperimentConfig& cfg) {
    Timer timer;
    ExperimentReport rep;
    rep.name = derived_name(cfg);
    rep.claim = "continuous-mean-convergence";
    add_meta(rep, cfg);

    CatalogFunction g = resolve_function(cfg);
    if (!g.continuous)
        throw ConfigError("convergence experiment needs a continuous test function");
    Profile phi = resolve_profile(cfg);
    FamilySpec family = resolve_family(cfg);

    ConditionReport vague = check_vague_convergence(family);
    rep.conditions.push_back(vague);

    MollifyOptions mopt;
    mopt.path = parse_path(cfg.path);
    mopt.seed = cfg.seed;

    // fixed trust region from the widest kernel (j = 1)
    AveragedKernel k1(phi, family.generator(1), Quadrature{});
    const double trust = k1.support_radius();

    std::vector<double> errs;
    ExperimentTable table{"error-by-j", {"j", "max_error"}, {}};
    for (int j = 1; j <= cfg.horizon; ++j) {
        MollifyResult mj = mollify(AveragedKernel(phi, family.generator(j), Quadrature{}),
                                   g.f, mopt);
        double e = 0;
        for (std::size_t c = 0; c < g.f.size(); ++c) {
            if (!in_trust_region(g.f, c, trust)) continue;
            e = std::max(e, std::abs(mj.values[c] - g.f[c]));
        }
        errs.push_back(e);
        table.rows.push_back({static_cast<double>(j), e});
    }
    rep.tables.push_back(std::move(table));

    const double tol = 1e-2;
    const bool small = errs.back() < tol;
    const bool decreasing = last_quarter_slope(errs) <= 1e-12;
    if (!vague.passed())
        rep.verdict = "hypothesis-unmet";
    else
        rep.verdict = (small && decreasing) ? "converges" : "non-converging";
    rep.metadata.emplace_back("final_error", format_double(errs.back()));
    rep.runtime_ms = timer.ms();
    return rep;
}

// ---------------------------------------------------------------------------
// a.e. convergence
// ---------------------------------------------------------------------------

namespace {

struct AePass {
    std::vector<double> fractions;       // per j
    double exceptional_measure = 0;      // at the final horizon
    double worst_rough_distance = 0;     // of exceptional points
    double trust = 0;
};

AePass ae_pass(const ExperimentConfig& cfg, int resolution) {
    ExperimentConfig local = cfg;
    local.resolution = resolution;
    CatalogFunction f = resolve_function(local);
    Profile phi = resolve_profile(local);
    FamilySpec family = resolve_family(local);
    MollifyOptions mopt;
    mopt.path = parse_path(cfg.path);
    mopt.seed = cfg.seed;

    AveragedKernel k1(phi, family.generator(1), Quadrature{});
    AePass out;
    out.trust = k1.support_radius();
    const double tol = 1e-2;

    for (int j = 1; j <= cfg.horizon; ++j) {
        MollifyResult mj =
            mollify(AveragedKernel(phi, family.generator(j), Quadrature{}), f.f, mopt);
        std::size_t total = 0, good = 0;
        double exc_measure = 0, worst_dist = 0;
        for (std::size_t c = 0; c < f.f.size(); ++c) {
            if (!in_trust_region(f.f, c, out.trust)) continue;
            ++total;
            if (std::abs(mj.values[c] - f.f[c]) < tol) {
                ++good;
            } else {
                exc_measure += f.f.cell_volume();
                worst_dist = std::max(worst_dist, f.distance_to_rough(f.f.center(c)));
            }
        }
        out.fractions.push_back(total ? static_cast<double>(good) / total : 1.0);
        if (j == cfg.horizon) {
            out.exceptional_measure = exc_measure;
            out.worst_rough_distance = worst_dist;
        }
    }
    return out;
}

}  // namespace

ExperimentReport ae_convergence_experiment(const ExperimentConfig& cfg) {
    Timer timer;
    ExperimentReport rep;
    rep.name = derived_name(cfg);
    rep.claim = "ae-convergence-under-weak-type";
    add_meta(rep, cfg);

    FamilySpec family = resolve_family(cfg);
    Profile phi = resolve_profile(cfg);

    // hypotheses: a density bound or the smoothness conditions
    bool hyp_ok = false;
    try {
        ConditionReport dens = check_density_hypotheses(family);
        rep.conditions.push_back(dens);
        hyp_ok = dens.passed();
    } catch (const UnsupportedError&) {
        ConditionReport zo = check_zo_conditions(family, phi, std::min(cfg.horizon, 8));
        rep.conditions.push_back(zo);
        hyp_ok = zo.passed();
    }

    AePass coarse = ae_pass(cfg, cfg.resolution / 2);
    AePass fine = ae_pass(cfg, cfg.resolution);

    ExperimentTable table{"fraction-by-j", {"j", "fraction_within_tol"}, {}};
    for (std::size_t i = 0; i < fine.fractions.size(); ++i)
        table.rows.push_back({static_cast<double>(i + 1), fine.fractions[i]});
    rep.tables.push_back(std::move(table));
    ExperimentTable res_table{"exceptional-measure-by-resolution",
                              {"resolution", "measure", "worst_rough_distance"},
                              {}};
    res_table.rows.push_back({static_cast<double>(cfg.resolution / 2),
                              coarse.exceptional_measure, coarse.worst_rough_distance});
    res_table.rows.push_back({static_cast<double>(cfg.resolution), fine.exceptional_measure,
                              fine.worst_rough_distance});
    rep.tables.push_back(std::move(res_table));

    CatalogFunction f = resolve_function(cfg);
    const double kernel_scale =
        AveragedKernel(phi, family.generator(cfg.horizon), Quadrature{}).support_radius();
    const double loc_radius = 4.0 * (kernel_scale + f.f.pitch(0));
    const bool localized = fine.worst_rough_distance <= loc_radius;
    const bool trending = fine.fractions.back() >= fine.fractions.front() - 1e-12;
    const bool shrinking =
        fine.exceptional_measure <= coarse.exceptional_measure * (1.0 + 1e-9) + 1e-12;

    rep.metadata.emplace_back("final_fraction", format_double(fine.fractions.back()));
    rep.metadata.emplace_back("localization_radius", format_double(loc_radius));
    if (!hyp_ok)
        rep.verdict = "hypothesis-unmet";
    else
        rep.verdict =
            (localized && trending && shrinking) ? "a.e.-consistent" : "not-a.e.-consistent";
    rep.runtime_ms = timer.ms();
    return rep;
}

// ---------------------------------------------------------------------------
// divergence search
// ---------------------------------------------------------------------------

namespace {

// Hypothesis of the rephrased divergence theorem: the translation density is
// nondecreasing and unbounded on (0, 1).
void require_unbounded_nondecreasing(const VectorMarginal& mu, bool allow_bounded) {
    if (std::holds_alternative<BoxUniform>(mu.form())) {
        if (allow_bounded) return;  // flat density: the explicit control mode
        throw RefusedError("divergence experiment refused: density bounded on (0,1)");
    }
    const auto* d = std::get_if<VectorDensity>(&mu.form());
    if (!d) throw RefusedError("divergence experiment needs a translation density");
    auto pdf = [&](double y) { return d->pdf(Point{y}); };
    double prev = 0;
    bool nondecreasing = true;
    for (int i = 1; i <= 512; ++i) {
        double y = i / 513.0;
        double v = pdf(y);
        if (v < prev - 1e-12 * std::max(1.0, prev)) nondecreasing = false;
        prev = v;
    }
    const double near = pdf(1.0 - 1e-9), mid = pdf(1.0 - 1e-3);
    const bool unbounded = near > 10.0 * std::max(mid, 1e-300);
    if (!nondecreasing)
        throw RefusedError("divergence experiment refused: density not nondecreasing on (0,1)");
    if (!unbounded && !allow_bounded)
        throw RefusedError("divergence experiment refused: density bounded on (0,1)");
}

struct SpikeTrain {
    std::string label;
    GridFunction f;
};

std::vector<SpikeTrain> spike_search_family(const ExperimentConfig& cfg) {
    std::vector<SpikeTrain> out;
    const double h = (cfg.box_hi - cfg.box_lo) / cfg.resolution;
    auto make = [&](const std::string& label,
                    const std::vector<std::array<double, 3>>& spikes) {  // (z0, width, mass)
        double total = 0;
        for (const auto& s : spikes) total += s[2];
        GridFunction f = GridFunction::sample(
            1, {cfg.box_lo, 0}, {cfg.box_hi, 1}, {cfg.resolution, 1}, [&](const Point& x) {
                double v = 0;
                for (const auto& s : spikes)
                    if (x[0] >= s[0] && x[0] < s[0] + s[1]) v += (s[2] / total) / s[1];
                return v;
            });
        out.push_back({label, std::move(f)});
    };
    for (double w : {4 * h, 16 * h, 64 * h})
        make("single-w" + format_double(w), {{0.0, w, 1.0}});
    for (double q : {0.7, 1.3}) {
        std::vector<std::array<double, 3>> spikes;
        for (int k = 2; k <= 6; ++k)
            spikes.push_back({0.5 - std::pow(2.0, -k), 4 * h, std::pow(q, k)});
        make("train-q" + format_double(q), spikes);
    }
    return out;
}

}  // namespace

ExperimentReport divergence_experiment(const ExperimentConfig& cfg) {
    Timer timer;
    ExperimentReport rep;
    rep.name = derived_name(cfg);
    rep.claim = "translation-divergence-search";
    add_meta(rep, cfg);

    if (cfg.dimension != 1)
        throw ConfigError("divergence experiment is restricted to dimension 1");
    FamilySpec family = resolve_family(cfg);
    JointDistributionSpec spec1 = family.generator(1);
    if (!spec1.pure_translation())
        throw RefusedError("divergence experiment needs a pure-translation family");
    auto mu1 = spec1.mean_marginal();
    if (!mu1) throw RefusedError("divergence experiment needs a separable mean marginal");
    require_unbounded_nondecreasing(*mu1, cfg.allow_bounded_control);

    const std::vector<int> snapshots{8, 16, 32, 64};
    const double growth_required = 1.5;  // declared evidence criterion
    bool any_evidence = false;
    double best_min_ratio = 0;
    std::string best_label;

    for (const auto& train : spike_search_family(cfg)) {
        double running = 0;
        std::size_t next = 0;
        std::vector<double> g_values;
        for (int j = 1; j <= snapshots.back() && next < snapshots.size(); ++j) {
            MollifyResult mj = mollify_translation(family.generator(j), train.f);
            for (std::size_t c = 0; c < mj.values.size(); ++c)
                running = std::max(running, mj.values[c]);
            if (snapshots[next] == j) {
                g_values.push_back(running);
                ++next;
            }
        }
        ExperimentTable table{"growth-" + train.label, {"J", "G"}, {}};
        for (std::size_t i = 0; i < g_values.size(); ++i)
            table.rows.push_back({static_cast<double>(snapshots[i]), g_values[i]});
        rep.tables.push_back(std::move(table));

        double min_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < g_values.size(); ++i)
            min_ratio = std::min(min_ratio, g_values[i + 1] / std::max(g_values[i], 1e-300));
        ConditionReport cond;
        cond.check = "g-growth-" + train.label;
        cond.measured = min_ratio;
        cond.tolerance = growth_required;
        cond.verdict = min_ratio >= growth_required ? Verdict::pass : Verdict::fail;
        cond.message = "per-doubling growth of G";
        rep.conditions.push_back(cond);
        if (min_ratio >= growth_required) any_evidence = true;
        if (min_ratio > best_min_ratio) {
            best_min_ratio = min_ratio;
            best_label = train.label;
        }
    }
    rep.metadata.emplace_back("best_growth_ratio", format_double(best_min_ratio));
    rep.metadata.emplace_back("best_train", best_label);
    rep.verdict = any_evidence ? "divergence-evidence" : "no-divergence-evidence";
    rep.runtime_ms = timer.ms();
    return rep;
}

// ---------------------------------------------------------------------------
// condition wrappers and dispatch
// ---------------------------------------------------------------------------

namespace {

ExperimentReport condition_experiment(const ExperimentConfig& cfg) {
    Timer timer;
    ExperimentReport rep;
    rep.name = derived_name(cfg);
    add_meta(rep, cfg);

    if (cfg.experiment == "vague") {
        rep.claim = "vague-convergence-of-joint-distributions";
        ConditionReport c = check_vague_convergence(resolve_family(cfg));
        rep.verdict = c.passed() ? "pass" : "fail";
        rep.conditions.push_back(std::move(c));
    } else if (cfg.experiment == "density-hypotheses") {
        rep.claim = "uniform-density-bound-on-shrinking-supports";
        ConditionReport c = check_density_hypotheses(resolve_family(cfg));
        rep.verdict = c.passed() ? "pass" : "fail";
        rep.conditions.push_back(std::move(c));
    } else if (cfg.experiment == "gradient-bound") {
        rep.claim = "kernel-gradient-decay-bound";
        ConditionReport c = check_gradient_bound(resolve_profile(cfg));
        rep.verdict = c.passed() ? "pass" : "fail";
        rep.conditions.push_back(std::move(c));
    } else if (cfg.experiment == "moment") {
        rep.claim = "bounded-nonincreasing-finite-moment-profile";
        ConditionReport c = check_moment_and_monotone(resolve_profile(cfg));
        rep.verdict = c.passed() ? "pass" : "fail";
        rep.conditions.push_back(std::move(c));
    } else if (cfg.experiment == "zo") {
        rep.claim = "uniform-l1-and-smoothness-conditions";
        ConditionReport c = check_zo_conditions(resolve_family(cfg), resolve_profile(cfg),
                                                std::min(cfg.horizon, 16));
        rep.verdict = c.passed() ? "pass" : "fail";
        rep.conditions.push_back(std::move(c));
    } else if (cfg.experiment == "domination") {
        rep.claim = "maximal-operator-dominated-by-hl-maximal";
        MaximalOptions opt;
        opt.mollify.path = parse_path(cfg.path);
        opt.mollify.seed = cfg.seed;
        ConditionReport c = check_domination(resolve_family(cfg), resolve_profile(cfg),
                                             resolve_function(cfg).f, cfg.horizon, opt);
        rep.verdict = c.passed() ? "pass" : "fail";
        rep.conditions.push_back(std::move(c));
    } else if (cfg.experiment == "weak-type") {
        rep.claim = "weak-type-level-set-stability";
        MaximalOptions opt;
        opt.mollify.path = parse_path(cfg.path);
        opt.mollify.seed = cfg.seed;
        CatalogFunction f = resolve_function(cfg);
        std::vector<int> snaps{std::max(1, cfg.horizon / 4), std::max(2, cfg.horizon / 2),
                               cfg.horizon};
        std::vector<double> lambdas;
        for (int i = 0; i < 16; ++i) lambdas.push_back(0.05 * std::pow(2.0, i * 0.5));
        auto curves =
            weak_type_curves(resolve_family(cfg), resolve_profile(cfg), f.f, snaps, lambdas, opt);
        ExperimentTable table{"a-weak-by-horizon", {"J", "A_weak"}, {}};
        for (const auto& c : curves)
            table.rows.push_back({static_cast<double>(c.horizon), c.a_weak});
        rep.tables.push_back(table);
        ExperimentTable lv{"level-sets", {"J", "lambda", "lambda_times_measure"}, {}};
        for (const auto& c : curves)
            for (const auto& [lam, meas] : c.lambda_measure)
                lv.rows.push_back({static_cast<double>(c.horizon), lam, lam * meas});
        rep.tables.push_back(lv);
        double worst_change = 0;
        for (std::size_t i = 1; i < curves.size(); ++i)
            worst_change = std::max(worst_change,
                                    std::abs(curves[i].a_weak - curves[i - 1].a_weak) /
                                        std::max(curves[i - 1].a_weak, 1e-300));
        rep.metadata.emplace_back("a_weak_relative_change", format_double(worst_change));
        rep.verdict = worst_change < 0.10 ? "stable" : "unstable";
    } else if (cfg.experiment == "dyadic") {
        rep.claim = "dyadic-shell-series-bound";
        ConditionReport c = dyadic_series_bound(resolve_profile(cfg));
        rep.verdict = c.passed() ? "pass" : "fail";
        rep.conditions.push_back(std::move(c));
    } else if (cfg.experiment == "mass") {
        rep.claim = "kernel-mass-independent-of-randomization";
        Profile phi = resolve_profile(cfg);
        FamilySpec family = resolve_family(cfg);
        const double target = radial_mass(phi);
        bool ok = true;
        for (int j : {1, 2, 4}) {
            if (j > cfg.horizon) break;
            AveragedKernel k(phi, family.generator(j), Quadrature{});
            double m = k.mass();
            Verdict v = std::abs(m - target) <= 1e-6 ? Verdict::pass : Verdict::fail;
            ok = ok && v == Verdict::pass;
            ConditionReport c;
            c.check = "kernel-mass";
            c.measured = m;
            c.tolerance = 1e-6;
            c.verdict = v;
            c.lines.push_back({"kernel-mass", j, m, target, v, ""});
            rep.conditions.push_back(std::move(c));
        }
        rep.verdict = ok ? "pass" : "fail";
    } else {
        throw ConfigError("unknown experiment '" + cfg.experiment + "'");
    }
    rep.runtime_ms = timer.ms();
    return rep;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    if (cfg.experiment == "convergence") return convergence_experiment(cfg);
    if (cfg.experiment == "ae-convergence") return ae_convergence_experiment(cfg);
    if (cfg.experiment == "divergence") return divergence_experiment(cfg);
    return condition_experiment(cfg);
}

// ---------------------------------------------------------------------------
// the stock suite
// ---------------------------------------------------------------------------

std::vector<ExperimentConfig> default_suite() {
    std::vector<ExperimentConfig> out;
    auto base = [] {
        ExperimentConfig c;
        c.seed = 20240915;
        return c;
    };

    {
        ExperimentConfig c = base();
        c.experiment = "vague";
        c.name = "vague-uniform-variance";
        c.family = "uniform-variance";
        c.horizon = 32;
        out.push_back(c);
    }
    {
        ExperimentConfig c = base();
        c.experiment = "vague";
        c.name = "vague-coupled";
        c.family = "coupled-sphere";
        c.horizon = 32;
        out.push_back(c);
    }
    {
        ExperimentConfig c = base();
        c.experiment = "convergence";
        c.name = "convergence-uniform-variance";
        c.function = "cosine-packet";
        c.family = "uniform-variance";
        c.resolution = 2048;
        c.horizon = 64;
        out.push_back(c);
    }
    {
        ExperimentConfig c = base();
        c.experiment = "convergence";
        c.name = "convergence-coupled";
        c.function = "cosine-packet";
        c.family = "coupled-sphere";
        c.resolution = 2048;
        c.horizon = 64;
        out.push_back(c);
    }
    {
        ExperimentConfig c = base();
        c.experiment = "ae-convergence";
        c.name = "ae-step";
        c.function = "step";
        c.family = "uniform-box";
        c.box_lo = -2;
        c.box_hi = 2;
        c.resolution = 512;
        c.horizon = 24;
        out.push_back(c);
    }
    {
        ExperimentConfig c = base();
        c.experiment = "gradient-bound";
        c.name = "gradient-power-tail";
        c.profile = "power-tail";
        out.push_back(c);
    }
    {
        ExperimentConfig c = base();
        c.experiment = "zo";
        c.name = "zo-power-tail";
        c.profile = "power-tail";
        c.family = "uniform-variance";
        c.horizon = 12;
        out.push_back(c);
    }
    {
        ExperimentConfig c = base();
        c.experiment = "density-hypotheses";
        c.name = "density-uniform-box";
        c.family = "uniform-box";
        c.horizon = 64;
        out.push_back(c);
    }
    {
        ExperimentConfig c = base();
        c.experiment = "domination";
        c.name = "domination-tent";
        c.profile = "indicator";
        c.profile_normalize = false;
        c.family = "uniform-box";
        c.function = "tent";
        c.box_lo = -4;
        c.box_hi = 4;
        c.resolution = 1024;
        c.horizon = 32;
        out.push_back(c);
    }
    {
        ExperimentConfig c = base();
        c.experiment = "weak-type";
        c.name = "weak-type-spike";
        c.function = "spike";
        c.family = "uniform-box";
        c.box_lo = -2;
        c.box_hi = 2;
        c.resolution = 768;
        c.horizon = 64;
        out.push_back(c);
    }
    {
        ExperimentConfig c = base();
        c.experiment = "dyadic";
        c.name = "dyadic-exponential";
        c.profile = "exponential";
        out.push_back(c);
    }
    {
        ExperimentConfig c = base();
        c.experiment = "divergence";
        c.name = "divergence-singular";
        c.family = "translation-singular";
        c.box_lo = -2;
        c.box_hi = 2;
        c.resolution = 2048;
        c.horizon = 64;
        out.push_back(c);
    }
    return out;
}

// ---------------------------------------------------------------------------
// report output
// ---------------------------------------------------------------------------

void write_report(const ExperimentReport& report, const std::string& dir, bool svg) {
    fs::create_directories(dir);
    {
        std::ofstream os(fs::path(dir) / "report.txt");
        os << "name=" << report.name << '\n';
        os << "claim=" << report.claim << '\n';
        os << "verdict=" << report.verdict << '\n';
        for (const auto& [k, v] : report.metadata) os << k << '=' << v << '\n';
        for (const auto& c : report.conditions) os << to_text(c);
        for (const auto& t : report.tables)
            os << "table=" << t.title << " rows=" << t.rows.size() << '\n';
        // runtime is the one non-deterministic field, kept out of the CSVs
        os << "runtime_ms=" << report.runtime_ms << '\n';
    }
    for (const auto& t : report.tables) {
        std::ofstream os(fs::path(dir) / (t.title + ".csv"));
        for (std::size_t i = 0; i < t.columns.size(); ++i)
            os << (i ? "," : "") << t.columns[i];
        os << '\n';
        for (const auto& row : t.rows) {
            for (std::size_t i = 0; i < row.size(); ++i)
                os << (i ? "," : "") << format_double(row[i]);
            os << '\n';
        }
        if (svg && t.columns.size() >= 2 && t.rows.size() >= 2) {
            std::vector<double> x;
            std::vector<std::vector<double>> series(t.columns.size() - 1);
            for (const auto& row : t.rows) {
                x.push_back(row[0]);
                for (std::size_t sidx = 1; sidx < row.size(); ++sidx)
                    series[sidx - 1].push_back(row[sidx]);
            }
            std::vector<std::string> labels(t.columns.begin() + 1, t.columns.end());
            write_svg_line_plot((fs::path(dir) / (t.title + ".svg")).string(), t.title, x,
                                series, labels);
        }
    }
}

int run_suite(const std::vector<ExperimentConfig>& configs, const std::string& out_dir) {
    bool any_fail = false;
    fs::create_directories(out_dir);
    for (const auto& cfg : configs) {
        ExperimentReport rep = run_experiment(cfg);
        write_report(rep, (fs::path(out_dir) / derived_name(cfg)).string(), cfg.svg);
        std::cout << rep.name << ": " << rep.verdict << '\n';
        any_fail = any_fail || rep.failed();
    }
    return any_fail ? 1 : 0;
}

}  // namespace randmoll
