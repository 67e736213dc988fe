#include "randmoll/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "randmoll/errors.hpp"
#include "randmoll/quadrature.hpp"

namespace randmoll {

namespace {

GridFunction abs_grid(const GridFunction& f) {
    GridFunction g = f;
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = std::abs(g[k]);
    return g;
}

// Exact integral of the piecewise-constant 1d grid function over [a, b]
// (zero extension), from prefix sums plus partial end cells.
struct PrefixIntegral {
    double lo, h;
    int n;
    std::vector<double> prefix;  // prefix[i] = integral over first i cells

    explicit PrefixIntegral(const GridFunction& f)
        : lo(f.lo(0)), h(f.pitch(0)), n(f.resolution(0)), prefix(f.resolution(0) + 1, 0.0) {
        for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + f[i] * h;
    }
    double cumulative(double x) const {  // integral over (-inf, x]
        double t = (x - lo) / h;
        if (t <= 0) return 0;
        if (t >= n) return prefix[n];
        int i = static_cast<int>(t);
        return prefix[i] + (t - i) * (prefix[i + 1] - prefix[i]);
    }
    double over(double a, double b) const { return cumulative(b) - cumulative(a); }
};

}  // namespace

MaximalEstimate maximal_operator(const FamilySpec& family, const Profile& profile,
                                 const GridFunction& f, int J, const MaximalOptions& opt) {
    return maximal_operator_snapshots(family, profile, f, {J}, opt).back();
}

std::vector<MaximalEstimate> maximal_operator_snapshots(const FamilySpec& family,
                                                        const Profile& profile,
                                                        const GridFunction& f,
                                                        const std::vector<int>& snapshot_js,
                                                        const MaximalOptions& opt) {
    if (snapshot_js.empty()) throw ConfigError("maximal operator: no snapshot horizons");
    const int J_last = snapshot_js.back();
    if (J_last > family.horizon)
        throw ConfigError("maximal operator horizon exceeds the family horizon");
    for (std::size_t i = 1; i < snapshot_js.size(); ++i)
        if (snapshot_js[i] <= snapshot_js[i - 1])
            throw ConfigError("snapshot horizons must be ascending");

    GridFunction absf = abs_grid(f);
    MaximalEstimate cur;
    cur.values = GridFunction(f.dimension(), {f.lo(0), f.lo(1)}, {f.hi(0), f.hi(1)},
                              {f.resolution(0), f.resolution(1)});
    cur.argmax_j.assign(f.size(), 0);

    std::vector<MaximalEstimate> out;
    std::size_t next = 0;
    for (int j = 1; j <= J_last; ++j) {
        JointDistributionSpec spec = family.generator(j);
        MollifyResult mj = spec.pure_translation()
                               ? mollify_translation(spec, absf)
                               : mollify(AveragedKernel(profile, spec, opt.kernel), absf,
                                         opt.mollify);
        cur.trust_radius = std::max(cur.trust_radius, mj.trust_radius);
        for (std::size_t c = 0; c < absf.size(); ++c) {
            if (mj.values[c] > cur.values[c]) {
                cur.values[c] = mj.values[c];
                cur.argmax_j[c] = j;
            }
        }
        while (next < snapshot_js.size() && snapshot_js[next] == j) {
            cur.horizon = j;
            out.push_back(cur);
            ++next;
        }
    }
    return out;
}

std::vector<double> default_hl_radii(const GridFunction& f, int count) {
    double pitch = f.pitch(0);
    double diam2 = 0;
    for (int a = 0; a < f.dimension(); ++a) {
        pitch = std::min(pitch, f.pitch(a));
        diam2 += (f.hi(a) - f.lo(a)) * (f.hi(a) - f.lo(a));
    }
    const double r_min = pitch;
    const double r_max = std::sqrt(diam2);
    std::vector<double> radii(count);
    for (int i = 0; i < count; ++i)
        radii[i] = r_min * std::pow(r_max / r_min, i / (count - 1.0));
    return radii;
}

GridFunction hl_maximal(const GridFunction& f, const std::vector<double>& radii) {
    if (radii.empty()) throw ConfigError("hl_maximal: empty radius set");
    for (double r : radii)
        if (!(r > 0)) throw ConfigError("hl_maximal: radii must be positive");
    GridFunction absf = abs_grid(f);
    GridFunction best(f.dimension(), {f.lo(0), f.lo(1)}, {f.hi(0), f.hi(1)},
                      {f.resolution(0), f.resolution(1)});
    if (f.dimension() == 1) {
        PrefixIntegral pre(absf);
        for (int p = 0; p < f.resolution(0); ++p) {
            const double x = f.lo(0) + (p + 0.5) * f.pitch(0);
            double m = 0;
            for (double r : radii) m = std::max(m, pre.over(x - r, x + r) / (2 * r));
            best[p] = m;
        }
        return best;
    }
    for (double r : radii) {
        GridFunction avg = disc_average(absf, r);
        for (std::size_t c = 0; c < best.size(); ++c)
            if (avg[c] > best[c]) best[c] = avg[c];
    }
    return best;
}

GridFunction hl_maximal_refined(const GridFunction& f, int count) {
    auto radii = default_hl_radii(f, count);
    if (f.dimension() == 2) return hl_maximal(f, radii);
    GridFunction absf = abs_grid(f);
    PrefixIntegral pre(absf);
    GridFunction best(f.dimension(), {f.lo(0), f.lo(1)}, {f.hi(0), f.hi(1)},
                      {f.resolution(0), f.resolution(1)});
    for (int p = 0; p < f.resolution(0); ++p) {
        const double x = f.lo(0) + (p + 0.5) * f.pitch(0);
        double m = 0;
        int arg = 0;
        for (int i = 0; i < static_cast<int>(radii.size()); ++i) {
            double avg = pre.over(x - radii[i], x + radii[i]) / (2 * radii[i]);
            if (avg > m) {
                m = avg;
                arg = i;
            }
        }
        // local refinement between the argmax neighbors
        double r_lo = radii[std::max(0, arg - 1)];
        double r_hi = radii[std::min<int>(radii.size() - 1, arg + 1)];
        for (int i = 0; i <= 24; ++i) {
            double r = r_lo * std::pow(r_hi / r_lo, i / 24.0);
            m = std::max(m, pre.over(x - r, x + r) / (2 * r));
        }
        best[p] = m;
    }
    return best;
}

ConditionReport check_domination(const FamilySpec& family, const Profile& profile,
                                 const GridFunction& f, int J, const MaximalOptions& opt) {
    if (profile.kind() != ProfileKind::indicator &&
        profile.kind() != ProfileKind::scaled_indicator)
        throw RefusedError("domination check needs an indicator-type profile");
    ConditionReport hyp = check_density_hypotheses(family);
    if (!hyp.passed())
        throw RefusedError("domination refused: density hypotheses failed (" + hyp.message +
                           ")");
    const double a_hat = hyp.measured;
    const int n = f.dimension();
    const double alpha = profile.param("alpha", 1.0);
    const double beta = profile.param("beta", 1.0);
    const double c_bound = alpha * std::pow(beta, n) * std::pow(beta + 1.0, n) * a_hat *
                           ball_volume(n) * ball_volume(n);

    MaximalEstimate est = maximal_operator(family, profile, f, J, opt);
    GridFunction fstar = hl_maximal_refined(f);

    ConditionReport rep;
    rep.check = "hl-domination";
    rep.tolerance = 1e-9;
    double worst = 0;
    std::size_t worst_cell = 0;
    int checked = 0;
    for (std::size_t c = 0; c < f.size(); ++c) {
        if (!in_trust_region(f, c, est.trust_radius)) continue;
        if (fstar[c] <= 0) continue;
        double ratio = est.values[c] / fstar[c];
        ++checked;
        if (ratio > worst) {
            worst = ratio;
            worst_cell = c;
        }
    }
    if (checked == 0)
        throw RefusedError("domination check: trust region is empty (kernel support covers the box)");
    rep.measured = worst;
    rep.lines.push_back({"domination-ratio", J, worst, c_bound,
                         worst <= c_bound * (1 + rep.tolerance) ? Verdict::pass : Verdict::fail,
                         "A=" + format_double(a_hat)});
    rep.verdict = rep.lines.back().verdict;
    if (rep.verdict == Verdict::fail) {
        Point w = f.center(worst_cell);
        rep.message = "worst ratio at x1=" + format_double(w[0]);
    } else {
        std::ostringstream os;
        os << "checked " << checked << " trust points";
        rep.message = os.str();
    }
    return rep;
}

namespace {

double level_measure(const GridFunction& m, double lambda) {
    std::size_t count = 0;
    for (std::size_t c = 0; c < m.size(); ++c)
        if (m[c] > lambda) ++count;
    return count * m.cell_volume();
}

}  // namespace

std::vector<WeakTypeCurve> weak_type_curves(const FamilySpec& family, const Profile& profile,
                                            const GridFunction& f,
                                            const std::vector<int>& snapshot_js,
                                            const std::vector<double>& lambdas,
                                            const MaximalOptions& opt) {
    auto snaps = maximal_operator_snapshots(family, profile, f, snapshot_js, opt);
    const double l1 = f.l1_norm();
    std::vector<WeakTypeCurve> out;
    for (const auto& est : snaps) {
        WeakTypeCurve curve;
        curve.horizon = est.horizon;
        for (double lam : lambdas) {
            double meas = level_measure(est.values, lam);
            curve.lambda_measure.emplace_back(lam, meas);
            curve.a_weak = std::max(curve.a_weak, lam * meas / l1);
        }
        out.push_back(std::move(curve));
    }
    return out;
}

ConditionReport estimate_weak_type(const FamilySpec& family, const Profile& profile,
                                   const GridFunction& f, int J,
                                   const std::vector<double>& lambdas,
                                   const MaximalOptions& opt) {
    auto curves = weak_type_curves(family, profile, f, {J}, lambdas, opt);
    const auto& curve = curves.front();
    ConditionReport rep;
    rep.check = "weak-type";
    rep.measured = curve.a_weak;
    rep.verdict = Verdict::info;
    for (const auto& [lam, meas] : curve.lambda_measure) {
        ReportLine line{"weak-type-level", J, lam * meas / f.l1_norm(), std::nullopt,
                        Verdict::info, "lambda=" + format_double(lam)};
        rep.lines.push_back(line);
    }
    rep.message = "empirical evidence only";
    return rep;
}

ConditionReport check_zo_conditions(const FamilySpec& family, const Profile& profile, int J) {
    ConditionReport rep;
    rep.check = "zo-conditions";
    const int n = family.dimension;

    // (a) uniform bound of the kernel masses
    double max_mass = 0;
    for (int j = 1; j <= J; ++j) {
        AveragedKernel k(profile, family.generator(j), Quadrature{});
        double m = k.mass();
        max_mass = std::max(max_mass, m);
        if (j <= 4 || j == J)
            rep.lines.push_back({"zo-mass", j, m, std::nullopt, Verdict::info, ""});
    }
    rep.lines.push_back({"zo-mass-max", J, max_mass, std::nullopt,
                         std::isfinite(max_mass) ? Verdict::pass : Verdict::fail, ""});

    // gradient-criterion bound when available
    std::optional<double> b_hat;
    if (profile.flags().c1 && profile.has_derivative()) {
        ConditionReport grad = check_gradient_bound(profile);
        if (grad.passed()) b_hat = grad.measured;
    }
    const double omega = sphere_surface(n);
    std::optional<double> bound;
    if (b_hat) bound = std::pow(2.0, n) * *b_hat * omega / 2.0;

    std::vector<AveragedKernel> kernels;
    kernels.reserve(J);
    for (int j = 1; j <= J; ++j)
        kernels.emplace_back(profile, family.generator(j), Quadrature{});
    auto sup_diff = [&](const Point& xz, const Point& x) {
        double sup = 0;
        for (const auto& k : kernels)
            sup = std::max(sup, std::abs(k(xz) - k(x)));
        return sup;
    };

    bool all_ok = true;
    for (double zmag : {1e-3, 1e-2, 1e-1, 0.3, 1.0}) {
        const double R = std::max(10.0, 100.0 * zmag);
        double integral = 0;
        if (n == 1) {
            Point z{zmag};
            auto seg = [&](double a, double b) {
                return integrate_gk(
                           [&](double t) { return sup_diff(Point{t - zmag}, Point{t}); }, a, b,
                           1e-4, 1e-7, 80)
                    .value;
            };
            integral = seg(2 * zmag, R) + seg(-R, -2 * zmag);
        } else {
            Point z(n);
            z[0] = zmag;
            const int m_theta = 24;
            integral = integrate_gk(
                           [&](double rho) {
                               double acc = 0;
                               for (int i = 0; i < m_theta; ++i) {
                                   double th = 2 * M_PI * i / m_theta;
                                   Point x{rho * std::cos(th), rho * std::sin(th)};
                                   acc += sup_diff(x - z, x);
                               }
                               return rho * (2 * M_PI / m_theta) * acc;
                           },
                           2 * zmag, R, 1e-4, 1e-8, 200)
                           .value;
        }
        double tail = b_hat ? std::pow(2.0, n) * *b_hat * omega * zmag / R : 0.0;
        double total = integral + tail;
        Verdict v = Verdict::info;
        if (bound) {
            v = total <= *bound + 1e-3 ? Verdict::pass : Verdict::fail;
            if (v == Verdict::fail) all_ok = false;
        }
        ReportLine line{"zo-smoothness", std::nullopt, total, bound, v,
                        "z=" + format_double(zmag) + " R=" + format_double(R)};
        rep.lines.push_back(line);
        rep.measured = std::max(rep.measured, total);
    }
    if (std::isnan(rep.measured)) rep.measured = 0;
    rep.verdict = (std::isfinite(max_mass) && all_ok) ? Verdict::pass : Verdict::fail;
    if (bound)
        rep.message = "gradient bound B=" + format_double(*b_hat) +
                      " gives bound=" + format_double(*bound);
    else
        rep.message = "no gradient bound available; smoothness integrals reported as measured";
    return rep;
}

ConditionReport dyadic_series_bound(const Profile& profile) {
    ConditionReport hyp = check_moment_and_monotone(profile);
    if (!hyp.passed())
        throw RefusedError("dyadic series bound refused: profile hypotheses failed (" +
                           hyp.message + ")");
    const int n = profile.dimension();
    const double moment = hyp.measured;  // omega_n int rho^{2n-1} phi
    const double omega = sphere_surface(n);

    double series = 0;
    for (int l = 1; l <= 300; ++l) {
        const double arg = std::pow(2.0, l - 1);
        if (arg > profile.support_radius()) break;
        const double term =
            profile(arg) * std::pow(2.0, n * l) * std::pow(std::pow(2.0, l) + 1.0, n);
        series += term;
        if (term < 1e-15 * series) break;
    }
    const double bound =
        profile(1.0) * std::pow(2.0, n) * std::pow(6.0, n) + moment / (omega * std::log(2.0));

    ConditionReport rep;
    rep.check = "dyadic-series-bound";
    rep.measured = series;
    rep.lines.push_back({"dyadic-series", std::nullopt, series, bound,
                         series <= bound ? Verdict::pass : Verdict::fail,
                         "moment=" + format_double(moment)});
    rep.verdict = rep.lines.back().verdict;
    return rep;
}

}  // namespace randmoll
