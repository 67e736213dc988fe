#include "randmoll/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "randmoll/errors.hpp"
#include "randmoll/point.hpp"

namespace randmoll {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Supremum grid: 512 log-spaced points per decade over [1e-6, 1e6], wide
// enough for profiles singular at the origin.
constexpr double kGridLo = 1e-6;
constexpr int kDecades = 12;
constexpr int kPerDecade = 512;
}  // namespace

Profile::Profile(std::string name, int dimension, ProfileKind kind,
                 std::function<double(double)> evaluate,
                 std::function<double(double)> derivative, ProfileFlags flags,
                 double support_radius, std::map<std::string, double> params)
    : name_(std::move(name)),
      dimension_(dimension),
      kind_(kind),
      evaluate_(std::move(evaluate)),
      derivative_(std::move(derivative)),
      flags_(flags),
      support_radius_(support_radius),
      params_(std::move(params)) {
    if (dimension_ < 1) throw ConfigError("profile dimension must be >= 1");
    flags_.c1 = flags_.c1 && has_derivative();
}

double Profile::derivative(double rho) const {
    if (!derivative_)
        throw UnsupportedError("profile '" + name_ + "' has no derivative (not declared C1)");
    return derivative_(rho);
}

double Profile::param(const std::string& key, double fallback) const {
    auto it = params_.find(key);
    return it == params_.end() ? fallback : it->second;
}

RadialIntegral radial_mass_integral(const Profile& p) {
    const int n = p.dimension();
    RadialIntegral r = integrate_radial([&](double rho) { return p(rho); }, n - 1.0,
                                        p.support_radius(), 2 * n);
    r.value *= sphere_surface(n);
    r.tail *= sphere_surface(n);
    return r;
}

double radial_mass(const Profile& p) {
    RadialIntegral r = radial_mass_integral(p);
    if (!r.convergent)
        throw NumericsError("profile '" + p.name() + "' radial integral: " + r.diagnostic);
    return r.value;
}

RadialIntegral radial_moment_integral(const Profile& p) {
    const int n = p.dimension();
    RadialIntegral r = integrate_radial([&](double rho) { return p(rho); }, 2.0 * n - 1.0,
                                        p.support_radius(), 2 * n);
    r.value *= sphere_surface(n);
    r.tail *= sphere_surface(n);
    return r;
}

Profile normalize(const Profile& p) {
    RadialIntegral mass = radial_mass_integral(p);
    if (!mass.convergent)
        throw NumericsError("cannot normalize '" + p.name() + "': " + mass.diagnostic);
    if (!(mass.value > 0))
        throw NumericsError("cannot normalize '" + p.name() + "': zero radial mass");
    double scale = 1.0 / mass.value;
    if (std::abs(scale - 1.0) <= 1e-12) scale = 1.0;

    ProfileFlags flags = p.flags();
    flags.normalized = true;
    auto base = [p](double rho) { return p(rho); };
    std::function<double(double)> scaled;
    if (scale == 1.0)
        scaled = base;
    else
        scaled = [base, scale](double rho) { return scale * base(rho); };
    std::function<double(double)> dscaled;
    if (p.has_derivative()) {
        auto dbase = [p](double rho) { return p.derivative(rho); };
        if (scale == 1.0)
            dscaled = dbase;
        else
            dscaled = [dbase, scale](double rho) { return scale * dbase(rho); };
    }
    std::map<std::string, double> params;
    params["scale"] = scale;
    if (p.kind() == ProfileKind::scaled_indicator || p.kind() == ProfileKind::indicator) {
        params["alpha"] = scale * p.param("alpha", 1.0);
        params["beta"] = p.param("beta", 1.0);
    }
    return Profile(p.name(), p.dimension(), p.kind(), std::move(scaled), std::move(dscaled),
                   flags, p.support_radius(), std::move(params));
}

namespace {

std::vector<double> supremum_grid() {
    std::vector<double> g;
    g.reserve(kDecades * kPerDecade + 1);
    const double ratio = std::pow(10.0, 1.0 / kPerDecade);
    double rho = kGridLo;
    for (int i = 0; i <= kDecades * kPerDecade; ++i) {
        g.push_back(rho);
        rho *= ratio;
    }
    return g;
}

}  // namespace

ConditionReport check_gradient_bound(const Profile& p) {
    if (!p.flags().c1 || !p.has_derivative())
        throw UnsupportedError("gradient bound check needs a C1 profile with a derivative");
    const int n = p.dimension();
    ConditionReport rep;
    rep.check = "gradient-bound";

    const auto grid = supremum_grid();
    double best = 0, best_rho = 0;
    std::vector<double> decade_max(kDecades, 0.0);
    std::vector<double> decade_arg(kDecades, 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double rho = grid[i];
        const double v = std::abs(p.derivative(rho)) * std::pow(rho, n + 1.0);
        if (v > best) {
            best = v;
            best_rho = rho;
        }
        int d = std::min<int>(kDecades - 1, static_cast<int>(i) / kPerDecade);
        if (v > decade_max[d]) {
            decade_max[d] = v;
            decade_arg[d] = rho;
        }
    }
    rep.measured = best;
    for (int d = 0; d < kDecades; ++d)
        rep.lines.push_back({"gradient-bound-decade", d - 6, decade_max[d], std::nullopt,
                             Verdict::info, ""});

    const bool grows = decade_max[kDecades - 1] > decade_max[kDecades - 2] * (1.0 + 1e-9) &&
                       decade_max[kDecades - 2] > decade_max[kDecades - 3] * (1.0 + 1e-9);
    if (!std::isfinite(best) || grows) {
        rep.verdict = Verdict::fail;
        std::ostringstream os;
        os << "growth of |phi'(rho)| rho^{n+1} across top decades, witness rho="
           << decade_arg[kDecades - 1];
        rep.message = os.str();
    } else {
        rep.verdict = Verdict::pass;
        std::ostringstream os;
        os << "B=" << best << " attained at rho=" << best_rho;
        rep.message = os.str();
    }
    return rep;
}

ConditionReport check_moment_and_monotone(const Profile& p) {
    ConditionReport rep;
    rep.check = "moment-and-monotone";
    const auto grid = supremum_grid();

    // Boundedness near the origin via the local growth exponent.
    double f1 = p(1e-9), f2 = p(4e-9);
    bool bounded = true;
    if (f1 > 0 && f2 > 0) {
        double p0 = std::log(f1 / f2) / std::log(4.0);
        bounded = p0 < 1e-3;
    }
    double sup = 0;
    for (double rho : grid)
        if (rho <= 1.0) sup = std::max(sup, p(rho));
    rep.lines.push_back({"bounded", std::nullopt, sup, std::nullopt,
                         bounded ? Verdict::pass : Verdict::fail,
                         bounded ? "" : "grows toward the origin"});

    // Pairwise monotonicity on the grid.
    int violations = 0;
    double witness = 0;
    const double slack = 1e-12 * std::max(1.0, sup);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (p(grid[i]) < p(grid[i + 1]) - slack) {
            if (violations == 0) witness = grid[i + 1];
            ++violations;
        }
    }
    rep.lines.push_back({"nonincreasing", std::nullopt, static_cast<double>(violations),
                         std::nullopt, violations == 0 ? Verdict::pass : Verdict::fail,
                         violations == 0 ? "" : "first violation near rho=" + format_double(witness)});

    RadialIntegral mom = radial_moment_integral(p);
    rep.lines.push_back({"nth-moment", std::nullopt, mom.value, std::nullopt,
                         mom.convergent ? Verdict::pass : Verdict::fail, mom.diagnostic});

    rep.measured = mom.value;
    rep.verdict = (bounded && violations == 0 && mom.convergent) ? Verdict::pass : Verdict::fail;
    if (!mom.convergent) rep.message = mom.diagnostic;
    return rep;
}

double effective_radius(const Profile& p, double tail_fraction) {
    if (std::isfinite(p.support_radius())) return p.support_radius();
    RadialIntegral total = radial_mass_integral(p);
    if (!total.convergent) throw NumericsError("effective radius of non-integrable profile");
    const int n = p.dimension();
    auto integrand = [&](double rho) { return std::pow(rho, n - 1.0) * p(rho); };
    const double target = (1.0 - tail_fraction) * total.value / sphere_surface(n);
    double lo = 0, hi = 1.0;
    auto mass_to = [&](double R) { return integrate_gk(integrand, 0, R, 1e-10).value; };
    while (mass_to(hi) < target && hi < 1e9) hi *= 2;
    for (int i = 0; i < 80; ++i) {
        double mid = 0.5 * (lo + hi);
        if (mass_to(mid) < target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-12 * hi) break;
    }
    return hi;
}

Profile make_profile(const std::string& name, int n,
                     const std::map<std::string, double>& params) {
    auto get = [&](const std::string& key, double fallback) {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    };
    if (name == "indicator") {
        ProfileFlags f{.normalized = false, .c1 = false, .bounded = true,
                       .nonincreasing = true, .finite_nth_moment = true};
        return Profile(name, n, ProfileKind::indicator,
                       [](double rho) { return rho > 0 && rho < 1 ? 1.0 : 0.0; }, {}, f, 1.0,
                       {{"alpha", 1.0}, {"beta", 1.0}});
    }
    if (name == "scaled-indicator") {
        const double alpha = get("alpha", 1.0), beta = get("beta", 1.0);
        if (alpha <= 0 || beta <= 0) throw ConfigError("scaled-indicator needs alpha,beta > 0");
        ProfileFlags f{.normalized = false, .c1 = false, .bounded = true,
                       .nonincreasing = true, .finite_nth_moment = true};
        return Profile(name, n, ProfileKind::scaled_indicator,
                       [alpha, beta](double rho) { return rho > 0 && rho < beta ? alpha : 0.0; },
                       {}, f, beta, {{"alpha", alpha}, {"beta", beta}});
    }
    if (name == "power-tail") {
        const double delta = get("delta", 1.0);
        if (delta <= 0) throw ConfigError("power-tail needs delta > 0");
        const double q = n + 1 + delta;
        ProfileFlags f{.normalized = false, .c1 = true, .bounded = true,
                       .nonincreasing = true, .finite_nth_moment = delta > n - 1};
        return Profile(name, n, ProfileKind::power_tail,
                       [q](double rho) { return std::pow(1.0 + rho, -q); },
                       [q](double rho) { return -q * std::pow(1.0 + rho, -q - 1.0); }, f, kInf,
                       {{"delta", delta}});
    }
    if (name == "gaussian") {
        ProfileFlags f{.normalized = false, .c1 = true, .bounded = true,
                       .nonincreasing = true, .finite_nth_moment = true};
        return Profile(name, n, ProfileKind::gaussian,
                       [](double rho) { return std::exp(-rho * rho); },
                       [](double rho) { return -2.0 * rho * std::exp(-rho * rho); }, f, kInf);
    }
    if (name == "exponential") {
        ProfileFlags f{.normalized = false, .c1 = true, .bounded = true,
                       .nonincreasing = true, .finite_nth_moment = true};
        return Profile(name, n, ProfileKind::custom, [](double rho) { return std::exp(-rho); },
                       [](double rho) { return -std::exp(-rho); }, f, kInf);
    }
    if (name == "poisson") {
        const double q = 0.5 * (n + 1);
        ProfileFlags f{.normalized = false, .c1 = true, .bounded = true,
                       .nonincreasing = true, .finite_nth_moment = false};
        return Profile(name, n, ProfileKind::custom,
                       [q](double rho) { return std::pow(1.0 + rho * rho, -q); },
                       [q](double rho) {
                           return -2.0 * q * rho * std::pow(1.0 + rho * rho, -q - 1.0);
                       },
                       f, kInf);
    }
    if (name == "origin-spike") {
        // Integrable but unbounded at the origin; stress case for checks that
        // must tolerate a singular profile.
        if (n != 1) throw ConfigError("origin-spike is a one-dimensional stress profile");
        ProfileFlags f{.normalized = false, .c1 = false, .bounded = false,
                       .nonincreasing = true, .finite_nth_moment = true};
        return Profile(name, n, ProfileKind::custom,
                       [](double rho) { return rho > 0 && rho < 1 ? 1.0 / std::sqrt(rho) : 0.0; },
                       {}, f, 1.0);
    }
    throw ConfigError("unknown profile '" + name + "'");
}

std::vector<std::string> profile_catalog() {
    return {"indicator", "scaled-indicator", "power-tail", "gaussian",
            "exponential", "poisson", "origin-spike"};
}

}  // namespace randmoll
