#include "randmoll/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <mutex>

#include "randmoll/errors.hpp"
#include "randmoll/quadrature.hpp"
#include "randmoll/rng.hpp"

namespace randmoll {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t mix_seed(std::uint64_t seed, const Point& x) {
    std::uint64_t h = 1469598103934665603ull ^ seed;
    for (int i = 0; i < x.dim(); ++i) {
        std::uint64_t bits;
        double v = x[i];
        static_assert(sizeof(bits) == sizeof(v));
        std::memcpy(&bits, &v, sizeof(bits));
        h = (h ^ bits) * 1099511628211ull;
    }
    return h;
}

// int s^{-n} phi(r/s) w(s) ds over [lo, hi] for a density weight w. Compact
// profiles give a positive lower limit directly; unbounded-support profiles go
// through the substitution u = r/s, which moves the s->0 region into the
// profile tail where it is integrable.
double weighted_radial_average(const Profile& phi, int n, double r, double lo, double hi,
                               const std::function<double(double)>& w, double phi_r12,
                               double rel_tol) {
    if (hi <= lo) return 0;
    if (r < 0) throw NumericsError("negative radius");
    const double r_phi = phi.support_radius();
    if (r == 0) {
        const double phi0 = phi(1e-14);
        if (phi0 == 0) return 0;
        if (lo <= 0) return kInf;
        return integrate_gk([&](double s) { return std::pow(s, -n) * phi0 * w(s); }, lo, hi,
                            rel_tol)
            .value;
    }
    if (std::isfinite(r_phi)) {
        const double s_lo = std::max(lo, r / r_phi);
        if (s_lo >= hi) return 0;
        return integrate_gk([&](double s) { return std::pow(s, -n) * phi(r / s) * w(s); }, s_lo,
                            hi, rel_tol)
            .value;
    }
    const double u_lo = r / hi;
    double u_hi = lo > 0 ? r / lo : kInf;
    u_hi = std::min(u_hi, std::max(phi_r12, 4.0 * u_lo));
    if (u_hi <= u_lo) return 0;
    return std::pow(r, 1.0 - n) *
           integrate_gk(
               [&](double u) { return std::pow(u, n - 2.0) * phi(u) * w(r / u); }, u_lo, u_hi,
               rel_tol)
               .value;
}

double radial_profile_average(const Profile& phi, int n, const ScalarMarginal& nu, double r,
                              double phi_r12, double rel_tol) {
    if (const auto* a = std::get_if<ScalarAtoms>(&nu.form())) {
        double acc = 0;
        for (const auto& [s, wt] : a->atoms) {
            if (s <= 0)
                throw UnsupportedError(
                    "pure-translation kernels are not pointwise-evaluable; use "
                    "translation_only_apply");
            acc += wt * std::pow(s, -n) * phi(r / s);
        }
        return acc;
    }
    if (const auto* u = std::get_if<ScalarUniform>(&nu.form())) {
        const double density = 1.0 / (u->hi - u->lo);
        return weighted_radial_average(phi, n, r, u->lo, u->hi,
                                       [density](double) { return density; }, phi_r12, rel_tol);
    }
    const auto& d = std::get<ScalarDensity>(nu.form());
    return weighted_radial_average(phi, n, r, d.lo, d.hi, d.pdf, phi_r12, rel_tol);
}

}  // namespace

struct AveragedKernel::MassCache {
    std::mutex mutex;
    std::optional<EvalResult> value;
};

AveragedKernel::AveragedKernel(Profile profile, JointDistributionSpec spec,
                               KernelStrategy strategy)
    : profile_(std::move(profile)),
      spec_(std::move(spec)),
      strategy_(std::move(strategy)),
      mass_cache_(std::make_shared<MassCache>()) {
    if (profile_.dimension() != spec_.dimension())
        throw ConfigError("profile and spec dimensions disagree");
    if (const auto* q = std::get_if<Quadrature>(&strategy_)) {
        if (q->s_nodes < 16 || q->y_nodes < 16)
            throw ConfigError("quadrature strategy needs at least 16 nodes per axis");
    }
    if (const auto* m = std::get_if<MonteCarloEval>(&strategy_)) {
        if (m->samples < 1000)
            throw ConfigError("monte-carlo strategy needs at least 1000 samples");
    }
    if (std::get_if<AtomsExact>(&strategy_) &&
        !std::holds_alternative<JointAtoms>(spec_.form()))
        throw ConfigError("atoms-exact strategy needs an atom-form spec");
    profile_radius_ = effective_radius(profile_, 1e-6);
    profile_radius12_ = std::isfinite(profile_.support_radius())
                            ? profile_.support_radius()
                            : effective_radius(profile_, 1e-12);
}

bool AveragedKernel::is_radial() const {
    if (spec_.mean_is_zero()) return true;
    if (const auto* d = std::get_if<JointDensity>(&spec_.form())) return d->y_radial;
    if (const auto* c = std::get_if<JointCoupled>(&spec_.form()))
        return c->rotation_equivariant;
    return false;
}

double AveragedKernel::support_radius() const {
    if (spec_.pure_translation()) return spec_.y_radius();
    return spec_.s_upper() * profile_radius_ + spec_.y_radius();
}

EvalResult AveragedKernel::evaluate_with_error(const Point& x) const {
    if (x.dim() != dimension()) throw ConfigError("evaluation point dimension mismatch");
    if (spec_.pure_translation())
        throw UnsupportedError(
            "pure-translation kernels are not pointwise-evaluable; use translation_only_apply");

    if (std::holds_alternative<AtomsExact>(strategy_)) {
        const auto& atoms = std::get<JointAtoms>(spec_.form()).atoms;
        const int n = dimension();
        double acc = 0;
        for (const auto& atom : atoms)
            acc += atom.weight * std::pow(atom.s, -n) * profile_((x - atom.y).norm() / atom.s);
        return {acc, 0.0};
    }
    if (std::holds_alternative<Quadrature>(strategy_)) return eval_quadrature(x);

    const auto& mc = std::get<MonteCarloEval>(strategy_);
    const int n = dimension();
    auto draws = spec_.sample(mc.samples, mix_seed(mc.seed, x));
    MeanAccumulator acc;
    for (const auto& [s, y] : draws) {
        if (s <= 0) continue;
        acc.add(std::pow(s, -n) * profile_((x - y).norm() / s));
    }
    return {acc.mean(), acc.std_error()};
}

EvalResult AveragedKernel::eval_quadrature(const Point& x) const {
    const int n = dimension();
    const auto& q = std::get<Quadrature>(strategy_);
    const double phi_r12 = profile_radius12_;

    if (const auto* a = std::get_if<JointAtoms>(&spec_.form())) {
        double acc = 0;
        for (const auto& atom : a->atoms)
            acc += atom.weight * std::pow(atom.s, -n) * profile_((x - atom.y).norm() / atom.s);
        return {acc, 0.0};
    }

    if (const auto* p = std::get_if<JointProduct>(&spec_.form())) {
        auto radial = [&](double r) {
            return radial_profile_average(profile_, n, p->variance, r, phi_r12, q.rel_tol);
        };
        if (auto y0 = p->mean.as_point_mass()) return {radial((x - *y0).norm()), 0.0};
        if (const auto* ma = std::get_if<VectorAtoms>(&p->mean.form())) {
            double acc = 0;
            for (const auto& [y, wt] : ma->atoms) acc += wt * radial((x - y).norm());
            return {acc, 0.0};
        }
        if (n == 1) {
            // adaptive over the mean with a break at y = x, where the radial
            // average may have an integrable singularity
            double lo, hi;
            std::function<double(double)> w;
            if (const auto* bu = std::get_if<BoxUniform>(&p->mean.form())) {
                lo = bu->lo[0];
                hi = bu->hi[0];
                double dens = 1.0 / (hi - lo);
                w = [dens](double) { return dens; };
            } else {
                const auto& vd = std::get<VectorDensity>(p->mean.form());
                lo = vd.lo[0];
                hi = vd.hi[0];
                auto pdf = vd.pdf;
                w = [pdf](double y) { return pdf(Point{y}); };
            }
            const double edge = spec_.s_upper() * profile_radius_;
            auto val = integrate_gk_breaks(
                [&](double y) { return radial(std::abs(x[0] - y)) * w(y); }, lo, hi,
                {x[0], x[0] - edge, x[0] + edge}, q.rel_tol);
            return {val.value, 0.0};
        }
        return {p->mean.integrate([&](const Point& y) { return radial((x - y).norm()); }), 0.0};
    }

    if (const auto* c = std::get_if<JointCoupled>(&spec_.form())) {
        auto branch = [&](const Point& u) {
            auto integrand = [&](double s) {
                return std::pow(s, -n) * profile_((x - c->couple(s, u)).norm() / s);
            };
            const double r_phi = profile_radius_;
            const double C = c->radius_factor;
            std::vector<double> breaks;
            double r = x.norm();
            if (r > 0 && r_phi + C > 0) breaks.push_back(r / (r_phi + C));
            if (r > 0 && r_phi > C) breaks.push_back(r / (r_phi - C));
            if (const auto* ua = std::get_if<ScalarAtoms>(&c->variance.form())) {
                double acc = 0;
                for (const auto& [s, wt] : ua->atoms) {
                    if (s <= 0) throw UnsupportedError("coupled spec with zero variance atom");
                    acc += wt * integrand(s);
                }
                return acc;
            }
            double lo, hi;
            std::function<double(double)> w;
            if (const auto* uu = std::get_if<ScalarUniform>(&c->variance.form())) {
                lo = uu->lo;
                hi = uu->hi;
                double dens = 1.0 / (hi - lo);
                w = [dens](double) { return dens; };
            } else {
                const auto& sd = std::get<ScalarDensity>(c->variance.form());
                lo = sd.lo;
                hi = sd.hi;
                w = sd.pdf;
            }
            return integrate_gk_breaks([&](double s) { return integrand(s) * w(s); }, lo, hi,
                                       breaks, q.rel_tol)
                .value;
        };
        if (n == 1) return {0.5 * (branch(Point{1.0}) + branch(Point{-1.0})), 0.0};
        if (n == 2) {
            const int m = 64;
            double acc = 0;
            for (int i = 0; i < m; ++i) {
                double th = 2 * M_PI * i / m;
                acc += branch(Point{std::cos(th), std::sin(th)});
            }
            return {acc / m, 0.0};
        }
        throw UnsupportedError("coupled-form quadrature supports n <= 2");
    }

    const auto& d = std::get<JointDensity>(spec_.form());
    if (n == 1) {
        auto inner = [&](double y0) {
            Point y{y0};
            auto w = [&](double s) { return d.pdf(s, y); };
            return weighted_radial_average(profile_, n, std::abs(x[0] - y0), 0, d.s_max, w,
                                           phi_r12, q.rel_tol);
        };
        const double edge = d.s_max * profile_radius_;
        auto val = integrate_gk_breaks(inner, -d.y_radius, d.y_radius,
                                       {x[0], x[0] - edge, x[0] + edge}, q.rel_tol);
        return {val.value, 0.0};
    }
    if (n == 2) {
        // polar tensor rule in the mean variable; fixed-order nodes keep the
        // cost bounded for tabulation-heavy callers
        const auto& gl_r = gauss_legendre(q.y_nodes);
        const auto& gl_s = gauss_legendre(q.s_nodes);
        const int m_theta = 32;
        const double r_phi = profile_radius_;
        double acc = 0;
        for (std::size_t ir = 0; ir < gl_r.nodes.size(); ++ir) {
            const double rr = d.y_radius * 0.5 * (gl_r.nodes[ir] + 1.0);
            const double wr = gl_r.weights[ir] * d.y_radius * 0.5;
            for (int it = 0; it < m_theta; ++it) {
                const double th = 2 * M_PI * it / m_theta;
                Point y{rr * std::cos(th), rr * std::sin(th)};
                const double rxy = (x - y).norm();
                const double s_lo =
                    std::isfinite(profile_.support_radius()) ? rxy / r_phi : 0.0;
                if (s_lo >= d.s_max) continue;
                double inner = 0;
                if (std::isfinite(profile_.support_radius())) {
                    for (std::size_t is = 0; is < gl_s.nodes.size(); ++is) {
                        const double s =
                            s_lo + (d.s_max - s_lo) * 0.5 * (gl_s.nodes[is] + 1.0);
                        inner += gl_s.weights[is] * std::pow(s, -n) * profile_(rxy / s) *
                                 d.pdf(s, y);
                    }
                    inner *= (d.s_max - s_lo) * 0.5;
                } else {
                    auto w = [&](double s) { return d.pdf(s, y); };
                    inner = weighted_radial_average(profile_, n, rxy, 0, d.s_max, w, phi_r12,
                                                    q.rel_tol * 10);
                }
                acc += wr * (2 * M_PI / m_theta) * rr * inner;
            }
        }
        return {acc, 0.0};
    }
    throw UnsupportedError("joint density quadrature supports n <= 2");
}

EvalResult AveragedKernel::compute_mass() const {
    const int n = dimension();
    if (spec_.pure_translation()) return {spec_.total_mass(), 0.0};
    if (std::holds_alternative<AtomsExact>(strategy_)) return {radial_mass(profile_), 0.0};

    if (std::holds_alternative<Quadrature>(strategy_)) {
        const double R = std::isfinite(profile_.support_radius())
                             ? support_radius()
                             : spec_.s_upper() * profile_radius12_ + spec_.y_radius();
        std::vector<double> breaks;
        const double edge = spec_.s_upper() * profile_radius_;
        const double yr = spec_.y_radius();
        for (double b : {yr, std::abs(edge - yr), edge, edge + yr})
            if (b > 0 && b < R) breaks.push_back(b);
        if (is_radial()) {
            auto integrand = [&](double rho) {
                Point x(n);
                x[0] = rho;
                return std::pow(rho, n - 1.0) * evaluate_with_error(x).value;
            };
            auto val = integrate_gk_breaks(integrand, 0, R, breaks, 1e-8, 1e-12, 600);
            return {sphere_surface(n) * val.value, 0.0};
        }
        if (n == 1) {
            auto integrand = [&](double t) { return evaluate_with_error(Point{t}).value; };
            std::vector<double> bks;
            for (double b : breaks) {
                bks.push_back(b);
                bks.push_back(-b);
            }
            bks.push_back(0);
            auto val = integrate_gk_breaks(integrand, -R, R, bks, 1e-8, 1e-12, 600);
            return {val.value, 0.0};
        }
        // n == 2, non-radial: fixed-order polar rule
        const auto& gl = gauss_legendre(24);
        const int m_theta = 32;
        double acc = 0;
        for (std::size_t ir = 0; ir < gl.nodes.size(); ++ir) {
            const double rho = R * 0.5 * (gl.nodes[ir] + 1.0);
            const double w = gl.weights[ir] * R * 0.5;
            for (int it = 0; it < m_theta; ++it) {
                const double th = 2 * M_PI * it / m_theta;
                acc += w * (2 * M_PI / m_theta) * rho *
                       evaluate_with_error(Point{rho * std::cos(th), rho * std::sin(th)}).value;
            }
        }
        return {acc, 0.0};
    }

    // Monte Carlo: radius from a Lomax reference whose tail covers power-law
    // kernels, direction uniform; per-point inner estimate stays unbiased.
    const auto& mc = std::get<MonteCarloEval>(strategy_);
    const double R_scale = std::max(1e-6, support_radius());
    const int inner = 64;
    const int outer = std::max(100, mc.samples / inner);
    Rng rng(mc.seed ^ 0x9e3779b97f4a7c15ull);
    MeanAccumulator acc;
    for (int i = 0; i < outer; ++i) {
        double v = rng.uniform();
        double rho = R_scale * v / (1.0 - v + 1e-300);
        Point x = rho * rng.sphere(n);
        double q = (R_scale / ((R_scale + rho) * (R_scale + rho))) /
                   (sphere_surface(n) * std::pow(rho, n - 1.0));
        auto draws = spec_.sample(inner, rng.next_u64());
        double kv = 0;
        int used = 0;
        for (const auto& [s, y] : draws) {
            if (s <= 0) continue;
            kv += std::pow(s, -n) * profile_((x - y).norm() / s);
            ++used;
        }
        kv = used > 0 ? kv / used : 0.0;
        acc.add(kv / q);
    }
    return {acc.mean(), acc.std_error()};
}

double AveragedKernel::mass() const { return mass_with_error().value; }

EvalResult AveragedKernel::mass_with_error() const {
    {
        std::lock_guard<std::mutex> lock(mass_cache_->mutex);
        if (mass_cache_->value) return *mass_cache_->value;
    }
    EvalResult m = compute_mass();
    std::lock_guard<std::mutex> lock(mass_cache_->mutex);
    if (!mass_cache_->value) mass_cache_->value = m;
    return *mass_cache_->value;
}

double kernel_mass(const AveragedKernel& k) { return k.mass(); }

std::function<double(double)> radial_reduction(const AveragedKernel& k) {
    if (!k.spec().mean_is_zero())
        throw UnsupportedError("radial reduction needs the zero mean marginal");
    auto nu = k.spec().variance_marginal();
    if (!nu) throw UnsupportedError("radial reduction needs a separable variance marginal");
    const Profile phi = k.profile();
    const int n = k.dimension();
    const double phi_r12 = std::isfinite(phi.support_radius())
                               ? phi.support_radius()
                               : effective_radius(phi, 1e-12);
    double rel_tol = 1e-9;
    if (const auto* q = std::get_if<Quadrature>(&k.strategy())) rel_tol = q->rel_tol;
    ScalarMarginal nu_v = *nu;
    return [phi, n, nu_v, phi_r12, rel_tol](double t) {
        return radial_profile_average(phi, n, nu_v, t, phi_r12, rel_tol);
    };
}

double translation_only_apply(const JointDistributionSpec& spec, const GridFunction& f,
                              const Point& x) {
    if (!spec.pure_translation())
        throw UnsupportedError("translation_only_apply needs a pure-translation spec");
    auto mu = spec.mean_marginal();
    if (!mu) throw UnsupportedError("translation path needs a separable mean marginal");
    const int n = spec.dimension();
    if (const auto* a = std::get_if<VectorAtoms>(&mu->form())) {
        double acc = 0;
        for (const auto& [y, wt] : a->atoms) acc += wt * f.value_at(x - y);
        return acc;
    }
    // Densities and box-uniforms: sum f-cell values against the cell masses
    // of mu; values of f outside its grid contribute zero.
    double acc = 0;
    if (n == 1) {
        const double h = f.pitch(0);
        for (int c = 0; c < f.resolution(0); ++c) {
            const double zc = f.lo(0) + (c + 0.5) * h;
            const double v = f[f.index(c)];
            if (v == 0) continue;
            Point lo{x[0] - zc - 0.5 * h}, hi{x[0] - zc + 0.5 * h};
            acc += v * mu->mass_box(lo, hi);
        }
        return acc;
    }
    for (std::size_t k = 0; k < f.size(); ++k) {
        const double v = f[k];
        if (v == 0) continue;
        Point zc = f.center(k);
        Point lo(n), hi(n);
        for (int a2 = 0; a2 < n; ++a2) {
            lo[a2] = x[a2] - zc[a2] - 0.5 * f.pitch(a2);
            hi[a2] = x[a2] - zc[a2] + 0.5 * f.pitch(a2);
        }
        acc += v * mu->mass_box(lo, hi);
    }
    return acc;
}

AveragedKernel scale_self_similar(const AveragedKernel& k1, double j) {
    if (!(j >= 1.0)) throw ConfigError("self-similar scaling needs j >= 1");
    return AveragedKernel(k1.profile(), scale_spec(k1.spec(), j), k1.strategy());
}

}  // namespace randmoll
