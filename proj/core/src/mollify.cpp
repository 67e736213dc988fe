#include "randmoll/mollify.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "randmoll/errors.hpp"
#include "randmoll/quadrature.hpp"
#include "randmoll/rng.hpp"

namespace randmoll {

namespace {

std::uint64_t mix_seed_for(std::uint64_t seed, const Point& x) {
    std::uint64_t h = 1469598103934665603ull ^ seed;
    for (int i = 0; i < x.dim(); ++i) {
        std::uint64_t bits;
        double v = x[i];
        std::memcpy(&bits, &v, sizeof(bits));
        h = (h ^ bits) * 1099511628211ull;
    }
    return h;
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Linear convolution via zero-padded real FFTs.
std::vector<double> fft_convolve_1d(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t L = next_pow2(a.size() + b.size() - 1);
    std::vector<double> pa(L, 0.0), pb(L, 0.0), out(a.size() + b.size() - 1);
    std::copy(a.begin(), a.end(), pa.begin());
    std::copy(b.begin(), b.end(), pb.begin());
    std::vector<fftw_complex> fa(L / 2 + 1), fb(L / 2 + 1);
    fftw_plan p1 = fftw_plan_dft_r2c_1d(static_cast<int>(L), pa.data(), fa.data(), FFTW_ESTIMATE);
    fftw_execute(p1);
    fftw_plan p2 = fftw_plan_dft_r2c_1d(static_cast<int>(L), pb.data(), fb.data(), FFTW_ESTIMATE);
    fftw_execute(p2);
    for (std::size_t i = 0; i < fa.size(); ++i) {
        double re = fa[i][0] * fb[i][0] - fa[i][1] * fb[i][1];
        double im = fa[i][0] * fb[i][1] + fa[i][1] * fb[i][0];
        fa[i][0] = re;
        fa[i][1] = im;
    }
    fftw_plan p3 = fftw_plan_dft_c2r_1d(static_cast<int>(L), fa.data(), pa.data(), FFTW_ESTIMATE);
    fftw_execute(p3);
    fftw_destroy_plan(p1);
    fftw_destroy_plan(p2);
    fftw_destroy_plan(p3);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = pa[i] / static_cast<double>(L);
    return out;
}

std::vector<double> fft_convolve_2d(const std::vector<double>& a, int na0, int na1,
                                    const std::vector<double>& b, int nb0, int nb1) {
    const int L0 = static_cast<int>(next_pow2(na0 + nb0 - 1));
    const int L1 = static_cast<int>(next_pow2(na1 + nb1 - 1));
    std::vector<double> pa(static_cast<std::size_t>(L0) * L1, 0.0), pb(pa.size(), 0.0);
    for (int i = 0; i < na0; ++i)
        std::copy(a.begin() + static_cast<std::size_t>(i) * na1,
                  a.begin() + static_cast<std::size_t>(i) * na1 + na1,
                  pa.begin() + static_cast<std::size_t>(i) * L1);
    for (int i = 0; i < nb0; ++i)
        std::copy(b.begin() + static_cast<std::size_t>(i) * nb1,
                  b.begin() + static_cast<std::size_t>(i) * nb1 + nb1,
                  pb.begin() + static_cast<std::size_t>(i) * L1);
    const std::size_t cplx = static_cast<std::size_t>(L0) * (L1 / 2 + 1);
    std::vector<fftw_complex> fa(cplx), fb(cplx);
    fftw_plan p1 = fftw_plan_dft_r2c_2d(L0, L1, pa.data(), fa.data(), FFTW_ESTIMATE);
    fftw_execute(p1);
    fftw_plan p2 = fftw_plan_dft_r2c_2d(L0, L1, pb.data(), fb.data(), FFTW_ESTIMATE);
    fftw_execute(p2);
    for (std::size_t i = 0; i < cplx; ++i) {
        double re = fa[i][0] * fb[i][0] - fa[i][1] * fb[i][1];
        double im = fa[i][0] * fb[i][1] + fa[i][1] * fb[i][0];
        fa[i][0] = re;
        fa[i][1] = im;
    }
    fftw_plan p3 = fftw_plan_dft_c2r_2d(L0, L1, fa.data(), pa.data(), FFTW_ESTIMATE);
    fftw_execute(p3);
    fftw_destroy_plan(p1);
    fftw_destroy_plan(p2);
    fftw_destroy_plan(p3);
    const double scale = 1.0 / (static_cast<double>(L0) * L1);
    std::vector<double> out(static_cast<std::size_t>(na0 + nb0 - 1) * (na1 + nb1 - 1));
    for (int i = 0; i < na0 + nb0 - 1; ++i)
        for (int k = 0; k < na1 + nb1 - 1; ++k)
            out[static_cast<std::size_t>(i) * (na1 + nb1 - 1) + k] =
                pa[static_cast<std::size_t>(i) * L1 + k] * scale;
    return out;
}

// Tabulated kernel weights on f's pitch, multiplied by the cell volume and
// rescaled so the row sum equals the continuum kernel mass. The rescaling
// keeps the discrete operator a true weighted average: the midpoint
// tabulation error would otherwise leak into the contraction bound.
struct Stencil {
    int r0 = 0, r1 = 0;  // half extents in cells
    std::vector<double> w;
    int cols() const { return 2 * r1 + 1; }
    int rows() const { return 2 * r0 + 1; }
};

Stencil build_stencil(const AveragedKernel& k, const GridFunction& f) {
    Stencil st;
    const int n = f.dimension();
    const double R = k.support_radius();
    const double h0 = f.pitch(0);
    const double h1 = n == 2 ? f.pitch(1) : 1.0;
    st.r0 = static_cast<int>(std::ceil(R / h0));
    st.r1 = n == 2 ? static_cast<int>(std::ceil(R / h1)) : 0;
    st.w.assign(static_cast<std::size_t>(st.rows()) * st.cols(), 0.0);

    // radial kernels go through an oversampled radius lookup table
    std::vector<double> lut;
    double lut_step = 0;
    const bool radial = k.is_radial();
    if (radial) {
        lut_step = 0.5 * std::min(h0, n == 2 ? h1 : h0);
        int m = static_cast<int>(std::ceil((R + 2 * lut_step) / lut_step)) + 2;
        lut.resize(m, 0.0);
        for (int i = 1; i < m; ++i) {
            Point x(n);
            x[0] = i * lut_step;
            lut[i] = k(x);  // slot 0 unused: the center cell is averaged below
        }
    }
    auto point_eval = [&](double d0, double d1) {
        const double r = n == 2 ? std::hypot(d0, d1) : std::abs(d0);
        if (r > R) return 0.0;
        if (radial) {
            if (r < lut_step) {
                Point x(n);
                x[0] = r;
                return k(x);
            }
            double t = r / lut_step;
            int i = static_cast<int>(t);
            if (i + 1 >= static_cast<int>(lut.size())) return 0.0;
            double frac = t - i;
            return (1 - frac) * lut[i] + frac * lut[i + 1];
        }
        Point x(n);
        x[0] = d0;
        if (n == 2) x[1] = d1;
        return k(x);
    };

    const double cellvol = f.cell_volume();
    for (int i = -st.r0; i <= st.r0; ++i) {
        for (int j = -st.r1; j <= st.r1; ++j) {
            double v;
            if (i == 0 && j == 0) {
                // cell average: the kernel may carry an integrable singularity
                // at the origin (variance marginals reaching s = 0)
                if (n == 1) {
                    v = integrate_gk_breaks([&](double t) { return point_eval(t, 0); }, -h0 / 2,
                                            h0 / 2, {0.0}, 1e-8)
                            .value /
                        h0;
                } else if (radial) {
                    const double re = h0 / std::sqrt(M_PI);  // equal-area disc
                    v = sphere_surface(2) *
                        integrate_gk([&](double rho) { return rho * point_eval(rho, 0); }, 0, re,
                                     1e-8)
                            .value /
                        (h0 * h1);
                } else {
                    v = 0;
                    for (int a = 0; a < 4; ++a)
                        for (int b = 0; b < 4; ++b)
                            v += point_eval((a - 1.5) * h0 / 4, (b - 1.5) * h1 / 4);
                    v /= 16;
                }
            } else {
                v = point_eval(i * h0, j * h1);
            }
            st.w[static_cast<std::size_t>(i + st.r0) * st.cols() + (j + st.r1)] = v * cellvol;
        }
    }
    double discrete_mass = 0;
    for (double wv : st.w) discrete_mass += wv;
    const double target = radial_mass(k.profile());
    if (discrete_mass > 0) {
        const double scale = target / discrete_mass;
        for (double& wv : st.w) wv *= scale;
    }
    return st;
}

GridFunction same_shape(const GridFunction& f) {
    return GridFunction(f.dimension(), {f.lo(0), f.lo(1)}, {f.hi(0), f.hi(1)},
                        {f.resolution(0), f.resolution(1)});
}

GridFunction convolve_direct(const GridFunction& f, const Stencil& st) {
    GridFunction out = same_shape(f);
    const int n0 = f.resolution(0), n1 = f.dimension() == 2 ? f.resolution(1) : 1;
    for (int p = 0; p < n0; ++p) {
        for (int q = 0; q < n1; ++q) {
            double acc = 0;
            const int i_lo = std::max(-st.r0, p - n0 + 1), i_hi = std::min(st.r0, p);
            for (int i = i_lo; i <= i_hi; ++i) {
                const int j_lo = std::max(-st.r1, q - n1 + 1), j_hi = std::min(st.r1, q);
                const double* wrow =
                    st.w.data() + static_cast<std::size_t>(i + st.r0) * st.cols() + st.r1;
                for (int j = j_lo; j <= j_hi; ++j) acc += wrow[j] * f[f.index(p - i, q - j)];
            }
            out[out.index(p, q)] = acc;
        }
    }
    return out;
}

GridFunction convolve_fft(const GridFunction& f, const Stencil& st) {
    GridFunction out = same_shape(f);
    if (f.dimension() == 1) {
        auto full = fft_convolve_1d(f.values(), st.w);
        for (int p = 0; p < f.resolution(0); ++p) out[p] = full[p + st.r0];
        return out;
    }
    auto full = fft_convolve_2d(f.values(), f.resolution(0), f.resolution(1), st.w, st.rows(),
                                st.cols());
    const int cols = f.resolution(1) + st.cols() - 1;
    for (int p = 0; p < f.resolution(0); ++p)
        for (int q = 0; q < f.resolution(1); ++q)
            out[out.index(p, q)] = full[static_cast<std::size_t>(p + st.r0) * cols + (q + st.r1)];
    return out;
}

// Inverse-CDF sampler for |z| with density proportional to rho^{n-1} phi(rho).
struct RadialSampler {
    std::vector<double> cdf, rho;
    double draw(Rng& rng) const {
        double u = rng.uniform();
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        std::size_t i = std::min<std::size_t>(cdf.size() - 1, it - cdf.begin());
        if (i == 0) return rho[0];
        double c0 = cdf[i - 1], c1 = cdf[i];
        double t = c1 > c0 ? (u - c0) / (c1 - c0) : 0.5;
        return rho[i - 1] + t * (rho[i] - rho[i - 1]);
    }
};

RadialSampler build_radial_sampler(const Profile& phi) {
    const int n = phi.dimension();
    const double R = std::isfinite(phi.support_radius()) ? phi.support_radius()
                                                         : effective_radius(phi, 1e-9);
    const int m = 8192;
    RadialSampler s;
    s.rho.resize(m + 1);
    s.cdf.resize(m + 1);
    double acc = 0, prev = 0;
    s.rho[0] = 0;
    s.cdf[0] = 0;
    for (int i = 1; i <= m; ++i) {
        double r = R * i / m;
        double v = std::pow(r, n - 1.0) * phi(r);
        acc += 0.5 * (prev + v) * (R / m);
        prev = v;
        s.rho[i] = r;
        s.cdf[i] = acc;
    }
    if (acc <= 0) throw NumericsError("profile sampler: zero mass");
    for (double& c : s.cdf) c /= acc;
    return s;
}

}  // namespace

GridFunction disc_average(const GridFunction& absf, double r) {
    if (absf.dimension() != 2) throw ConfigError("disc_average is the 2d path");
    const double h0 = absf.pitch(0), h1 = absf.pitch(1);
    const int r0 = static_cast<int>(std::floor(r / h0));
    const int r1 = static_cast<int>(std::floor(r / h1));
    GridFunction out = same_shape(absf);
    std::vector<std::pair<int, int>> offsets;
    for (int i = -r0; i <= r0; ++i)
        for (int k = -r1; k <= r1; ++k)
            if (std::hypot(i * h0, k * h1) <= r) offsets.emplace_back(i, k);
    if (offsets.empty()) return out;
    const double inv = 1.0 / offsets.size();
    const int n0 = absf.resolution(0), n1 = absf.resolution(1);
    if (offsets.size() < 4096) {
        for (int p = 0; p < n0; ++p)
            for (int q = 0; q < n1; ++q) {
                double acc = 0;
                for (auto [i, k] : offsets) {
                    int a = p + i, b = q + k;
                    if (a < 0 || a >= n0 || b < 0 || b >= n1) continue;
                    acc += absf[absf.index(a, b)];
                }
                out[out.index(p, q)] = acc * inv;
            }
        return out;
    }
    std::vector<double> st(static_cast<std::size_t>(2 * r0 + 1) * (2 * r1 + 1), 0.0);
    for (auto [i, k] : offsets)
        st[static_cast<std::size_t>(i + r0) * (2 * r1 + 1) + (k + r1)] = inv;
    auto full = fft_convolve_2d(absf.values(), n0, n1, st, 2 * r0 + 1, 2 * r1 + 1);
    const int cols = n1 + 2 * r1;
    for (int p = 0; p < n0; ++p)
        for (int q = 0; q < n1; ++q)
            out[out.index(p, q)] = full[static_cast<std::size_t>(p + r0) * cols + (q + r1)];
    return out;
}

bool in_trust_region(const GridFunction& g, std::size_t cell, double trust_radius) {
    Point c = g.center(cell);
    for (int a = 0; a < g.dimension(); ++a)
        if (c[a] - g.lo(a) <= trust_radius || g.hi(a) - c[a] <= trust_radius) return false;
    return true;
}

MollifyResult mollify(const AveragedKernel& k, const GridFunction& f,
                      const MollifyOptions& opt) {
    if (k.dimension() != f.dimension()) throw ConfigError("kernel/grid dimension mismatch");
    if (k.spec().pure_translation()) return mollify_translation(k.spec(), f);

    MollifyResult res;
    res.path = opt.path;
    res.trust_radius = k.support_radius();
    if (opt.path == MollifyPath::direct || opt.path == MollifyPath::fft) {
        Stencil st = build_stencil(k, f);
        res.values =
            opt.path == MollifyPath::direct ? convolve_direct(f, st) : convolve_fft(f, st);
        return res;
    }
    if (!k.profile().flags().normalized)
        throw UnsupportedError("monte-carlo mollification needs a normalized profile");
    const int n = f.dimension();
    RadialSampler rad = build_radial_sampler(k.profile());
    GridFunction vals = same_shape(f);
    GridFunction errs = same_shape(f);
    for (std::size_t c = 0; c < f.size(); ++c) {
        Point x = f.center(c);
        Rng rng(mix_seed_for(opt.seed, x));
        auto draws = k.spec().sample(opt.mc_samples, rng.next_u64());
        MeanAccumulator acc;
        for (const auto& [s, y] : draws) {
            Point z = rad.draw(rng) * rng.sphere(n);
            acc.add(f.value_at(x - y - s * z));
        }
        vals[c] = acc.mean();
        errs[c] = acc.std_error();
    }
    res.values = std::move(vals);
    res.std_error = std::move(errs);
    return res;
}

MollifyResult mollify_translation(const JointDistributionSpec& spec, const GridFunction& f) {
    if (!spec.pure_translation())
        throw UnsupportedError("translation mollify needs a pure-translation spec");
    auto mu = spec.mean_marginal();
    if (!mu) throw UnsupportedError("translation mollify needs a separable mean marginal");

    MollifyResult res;
    res.path = MollifyPath::direct;
    res.trust_radius = spec.y_radius();

    GridFunction out = same_shape(f);
    if (std::holds_alternative<VectorAtoms>(mu->form()) || f.dimension() == 2) {
        for (std::size_t c = 0; c < f.size(); ++c)
            out[c] = translation_only_apply(spec, f, f.center(c));
        res.values = std::move(out);
        return res;
    }
    // n = 1 density/box: per-offset cell masses, then a discrete convolution
    const double h = f.pitch(0);
    double mu_lo = 0, mu_hi = 0;
    if (const auto* bu = std::get_if<BoxUniform>(&mu->form())) {
        mu_lo = bu->lo[0];
        mu_hi = bu->hi[0];
    } else {
        const auto& vd = std::get<VectorDensity>(mu->form());
        mu_lo = vd.lo[0];
        mu_hi = vd.hi[0];
    }
    const int k_lo = static_cast<int>(std::floor(mu_lo / h - 0.5));
    const int k_hi = static_cast<int>(std::ceil(mu_hi / h + 0.5));
    std::vector<double> masses(k_hi - k_lo + 1);
    for (int k = k_lo; k <= k_hi; ++k)
        masses[k - k_lo] = mu->mass_box(Point{(k - 0.5) * h}, Point{(k + 0.5) * h});
    const int n0 = f.resolution(0);
    for (int p = 0; p < n0; ++p) {
        double acc = 0;
        for (int k = k_lo; k <= k_hi; ++k) {
            int c = p - k;
            if (c < 0 || c >= n0) continue;
            acc += masses[k - k_lo] * f[c];
        }
        out[p] = acc;
    }
    res.values = std::move(out);
    return res;
}

std::vector<EvalResult> mollify_monte_carlo_at(const AveragedKernel& k, const GridFunction& f,
                                               const std::vector<Point>& points, int samples,
                                               std::uint64_t seed) {
    if (!k.profile().flags().normalized)
        throw UnsupportedError("monte-carlo mollification needs a normalized profile");
    const int n = f.dimension();
    RadialSampler rad = build_radial_sampler(k.profile());
    std::vector<EvalResult> out;
    out.reserve(points.size());
    for (const Point& x : points) {
        Rng rng(mix_seed_for(seed, x));
        auto draws = k.spec().sample(samples, rng.next_u64());
        MeanAccumulator acc;
        for (const auto& [s, y] : draws) {
            Point z = rad.draw(rng) * rng.sphere(n);
            acc.add(f.value_at(x - y - s * z));
        }
        out.push_back({acc.mean(), acc.std_error()});
    }
    return out;
}

}  // namespace randmoll
