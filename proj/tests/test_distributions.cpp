#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "randmoll/distribution.hpp"
#include "randmoll/errors.hpp"
#include "randmoll/quadrature.hpp"

using namespace randmoll;

TEST_CASE("point-mass specs sample their atom") {
    JointDistributionSpec spec(1, JointAtoms{{{1.0, Point{0.0}, 1.0}}});
    for (auto seed : {1ull, 99ull}) {
        for (const auto& [s, y] : spec.sample(100, seed)) {
            CHECK(s == 1.0);
            CHECK(y[0] == 0.0);
        }
    }
}

TEST_CASE("uniform variance marginal has the right empirical mean") {
    // Uniform(0, 1/4] x delta_0: E[s] = 1/8
    JointDistributionSpec spec(
        1, JointProduct{ScalarMarginal(ScalarUniform{0.0, 0.25}),
                        VectorMarginal::point(Point{0.0})});
    auto draws = spec.sample(100000, 7);
    double mean = 0, m2 = 0;
    for (const auto& [s, y] : draws) mean += s;
    mean /= draws.size();
    for (const auto& [s, y] : draws) m2 += (s - mean) * (s - mean);
    double se = std::sqrt(m2 / (draws.size() - 1.0) / draws.size());
    CHECK(std::abs(mean - 0.125) <= 3 * se);
}

TEST_CASE("box density samples match interval masses") {
    // gamma = 1 on [0,1] x [-1/2, 1/2]: empirical mass of {s <= 1/2} near 1/2
    JointDistributionSpec spec(
        1, JointDensity{[](double s, const Point& y) {
                            return (s >= 0 && s <= 1 && std::abs(y[0]) <= 0.5) ? 1.0 : 0.0;
                        },
                        1.0, 0.5, 1.0});
    auto draws = spec.sample(100000, 21);
    double frac = 0;
    for (const auto& [s, y] : draws) frac += s <= 0.5 ? 1 : 0;
    frac /= draws.size();
    double se = std::sqrt(0.25 / draws.size());
    CHECK(std::abs(frac - 0.5) <= 3 * se);
}

TEST_CASE("sampling is bit-identical for equal seeds") {
    FamilySpec fam = make_family("uniform-box", 1);
    JointDistributionSpec spec = fam.generator(3);
    auto a = spec.sample(5000, 99), b = spec.sample(5000, 99);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].first == b[i].first);
        CHECK(a[i].second == b[i].second);
    }
}

TEST_CASE("different seeds agree in distribution (kolmogorov-smirnov)") {
    JointDistributionSpec spec(
        1, JointProduct{ScalarMarginal(ScalarUniform{0.0, 1.0}),
                        VectorMarginal::point(Point{0.0})});
    auto a = spec.sample(100000, 1), b = spec.sample(100000, 2);
    std::vector<double> sa, sb;
    for (const auto& [s, y] : a) sa.push_back(s);
    for (const auto& [s, y] : b) sb.push_back(s);
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    double ks = 0;
    std::size_t i = 0, k = 0;
    while (i < sa.size() && k < sb.size()) {
        if (sa[i] <= sb[k]) ++i;
        else ++k;
        ks = std::max(ks, std::abs(static_cast<double>(i) / sa.size() -
                                   static_cast<double>(k) / sb.size()));
    }
    CHECK(ks < 0.02);
}

TEST_CASE("every catalog family conserves mass") {
    for (const std::string& name : family_catalog()) {
        int dim = 1;
        FamilySpec fam = make_family(name, dim);
        for (int j : {1, 3}) {
            JointDistributionSpec spec = fam.generator(j);
            INFO(name << " j=" << j);
            CHECK(std::abs(spec.total_mass() - 1.0) <= 1e-9);
            CHECK_NOTHROW(spec.validate());
        }
    }
}

TEST_CASE("interval masses of the shrinking uniform marginal") {
    // nu_j((-1, b]) = min(1, jb) for b > 0
    for (int j : {1, 4, 16}) {
        ScalarMarginal nu((ScalarUniform{0.0, 1.0 / j}));
        for (double b : {0.01, 0.1, 0.5, 1.0})
            CHECK(nu.mass(-1.0, b) == doctest::Approx(std::min(1.0, j * b)).epsilon(1e-12));
    }
}

TEST_CASE("atoms with s=0 are only allowed in pure-translation specs") {
    JointDistributionSpec mixed(1, JointAtoms{{{0.0, Point{0.0}, 0.5}, {1.0, Point{0.0}, 0.5}}});
    CHECK_THROWS_AS(mixed.validate(), ConfigError);
    JointDistributionSpec translation(1, JointAtoms{{{0.0, Point{0.25}, 1.0}}});
    CHECK_NOTHROW(translation.validate());
    CHECK(translation.pure_translation());
}

TEST_CASE("densities leaking outside their declared support are rejected") {
    JointDistributionSpec leaky(
        1, JointDensity{[](double s, const Point&) { return s >= 0 && s <= 2 ? 0.5 : 0.0; },
                        1.0, 0.5, 1.0});
    CHECK_THROWS_AS(leaky.validate(), ConfigError);
}

TEST_CASE("rejection sampling without a usable bound reports the density maximum") {
    // (1/2)(1-s)^{-1/2} is unbounded on (0,1): the grid bound keeps growing
    ScalarMarginal nu(ScalarDensity{
        [](double s) { return s > 0 && s < 1 ? 0.5 / std::sqrt(1 - s) : 0.0; }, 0.0, 1.0, 0.0});
    Rng rng(5);
    CHECK_THROWS_WITH_AS(nu.sample(rng), doctest::Contains("maximum"), NumericsError);
}

TEST_CASE("coupled samples respect |y| <= C eps") {
    FamilySpec fam = make_family("coupled-sphere", 2, {{"C", 1.0}});
    auto draws = fam.generator(4).sample(2000, 11);
    for (const auto& [s, y] : draws) CHECK(y.norm() <= s * (1 + 1e-12));
}

TEST_CASE("vague convergence of the uniform variance family") {
    FamilySpec fam = make_family("uniform-variance", 1, {{"J", 24}});
    ConditionReport rep = check_vague_convergence(fam);
    CHECK(rep.passed());
    // battery sup decays
    double first = 0, last = 0;
    for (const auto& line : rep.lines) {
        if (line.check != "vague-battery-sup") continue;
        if (*line.j == 1) first = line.value;
        if (*line.j == 24) last = line.value;
    }
    CHECK(last < first);
    CHECK(last < 1e-2);
}

TEST_CASE("vague convergence of the coupled family (|y| <= C eps)") {
    // the coupled battery sup decays like 1/j and needs a longer horizon than
    // the uncoupled family to clear the tolerance
    FamilySpec fam = make_family("coupled-sphere", 1, {{"J", 48}});
    CHECK(check_vague_convergence(fam).passed());
}

TEST_CASE("a fixed family is flagged non-converging with a stagnant sup") {
    FamilySpec fam = make_family("fixed-atom", 1, {{"J", 16}, {"s", 1.0}});
    ConditionReport rep = check_vague_convergence(fam);
    CHECK_FALSE(rep.passed());
    double first = -1, last = -1;
    for (const auto& line : rep.lines) {
        if (line.check != "vague-battery-sup") continue;
        if (*line.j == 1) first = line.value;
        if (*line.j == 16) last = line.value;
    }
    CHECK(last == doctest::Approx(first).epsilon(1e-9));
    CHECK(last > 1e-2);
}

TEST_CASE("density hypotheses hold for the scaled uniform box family") {
    FamilySpec fam = make_family("uniform-box", 1, {{"J", 32}});
    ConditionReport rep = check_density_hypotheses(fam);
    CHECK(rep.passed());
    // ||gamma_j||_inf r_j^2 = (j^2/2)(1/j)^2 = 1/2 for every j
    CHECK(rep.measured == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("density hypotheses fail for the growing spike family with a witness") {
    FamilySpec fam = make_family("growing-spike", 1, {{"J", 16}});
    ConditionReport rep = check_density_hypotheses(fam);
    CHECK_FALSE(rep.passed());
    CHECK(rep.message.find("witness") != std::string::npos);
}

TEST_CASE("density hypotheses need the density form") {
    FamilySpec fam = make_family("uniform-variance", 1);
    CHECK_THROWS_AS(check_density_hypotheses(fam), UnsupportedError);
}

TEST_CASE("self-similar densities follow the same arithmetic path") {
    FamilySpec fam = make_family("uniform-box", 1);
    ConditionReport rep = spot_check_self_similarity(fam, 5, 1000, 77);
    CHECK(rep.passed());
    CHECK(rep.measured == 0.0);
}

TEST_CASE("scaling pushforward maps uniforms and atoms exactly") {
    ScalarMarginal nu((ScalarUniform{0.0, 1.0}));
    ScalarMarginal nu4 = scale_marginal(nu, 4.0);
    CHECK(nu4.upper() == doctest::Approx(0.25));
    CHECK(nu4.mass(-1, 0.125) == doctest::Approx(0.5).epsilon(1e-12));

    JointDistributionSpec spec(1, JointAtoms{{{1.0, Point{0.5}, 1.0}}});
    JointDistributionSpec spec2 = scale_spec(spec, 2.0);
    const auto& atoms = std::get<JointAtoms>(spec2.form()).atoms;
    CHECK(atoms[0].s == 0.5);
    CHECK(atoms[0].y[0] == 0.25);
}

TEST_CASE("analytic interval masses agree with quadrature away from the singularity") {
    FamilySpec fam = make_family("translation-singular", 1);
    auto mu = fam.generator(1).mean_marginal();
    REQUIRE(mu.has_value());
    const auto& d = std::get<VectorDensity>(mu->form());
    REQUIRE(static_cast<bool>(d.interval_mass));
    for (auto [a, b] : {std::pair{0.0, 0.5}, {0.1, 0.9}, {0.3, 0.6}}) {
        double numeric =
            integrate_gk([&](double y) { return d.pdf(Point{y}); }, a, b, 1e-12).value;
        CHECK(d.interval_mass(a, b) == doctest::Approx(numeric).epsilon(1e-10));
    }
}
