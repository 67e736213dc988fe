#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "randmoll/errors.hpp"
#include "randmoll/kernel.hpp"
#include "randmoll/rng.hpp"

using namespace randmoll;

namespace {

Profile half_indicator() { return normalize(make_profile("indicator", 1)); }

JointDistributionSpec atom_spec(double s, double y) {
    return JointDistributionSpec(1, JointAtoms{{{s, Point{y}, 1.0}}});
}

}  // namespace

TEST_CASE("a single atom reduces the kernel to the profile") {
    AveragedKernel k(half_indicator(), atom_spec(1.0, 0.0), AtomsExact{});
    CHECK(k(Point{0.5}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(k(Point{1.5}) == 0.0);
}

TEST_CASE("finite mixtures sum by hand") {
    JointDistributionSpec mix(1, JointAtoms{{{1.0, Point{0.0}, 0.5}, {2.0, Point{0.0}, 0.5}}});
    AveragedKernel k(half_indicator(), mix, AtomsExact{});
    CHECK(k(Point{0.5}) == doctest::Approx(0.375).epsilon(1e-15));
    CHECK(k(Point{1.5}) == doctest::Approx(0.125).epsilon(1e-15));
    // the quadrature strategy takes the same exact path on atom specs
    AveragedKernel kq(half_indicator(), mix, Quadrature{});
    CHECK(kq(Point{0.5}) == doctest::Approx(0.375).epsilon(1e-15));
}

TEST_CASE("indicator kernels vanish beyond the support sum") {
    // density supported in [0,1] x B(0,1), indicator profile: K = 0 past 2
    FamilySpec fam = make_family("uniform-box", 1);
    AveragedKernel k(half_indicator(), fam.generator(1), Quadrature{});
    CHECK(k(Point{2.5}) == 0.0);
    CHECK(k(Point{-3.0}) == 0.0);
    CHECK(k(Point{0.7}) > 0.0);
}

TEST_CASE("kernel mass is the profile mass for atom specs") {
    AveragedKernel k(half_indicator(), atom_spec(2.0, 0.5), AtomsExact{});
    CHECK(k.mass() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("unnormalized indicator in dimension 2 has kernel mass pi") {
    Profile raw = make_profile("indicator", 2);
    JointDistributionSpec spec(2, JointAtoms{{{1.0, Point::zero(2), 1.0}}});
    AveragedKernel atoms(raw, spec, AtomsExact{});
    CHECK(atoms.mass() == doctest::Approx(M_PI).epsilon(1e-9));
    AveragedKernel quad(raw, spec, Quadrature{});
    CHECK(quad.mass() == doctest::Approx(M_PI).epsilon(1e-6));
}

TEST_CASE("quadrature and monte-carlo masses agree for a density spec") {
    FamilySpec fam = make_family("uniform-box", 1);
    AveragedKernel quad(half_indicator(), fam.generator(2), Quadrature{});
    AveragedKernel mc(half_indicator(), fam.generator(2), MonteCarloEval{200000, 5});
    EvalResult m = mc.mass_with_error();
    INFO("mc=" << m.value << " se=" << m.std_error);
    CHECK(quad.mass() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(m.value - quad.mass()) <= 3 * m.std_error);
}

TEST_CASE("kernel mass is independent of the randomization") {
    Profile phi = half_indicator();
    FamilySpec box = make_family("uniform-box", 1);
    FamilySpec uni = make_family("uniform-variance", 1);
    FamilySpec coup = make_family("coupled-sphere", 1);
    for (const auto& spec :
         {atom_spec(1.0, 0.3), uni.generator(3), box.generator(2), coup.generator(2)}) {
        AveragedKernel k(phi, spec, Quadrature{});
        CHECK(k.mass() == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("radial reduction of a point variance is the profile") {
    Profile phi = half_indicator();
    JointDistributionSpec spec(
        1, JointProduct{ScalarMarginal::point(1.0), VectorMarginal::point(Point{0.0})});
    auto psi = radial_reduction(AveragedKernel(phi, spec, Quadrature{}));
    for (double t : {0.1, 0.5, 0.9, 1.5}) CHECK(psi(t) == doctest::Approx(phi(t)));
}

TEST_CASE("radial reduction of the two-scale mixture matches the kernel") {
    FamilySpec fam = make_family("two-scale-atoms", 1);
    AveragedKernel k(half_indicator(), fam.generator(1), AtomsExact{});
    auto psi = radial_reduction(k);
    CHECK(psi(0.5) == doctest::Approx(0.375).epsilon(1e-12));
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        double x = rng.uniform(-3, 3);
        CHECK(k(Point{x}) == doctest::Approx(psi(std::abs(x))).epsilon(1e-12));
    }
}

TEST_CASE("radial reduction of the uniform variance marginal hits the antiderivative") {
    // psi(1/2) = int_{1/2}^1 (1/(2s)) ds = ln(2)/2
    JointDistributionSpec spec(
        1, JointProduct{ScalarMarginal(ScalarUniform{0.0, 1.0}),
                        VectorMarginal::point(Point{0.0})});
    auto psi = radial_reduction(AveragedKernel(half_indicator(), spec, Quadrature{}));
    CHECK(psi(0.5) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("radial reduction requires the zero mean marginal") {
    AveragedKernel k(half_indicator(), atom_spec(1.0, 0.5), Quadrature{});
    CHECK_THROWS_AS(radial_reduction(k), UnsupportedError);
}

TEST_CASE("translation-only application") {
    GridFunction f = GridFunction::sample(1, {-2, 0}, {2, 1}, {4096, 1}, [](const Point& x) {
        return x[0] >= 0 && x[0] <= 1 ? 1.0 : 0.0;
    });
    const double h = f.pitch(0);

    JointDistributionSpec delta0(1, JointAtoms{{{0.0, Point{0.0}, 1.0}}});
    CHECK(translation_only_apply(delta0, f, Point{0.5}) == 1.0);

    JointDistributionSpec shift(
        1, JointProduct{ScalarMarginal::point(0.0),
                        VectorMarginal(1, BoxUniform{Point{0.0}, Point{1.0}})});
    CHECK(translation_only_apply(shift, f, Point{1.0}) == doctest::Approx(1.0).epsilon(2 * h));
    CHECK(translation_only_apply(shift, f, Point{0.5}) == doctest::Approx(0.5).epsilon(2 * h));
}

TEST_CASE("pure-translation kernels refuse pointwise evaluation") {
    JointDistributionSpec spec(1, JointAtoms{{{0.0, Point{0.25}, 1.0}}});
    AveragedKernel k(half_indicator(), spec, Quadrature{});
    CHECK_THROWS_AS(k(Point{0.1}), UnsupportedError);
}

TEST_CASE("self-similar scaling: identity at j=1 and atom pushforward") {
    AveragedKernel k1(half_indicator(), atom_spec(1.0, 0.0), AtomsExact{});
    AveragedKernel same = scale_self_similar(k1, 1.0);
    CHECK(same(Point{0.5}) == k1(Point{0.5}));
    AveragedKernel k2 = scale_self_similar(k1, 2.0);
    CHECK(k2(Point{0.25}) == doctest::Approx(1.0).epsilon(1e-15));  // 2 * K1(0.5)
    CHECK_THROWS_AS(scale_self_similar(k1, 0.5), ConfigError);
}

TEST_CASE("self-similar scaling identity for a density spec at random points") {
    FamilySpec fam = make_family("uniform-box", 1);
    AveragedKernel k1(half_indicator(), fam.generator(1), Quadrature{});
    AveragedKernel k4 = scale_self_similar(k1, 4.0);
    Rng rng(17);
    for (int i = 0; i < 100; ++i) {
        double x = rng.uniform(-0.6, 0.6);
        double lhs = k4(Point{x});
        double rhs = 4.0 * k1(Point{4 * x});
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
    }
}

TEST_CASE("strategies agree pointwise") {
    FamilySpec fam = make_family("uniform-variance", 1);
    Profile phi = half_indicator();
    JointDistributionSpec spec = fam.generator(2);
    AveragedKernel quad(phi, spec, Quadrature{});
    AveragedKernel mc(phi, spec, MonteCarloEval{60000, 11});
    Rng rng(23);
    for (int i = 0; i < 100; ++i) {
        double x = rng.uniform(-0.7, 0.7);
        EvalResult q = quad.evaluate_with_error(Point{x});
        EvalResult m = mc.evaluate_with_error(Point{x});
        INFO("x=" << x << " quad=" << q.value << " mc=" << m.value << " se=" << m.std_error);
        CHECK(std::abs(q.value - m.value) <= 3 * m.std_error + 1e-6);
    }
}

TEST_CASE("coupled kernels average their sphere branches") {
    // nu = delta_1, y = +-1: K(x) = (phi(|x-1|) + phi(|x+1|)) / 2
    JointDistributionSpec spec(
        1, JointCoupled{ScalarMarginal::point(1.0),
                        [](double s, const Point& u) { return s * u; }, 1.0, true});
    AveragedKernel k(half_indicator(), spec, Quadrature{});
    CHECK(k(Point{1.2}) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(k(Point{0.5}) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(k(Point{0.0}) == 0.0);  // both branches sit on the open support edge
    CHECK(k(Point{2.5}) == 0.0);
}

TEST_CASE("kernels are nonnegative") {
    FamilySpec fam = make_family("uniform-box", 1);
    AveragedKernel k(normalize(make_profile("power-tail", 1)), fam.generator(2), Quadrature{});
    Rng rng(31);
    for (int i = 0; i < 50; ++i) CHECK(k(Point{rng.uniform(-4, 4)}) >= 0.0);
}

TEST_CASE("strategy preconditions are enforced") {
    auto spec = atom_spec(1.0, 0.0);
    Profile phi = half_indicator();
    CHECK_THROWS_AS(AveragedKernel(phi, spec, Quadrature{8, 8}), ConfigError);
    CHECK_THROWS_AS(AveragedKernel(phi, spec, MonteCarloEval{100}), ConfigError);
    FamilySpec box = make_family("uniform-box", 1);
    CHECK_THROWS_AS(AveragedKernel(phi, box.generator(1), AtomsExact{}), ConfigError);
}
