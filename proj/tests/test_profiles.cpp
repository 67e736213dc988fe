#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "randmoll/errors.hpp"
#include "randmoll/profile.hpp"
#include "randmoll/rng.hpp"

using namespace randmoll;

TEST_CASE("normalize indicator in dimension 1 scales by 1/2") {
    Profile p = normalize(make_profile("indicator", 1));
    CHECK(p.flags().normalized);
    CHECK(p(0.5) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(radial_mass(p) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("normalize indicator in dimension 2 scales by 1/pi") {
    Profile p = normalize(make_profile("indicator", 2));
    CHECK(p(0.5) == doctest::Approx(1.0 / M_PI).epsilon(1e-10));
    CHECK(radial_mass(p) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("power-tail delta=1 in dimension 1 is already normalized") {
    // quadrature against the antiderivative: int_0^inf (1+rho)^{-3} = 1/2,
    // omega_1 = 2, so the scale factor is 1
    Profile raw = make_profile("power-tail", 1);
    CHECK(radial_mass(raw) == doctest::Approx(1.0).epsilon(1e-8));
    Profile p = normalize(raw);
    CHECK(p(1.0) == doctest::Approx(0.125).epsilon(1e-8));
}

TEST_CASE("normalization is idempotent") {
    Profile once = normalize(make_profile("gaussian", 2));
    Profile twice = normalize(once);
    for (double rho : {0.1, 0.5, 1.0, 2.0, 5.0})
        CHECK(twice(rho) == doctest::Approx(once(rho)).epsilon(1e-12));
    CHECK(twice.param("scale", 0.0) == 1.0);
}

TEST_CASE("non-integrable and zero profiles are rejected with a diagnostic") {
    Profile heavy("heavy", 1, ProfileKind::custom, [](double rho) { return 1.0 / (1.0 + rho); },
                  {}, {}, std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(normalize(heavy), NumericsError);
    CHECK_THROWS_WITH_AS(normalize(heavy), doctest::Contains("tail"), NumericsError);

    Profile zero("zero", 1, ProfileKind::custom, [](double) { return 0.0; }, {}, {}, 1.0);
    CHECK_THROWS_AS(normalize(zero), NumericsError);
}

TEST_CASE("gradient bound for the power-tail profile") {
    // |phi'(rho)| rho^2 = 3 rho^2 / (1+rho)^4 peaks at rho = 1 with value 3/16
    Profile p = make_profile("power-tail", 1);
    ConditionReport rep = check_gradient_bound(p);
    CHECK(rep.passed());
    CHECK(rep.measured == doctest::Approx(3.0 / 16.0).epsilon(1e-4));
}

TEST_CASE("gradient bound needs a C1 profile") {
    CHECK_THROWS_AS(check_gradient_bound(make_profile("indicator", 1)), UnsupportedError);
    CHECK_THROWS_AS(check_gradient_bound(make_profile("scaled-indicator", 1)), UnsupportedError);
}

TEST_CASE("gradient bound passes for gaussian with an interior maximizer") {
    Profile p = normalize(make_profile("gaussian", 1));
    ConditionReport rep = check_gradient_bound(p);
    CHECK(rep.passed());
    // c * 2 rho^3 exp(-rho^2) at rho = sqrt(3/2), c = 1/sqrt(pi)
    const double c = 1.0 / std::sqrt(M_PI);
    const double expected = c * 2.0 * std::pow(1.5, 1.5) * std::exp(-1.5);
    CHECK(rep.measured == doctest::Approx(expected).epsilon(1e-5));
}

TEST_CASE("gradient bound always passes for gaussian and power-tail families") {
    for (int n : {1, 2, 3}) {
        CHECK(check_gradient_bound(make_profile("gaussian", n)).passed());
        for (double delta : {0.5, 1.0, 2.0}) {
            CHECK(check_gradient_bound(make_profile("power-tail", n, {{"delta", delta}}))
                      .passed());
        }
    }
}

TEST_CASE("moment and monotonicity for the normalized indicator") {
    Profile p = normalize(make_profile("indicator", 1));
    ConditionReport rep = check_moment_and_monotone(p);
    CHECK(rep.passed());
    // M_1 = 2 * int_0^1 rho * (1/2) = 1/2
    CHECK(rep.measured == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("poisson-type tails fail the moment check") {
    Profile p = make_profile("poisson", 1);
    ConditionReport rep = check_moment_and_monotone(p);
    CHECK_FALSE(rep.passed());
    bool moment_failed = false;
    for (const auto& line : rep.lines)
        if (line.check == "nth-moment") moment_failed = line.verdict == Verdict::fail;
    CHECK(moment_failed);
}

TEST_CASE("exponential profile in dimension 2 has moment 6 after normalization") {
    Profile p = normalize(make_profile("exponential", 2));
    ConditionReport rep = check_moment_and_monotone(p);
    CHECK(rep.passed());
    CHECK(rep.measured == doctest::Approx(6.0).epsilon(1e-7));
}

TEST_CASE("origin spike is integrable but unbounded") {
    Profile p = normalize(make_profile("origin-spike", 1));
    // int_0^1 rho^{-1/2} = 2 with omega_1 = 2: scale 1/4
    CHECK(p(0.25) == doctest::Approx(0.5).epsilon(1e-9));
    ConditionReport rep = check_moment_and_monotone(p);
    bool bounded_verdict = true;
    for (const auto& line : rep.lines)
        if (line.check == "bounded") bounded_verdict = line.verdict == Verdict::pass;
    CHECK_FALSE(bounded_verdict);
}

TEST_CASE("effective radius of compact profiles is the exact support") {
    CHECK(effective_radius(make_profile("indicator", 1), 1e-6) == 1.0);
    CHECK(effective_radius(make_profile("scaled-indicator", 2, {{"beta", 3.0}}), 1e-6) == 3.0);
}

namespace {

// Independent Monte Carlo oracle for the normalization: importance sampling
// with the mixture reference q(rho) = 0.5 * (1+rho)^{-2} + 0.25 * rho^{-1/2}
// on (0,1), which has finite-variance ratios for every catalog profile.
struct RadialImportance {
    double estimate, std_error;
};
RadialImportance mc_radial_mass(const Profile& p, int samples, std::uint64_t seed) {
    Rng rng(seed);
    const int n = p.dimension();
    MeanAccumulator acc;
    for (int i = 0; i < samples; ++i) {
        double rho;
        if (rng.uniform() < 0.5) {
            double u = rng.uniform();
            rho = u / (1.0 - u + 1e-300);
        } else {
            double u = rng.uniform();
            rho = u * u;
        }
        double q = 0.5 / ((1 + rho) * (1 + rho));
        if (rho < 1) q += 0.25 / std::sqrt(rho + 1e-300);
        acc.add(sphere_surface(n) * std::pow(rho, n - 1.0) * p(rho) / q);
    }
    return {acc.mean(), acc.std_error()};
}

}  // namespace

TEST_CASE("monte carlo radial mass agrees with 1 for every normalized catalog profile") {
    struct Case {
        const char* name;
        int n;
    };
    for (const Case& c : {Case{"indicator", 1}, Case{"indicator", 2}, Case{"power-tail", 1},
                          Case{"gaussian", 2}, Case{"exponential", 1}, Case{"origin-spike", 1}}) {
        Profile p = normalize(make_profile(c.name, c.n));
        auto est = mc_radial_mass(p, 200000, 1234);
        INFO(c.name << " n=" << c.n << " est=" << est.estimate << " se=" << est.std_error);
        CHECK(std::abs(est.estimate - 1.0) <= 3.0 * est.std_error);
    }
}
