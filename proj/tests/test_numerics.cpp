#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "randmoll/point.hpp"
#include "randmoll/quadrature.hpp"
#include "randmoll/report.hpp"
#include "randmoll/rng.hpp"

using namespace randmoll;

TEST_CASE("sphere surface and ball volume") {
    CHECK(sphere_surface(1) == doctest::Approx(2.0));
    CHECK(sphere_surface(2) == doctest::Approx(2 * M_PI));
    CHECK(sphere_surface(3) == doctest::Approx(4 * M_PI));
    CHECK(ball_volume(1) == doctest::Approx(2.0));
    CHECK(ball_volume(2) == doctest::Approx(M_PI));
}

TEST_CASE("adaptive gauss-kronrod on smooth integrands") {
    auto r = integrate_gk([](double x) { return std::sin(x); }, 0, M_PI);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));

    auto g = integrate_gk([](double x) { return std::exp(-x * x); }, -8, 8);
    CHECK(g.value == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
}

TEST_CASE("adaptive gauss-kronrod on an endpoint singularity") {
    auto r = integrate_gk([](double x) { return 1.0 / std::sqrt(x); }, 0, 1, 1e-10);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("gauss-legendre nodes integrate high-degree polynomials exactly") {
    const auto& gl = gauss_legendre(16);
    double sw = 0, p30 = 0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        sw += gl.weights[i];
        p30 += gl.weights[i] * std::pow(gl.nodes[i], 30);
    }
    CHECK(sw == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(p30 == doctest::Approx(2.0 / 31.0).epsilon(1e-13));
}

TEST_CASE("radial integral with exponential tail") {
    auto r = integrate_radial([](double rho) { return std::exp(-rho); }, 0.0,
                              std::numeric_limits<double>::infinity(), 2);
    CHECK(r.convergent);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("radial integral with power tail matches the antiderivative") {
    // int_0^inf (1+rho)^{-3} = 1/2
    auto r = integrate_radial([](double rho) { return std::pow(1 + rho, -3.0); }, 0.0,
                              std::numeric_limits<double>::infinity(), 2);
    CHECK(r.convergent);
    CHECK(r.value == doctest::Approx(0.5).epsilon(1e-7));
}

TEST_CASE("radial integral flags a divergent tail") {
    // rho * (1+rho^2)^{-1} ~ 1/rho is not integrable
    auto r = integrate_radial([](double rho) { return 1.0 / (1 + rho * rho); }, 1.0,
                              std::numeric_limits<double>::infinity(), 2);
    CHECK_FALSE(r.convergent);
    CHECK(r.diagnostic.find("tail") != std::string::npos);
}

TEST_CASE("radial integral flags a non-integrable origin") {
    auto r = integrate_radial([](double rho) { return 1.0 / (rho * rho); }, 0.0,
                              std::numeric_limits<double>::infinity(), 2);
    CHECK_FALSE(r.convergent);
    CHECK(r.diagnostic.find("origin") != std::string::npos);
}

TEST_CASE("rng stream is reproducible and uniform draws stay in range") {
    Rng a(42), b(42), c(43);
    bool same = true, diff = false;
    for (int i = 0; i < 1000; ++i) {
        double x = a.uniform(), y = b.uniform(), z = c.uniform();
        same = same && x == y;
        diff = diff || x != z;
        CHECK(x >= 0);
        CHECK(x < 1);
    }
    CHECK(same);
    CHECK(diff);
}

TEST_CASE("sphere samples have unit norm") {
    Rng rng(7);
    for (int n : {1, 2, 3}) {
        for (int i = 0; i < 100; ++i) {
            CHECK(rng.sphere(n).norm() == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("welford mean and standard error") {
    MeanAccumulator acc;
    for (double v : {1.0, 2.0, 3.0, 4.0}) acc.add(v);
    CHECK(acc.mean() == doctest::Approx(2.5));
    // sample variance 5/3, se = sqrt(5/12)
    CHECK(acc.std_error() == doctest::Approx(std::sqrt(5.0 / 12.0)).epsilon(1e-12));
}

TEST_CASE("report line serialization format") {
    ReportLine line{"kernel-mass", 3, 1.0, 1.0, Verdict::pass, ""};
    CHECK(to_text(line) == "check=kernel-mass j=3 value=1 bound=1 verdict=pass");
    ReportLine noj{"vague", std::nullopt, 0.25, std::nullopt, Verdict::info, ""};
    CHECK(to_text(noj) == "check=vague value=0.25 verdict=info");
}

TEST_CASE("format_double round-trips") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.6789, -0.0}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}
