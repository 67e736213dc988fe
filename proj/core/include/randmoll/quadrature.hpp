#pragma once

#include <functional>
#include <string>
#include <vector>

namespace randmoll {

struct QuadResult {
    double value = 0;
    double abs_error = 0;
    int evals = 0;
    bool converged = false;
};

/// Globally adaptive Gauss-Kronrod (G7/K15) on a finite interval. Endpoints
/// are never evaluated, so integrable endpoint singularities are fine.
QuadResult integrate_gk(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-10, double abs_tol = 1e-14,
                        int max_intervals = 4000);

/// Same, but with mandatory initial subdivision points (kinks, support edges).
QuadResult integrate_gk_breaks(const std::function<double(double)>& f, double a, double b,
                               const std::vector<double>& breaks, double rel_tol = 1e-10,
                               double abs_tol = 1e-14, int max_intervals = 4000);

/// Fixed-order Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussLegendre& gauss_legendre(int order);

/// Integral of rho^weight * f(rho) over (0, infinity).
///
/// (0, R] is handled by adaptive Gauss-Kronrod; R is pushed out until
/// f(R) * R^cutoff_power < 1e-14, then the remaining tail is estimated from a
/// local power-law fit of f. The fit also supplies the finiteness verdict:
/// a tail exponent p with weight - p > -1 means a divergent tail, and the same
/// test at the origin catches non-integrable singularities there.
struct RadialIntegral {
    double value = 0;
    double tail = 0;            // fitted tail estimate beyond the cutoff
    double cutoff = 0;          // R actually used
    bool convergent = false;
    std::string diagnostic;     // set when not convergent
};
RadialIntegral integrate_radial(const std::function<double(double)>& f, double weight,
                                double support_radius, int cutoff_power,
                                double rel_tol = 1e-11);

}  // namespace randmoll
