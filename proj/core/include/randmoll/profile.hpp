#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "randmoll/quadrature.hpp"
#include "randmoll/report.hpp"

namespace randmoll {

enum class ProfileKind { indicator, scaled_indicator, power_tail, gaussian, custom };

struct ProfileFlags {
    bool normalized = false;
    bool c1 = false;
    bool bounded = false;
    bool nonincreasing = false;
    bool finite_nth_moment = false;
};

/// A radial kernel profile phi: (0, inf) -> [0, inf) together with its
/// declared analytic properties. Immutable after construction; normalize()
/// returns a new value.
class Profile {
public:
    Profile(std::string name, int dimension, ProfileKind kind,
            std::function<double(double)> evaluate,
            std::function<double(double)> derivative,  // empty when not C1
            ProfileFlags flags, double support_radius,
            std::map<std::string, double> params = {});

    double operator()(double rho) const { return evaluate_(rho); }
    bool has_derivative() const { return static_cast<bool>(derivative_); }
    double derivative(double rho) const;  // throws UnsupportedError when absent

    const std::string& name() const { return name_; }
    int dimension() const { return dimension_; }
    ProfileKind kind() const { return kind_; }
    const ProfileFlags& flags() const { return flags_; }
    /// Exact support radius where known, +inf otherwise.
    double support_radius() const { return support_radius_; }
    double param(const std::string& key, double fallback) const;

private:
    std::string name_;
    int dimension_;
    ProfileKind kind_;
    std::function<double(double)> evaluate_;
    std::function<double(double)> derivative_;
    ProfileFlags flags_;
    double support_radius_;
    std::map<std::string, double> params_;
};

/// omega_n * int_0^inf rho^{n-1} phi(rho) drho with full diagnostics.
RadialIntegral radial_mass_integral(const Profile& p);
double radial_mass(const Profile& p);  // throws NumericsError when divergent

/// M_n = omega_n * int_0^inf rho^{2n-1} phi(rho) drho (= int |x|^n phi(|x|) dx).
RadialIntegral radial_moment_integral(const Profile& p);

/// Rescales so the radial integral is 1. Already-normalized input (within
/// 1e-12) is returned with scale exactly 1, so normalization is idempotent.
Profile normalize(const Profile& p);

/// sup over a log-spaced grid of |phi'(rho)| rho^{n+1}; fails when that
/// quantity still grows across the top decades of the grid.
ConditionReport check_gradient_bound(const Profile& p);

/// Boundedness near the origin, pairwise monotonicity, and finiteness of the
/// n-th moment: the hypotheses of the bounded/nonincreasing kernel theorem.
ConditionReport check_moment_and_monotone(const Profile& p);

/// Smallest R whose tail carries at most tail_fraction of the radial mass.
double effective_radius(const Profile& p, double tail_fraction);

/// Catalog lookup. Known names: indicator, scaled-indicator (alpha, beta),
/// power-tail (delta), gaussian, exponential, poisson, origin-spike.
Profile make_profile(const std::string& name, int dimension,
                     const std::map<std::string, double>& params = {});
std::vector<std::string> profile_catalog();

}  // namespace randmoll
