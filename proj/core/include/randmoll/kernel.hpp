#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <variant>

#include "randmoll/distribution.hpp"
#include "randmoll/grid.hpp"
#include "randmoll/profile.hpp"

namespace randmoll {

struct AtomsExact {};
struct Quadrature {
    int s_nodes = 48;  // contract: >= 16 per axis
    int y_nodes = 32;
    double rel_tol = 1e-7;
};
struct MonteCarloEval {
    int samples = 100000;  // contract: >= 1000
    std::uint64_t seed = 1;
};
using KernelStrategy = std::variant<AtomsExact, Quadrature, MonteCarloEval>;

struct EvalResult {
    double value = 0;
    double std_error = 0;  // zero for the deterministic strategies
};

/// The averaged kernel K(x) = int s^{-n} phi(|x - y| / s) dPi(s, y), evaluable
/// through an exact atom sum, nested quadrature, or Monte Carlo. Immutable
/// except for the lazily cached mass, which is computed idempotently.
class AveragedKernel {
public:
    AveragedKernel(Profile profile, JointDistributionSpec spec, KernelStrategy strategy);

    int dimension() const { return spec_.dimension(); }
    const Profile& profile() const { return profile_; }
    const JointDistributionSpec& spec() const { return spec_; }
    const KernelStrategy& strategy() const { return strategy_; }

    EvalResult evaluate_with_error(const Point& x) const;
    double operator()(const Point& x) const { return evaluate_with_error(x).value; }

    /// Total integral of K over R^n by the strategy's integration: exact
    /// profile mass for atoms, x-space quadrature with a tail bound for the
    /// quadrature strategy, radial importance sampling for Monte Carlo.
    double mass() const;
    EvalResult mass_with_error() const;

    /// Radius beyond which K carries at most ~1e-6 of its mass (exact support
    /// when the profile is compactly supported).
    double support_radius() const;

    /// True when K is a radial function (zero mean marginal, or a declared
    /// radially symmetric joint density).
    bool is_radial() const;

private:
    struct MassCache;

    Profile profile_;
    JointDistributionSpec spec_;
    KernelStrategy strategy_;
    double profile_radius_;    // effective support radius of phi (1e-6 tail)
    double profile_radius12_;  // tighter truncation radius (1e-12 tail)
    std::shared_ptr<MassCache> mass_cache_;  // shared across copies

    EvalResult eval_quadrature(const Point& x) const;
    EvalResult compute_mass() const;
};

double kernel_mass(const AveragedKernel& k);

/// One-variable reduction t -> int s^{-n} phi(t/s) dnu(s); requires the mean
/// marginal to be the point mass at the origin.
std::function<double(double)> radial_reduction(const AveragedKernel& k);

/// m(f)(x) = int f(x - y) dmu(y) for pure-translation specs. Values of f
/// outside its grid are zero (the extension policy).
double translation_only_apply(const JointDistributionSpec& spec, const GridFunction& f,
                              const Point& x);

/// Kernel of the index-j member of the self-similar family generated by k1:
/// the parameters are pushed forward so that eval(x) = j^n eval_k1(j x) holds
/// by the scaling identity, not by wrapping. Any real j >= 1 is accepted.
AveragedKernel scale_self_similar(const AveragedKernel& k1, double j);

}  // namespace randmoll
