#pragma once

#include <vector>

#include "randmoll/distribution.hpp"
#include "randmoll/mollify.hpp"
#include "randmoll/profile.hpp"

namespace randmoll {

struct MaximalOptions {
    MollifyOptions mollify;
    KernelStrategy kernel = Quadrature{48, 32, 1e-6};
};

/// sup_{j <= J} m_j(|f|) on f's grid with the per-point maximizing index.
/// Raising the horizon never decreases a value.
struct MaximalEstimate {
    GridFunction values;
    std::vector<int> argmax_j;
    int horizon = 0;
    double trust_radius = 0;
};

MaximalEstimate maximal_operator(const FamilySpec& family, const Profile& profile,
                                 const GridFunction& f, int J,
                                 const MaximalOptions& opt = {});

/// One incremental pass with snapshots at the requested (ascending) horizons.
std::vector<MaximalEstimate> maximal_operator_snapshots(const FamilySpec& family,
                                                        const Profile& profile,
                                                        const GridFunction& f,
                                                        const std::vector<int>& snapshot_js,
                                                        const MaximalOptions& opt = {});

/// Centered Hardy-Littlewood maximal function over the given radii:
/// f*(x) = max_r average of |f| over B(x, r), zero extension outside the box.
GridFunction hl_maximal(const GridFunction& f, const std::vector<double>& radii);
std::vector<double> default_hl_radii(const GridFunction& f, int count = 64);
/// 64 log-spaced radii plus, in dimension 1, a local radius refinement around
/// each point's maximizer so the reported sup is not spuriously low.
GridFunction hl_maximal_refined(const GridFunction& f, int count = 64);

/// M f <= alpha beta^n (beta+1)^n A V_n^2 f* with A measured by
/// check_density_hypotheses; refuses when that check fails or the profile is
/// not an indicator type.
ConditionReport check_domination(const FamilySpec& family, const Profile& profile,
                                 const GridFunction& f, int J, const MaximalOptions& opt = {});

/// lambda |{M f > lambda}| / ||f||_1 over the lambda grid; informational.
ConditionReport estimate_weak_type(const FamilySpec& family, const Profile& profile,
                                   const GridFunction& f, int J,
                                   const std::vector<double>& lambdas,
                                   const MaximalOptions& opt = {});

/// The same level-set statistic at several horizons in one pass, for
/// stability-in-J studies.
struct WeakTypeCurve {
    int horizon = 0;
    double a_weak = 0;
    std::vector<std::pair<double, double>> lambda_measure;
};
std::vector<WeakTypeCurve> weak_type_curves(const FamilySpec& family, const Profile& profile,
                                            const GridFunction& f,
                                            const std::vector<int>& snapshot_js,
                                            const std::vector<double>& lambdas,
                                            const MaximalOptions& opt = {});

/// (a) uniform bound of the kernel masses and (b) the truncated smoothness
/// integral int_{2|z| <= |x| <= R} sup_j |K_j(x - z) - K_j(x)| dx over a set
/// of displacements, with the analytic tail added when the profile admits the
/// gradient bound.
ConditionReport check_zo_conditions(const FamilySpec& family, const Profile& profile, int J);

/// Partial series sum_l phi(2^{l-1}) 2^{nl} (2^l + 1)^n against the bound
/// phi(1) 2^n 6^n + (omega_n log 2)^{-1} int |x|^n phi(|x|) dx, both sides
/// computed independently. Refuses profiles failing the moment check.
ConditionReport dyadic_series_bound(const Profile& profile);

}  // namespace randmoll
