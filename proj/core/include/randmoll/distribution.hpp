#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "randmoll/point.hpp"
#include "randmoll/report.hpp"
#include "randmoll/rng.hpp"

namespace randmoll {

// ---------------------------------------------------------------------------
// Marginal on [0, inf): the variance component.
// ---------------------------------------------------------------------------

struct ScalarAtoms {
    std::vector<std::pair<double, double>> atoms;  // (value, weight)
};
struct ScalarUniform {
    double lo = 0, hi = 1;  // uniform on (lo, hi]
};
struct ScalarDensity {
    std::function<double(double)> pdf;
    double lo = 0, hi = 1;
    double max_hint = 0;  // sup pdf when declared; 0 = estimate from a grid
};

class ScalarMarginal {
public:
    using Form = std::variant<ScalarAtoms, ScalarUniform, ScalarDensity>;

    explicit ScalarMarginal(Form form);
    static ScalarMarginal point(double value);

    const Form& form() const { return form_; }
    double total_mass() const;
    double mass(double a, double b) const;  // of the half-open interval (a, b]
    double integrate(const std::function<double(double)>& g) const;
    double sample(Rng& rng) const;
    std::optional<double> as_point_mass() const;
    double lower() const;
    double upper() const;

private:
    Form form_;
    double sampler_bound_ = 0;  // inflated rejection bound for density forms
    bool sampler_unbounded_ = false;
};

// ---------------------------------------------------------------------------
// Marginal on R^n: the mean component.
// ---------------------------------------------------------------------------

struct VectorAtoms {
    std::vector<std::pair<Point, double>> atoms;
};
struct BoxUniform {
    Point lo, hi;
};
struct VectorDensity {
    std::function<double(const Point&)> pdf;
    Point lo, hi;  // support box
    double max_hint = 0;
    /// Optional analytic mass of [a, b] (dimension 1 only). Densities with a
    /// singularity away from 0 cannot be integrated past ~1e-8 in y-space --
    /// the last representable panel under the singularity swallows the error
    /// -- so such catalog entries carry their interval mass in closed form.
    std::function<double(double, double)> interval_mass;
};

class VectorMarginal {
public:
    using Form = std::variant<VectorAtoms, BoxUniform, VectorDensity>;

    VectorMarginal(int dim, Form form);
    static VectorMarginal point(const Point& value);

    int dim() const { return dim_; }
    const Form& form() const { return form_; }
    double total_mass() const;
    /// mu of the closed box [lo, hi] (atoms on the boundary count).
    double mass_box(const Point& lo, const Point& hi) const;
    double integrate(const std::function<double(const Point&)>& g) const;
    Point sample(Rng& rng) const;
    std::optional<Point> as_point_mass() const;
    double support_radius() const;

private:
    int dim_;
    Form form_;
    double sampler_bound_ = 0;
    bool sampler_unbounded_ = false;
};

// ---------------------------------------------------------------------------
// Joint distribution of (variance, mean) on R^+ x R^n.
// ---------------------------------------------------------------------------

struct Atom {
    double s = 0;
    Point y;
    double weight = 0;
};
struct JointAtoms {
    std::vector<Atom> atoms;
};
struct JointProduct {
    ScalarMarginal variance;
    VectorMarginal mean;
};
/// Density gamma(s, y) supported in [0, s_max] x closed ball(0, y_radius).
struct JointDensity {
    std::function<double(double, const Point&)> pdf;
    double s_max = 1;
    double y_radius = 1;
    double max_hint = 0;
    bool y_radial = false;  // pdf depends on y only through |y|
};
/// Variance marginal nu plus a coupling map y = couple(eps, u) with u uniform
/// on the unit sphere. couple must be positively homogeneous in eps so that
/// scaling the family scales the coupled mean with it.
struct JointCoupled {
    ScalarMarginal variance;
    std::function<Point(double, const Point&)> couple;
    double radius_factor = 1;  // |couple(s, u)| <= radius_factor * s
    bool rotation_equivariant = false;  // couple(s, Ru) = R couple(s, u)
};

class JointDistributionSpec {
public:
    using Form = std::variant<JointAtoms, JointProduct, JointDensity, JointCoupled>;

    JointDistributionSpec(int dim, Form form, std::optional<int> index = std::nullopt);

    int dimension() const { return dim_; }
    std::optional<int> index() const { return index_; }
    const Form& form() const { return form_; }

    double total_mass() const;
    double integrate(const std::function<double(double, const Point&)>& g) const;
    std::vector<std::pair<double, Point>> sample(int count, std::uint64_t seed) const;

    bool pure_translation() const;  // variance marginal is the point mass at 0
    bool mean_is_zero() const;
    std::optional<ScalarMarginal> variance_marginal() const;
    std::optional<VectorMarginal> mean_marginal() const;
    double s_upper() const;
    double y_radius() const;

    /// Throws when mass is off 1 by more than 1e-9, a variance value is
    /// negative, s = 0 atoms appear in a non-translation family, or a declared
    /// density leaks outside its support.
    void validate() const;

private:
    int dim_;
    Form form_;
    std::optional<int> index_;
    double sampler_bound_ = 0;
    bool sampler_unbounded_ = false;
};

std::vector<std::pair<double, Point>> sample(const JointDistributionSpec& spec, int count,
                                             std::uint64_t seed);

/// Pushforward of (s, y) -> (s/j, y/j): the self-similar scaling
/// Pi_j(E) = Pi(jE), usable with any real j >= 1.
ScalarMarginal scale_marginal(const ScalarMarginal& m, double j);
VectorMarginal scale_marginal(const VectorMarginal& m, double j);
JointDistributionSpec scale_spec(const JointDistributionSpec& spec, double j);

// ---------------------------------------------------------------------------
// Families indexed by j.
// ---------------------------------------------------------------------------

struct FamilySpec {
    std::string name;
    int dimension = 1;
    std::function<JointDistributionSpec(int)> generator;
    bool self_similar = false;
    int horizon = 64;
};

/// Integrates a battery of bounded continuous test functions against Pi_j and
/// reports the decay of sup |int g dPi_j - g(0, 0)|; for separable variance
/// marginals also reports interval-mass deficits nu_j((-1, b]) - 1.
ConditionReport check_vague_convergence(const FamilySpec& family);

/// Measures, per j, the support radius r_j (smallest r holding all mass up to
/// 1e-12) and the density sup, and checks A_j = ||gamma_j||_inf r_j^{n+1} for
/// growth across j.
ConditionReport check_density_hypotheses(const FamilySpec& family);

/// Exact self-similarity spot check for density families:
/// gamma_j(s,y) = j^{n+1} gamma_1(js, jy) at sampled points.
ConditionReport spot_check_self_similarity(const FamilySpec& family, int j, int count,
                                           std::uint64_t seed);

/// Catalog lookup. Known names: fixed-atom (s, y1), two-scale-atoms,
/// uniform-variance (r1), coupled-sphere (r1, C), uniform-box (r1),
/// product-box (r1, r2), growing-spike, translation-singular (a),
/// translation-uniform. Parameter J sets the horizon.
FamilySpec make_family(const std::string& name, int dim,
                       const std::map<std::string, double>& params = {});
std::vector<std::string> family_catalog();

}  // namespace randmoll
