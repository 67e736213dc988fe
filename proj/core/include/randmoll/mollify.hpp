#pragma once

#include <optional>

#include "randmoll/grid.hpp"
#include "randmoll/kernel.hpp"

namespace randmoll {

enum class MollifyPath { direct, fft, monte_carlo };

struct MollifyOptions {
    MollifyPath path = MollifyPath::fft;
    int mc_samples = 20000;
    std::uint64_t seed = 7;
};

/// K * f on f's grid. trust_radius is the kernel's effective support radius:
/// points closer than that to the box boundary see the zero extension.
struct MollifyResult {
    GridFunction values;
    MollifyPath path = MollifyPath::fft;
    double trust_radius = 0;
    std::optional<GridFunction> std_error;  // Monte Carlo only
    int index_j = 0;
};

bool in_trust_region(const GridFunction& g, std::size_t cell, double trust_radius);

/// Pure-translation specs dispatch to the cell-mass stencil of mu regardless
/// of the requested path; the Monte Carlo path needs a normalized profile for
/// its z-sampler.
MollifyResult mollify(const AveragedKernel& k, const GridFunction& f,
                      const MollifyOptions& opt = {});

/// m(f)(x) = int f(x - y) dmu(y) on f's whole grid, through per-offset cell
/// masses of mu (exact for the piecewise-constant f up to the quadrature of
/// each cell mass).
MollifyResult mollify_translation(const JointDistributionSpec& spec, const GridFunction& f);

/// Mean of |f| over the grid cells whose centers lie within r of each point
/// (zero extension, count normalization). Large stencils go through the FFT.
GridFunction disc_average(const GridFunction& absf, double r);

/// Monte Carlo point evaluations: avoids the full-grid cost when only a few
/// probe points are needed.
std::vector<EvalResult> mollify_monte_carlo_at(const AveragedKernel& k, const GridFunction& f,
                                               const std::vector<Point>& points,
                                               int samples, std::uint64_t seed);

}  // namespace randmoll
