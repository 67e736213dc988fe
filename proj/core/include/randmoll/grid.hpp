#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "randmoll/point.hpp"

namespace randmoll {

/// Real-valued function sampled at cell centers of a uniform box grid in
/// dimension 1 or 2, extended by zero outside the box.
class GridFunction {
public:
    GridFunction() : GridFunction(1, {0, 0}, {1, 1}, {1, 1}) {}
    GridFunction(int dim, std::array<double, 2> lo, std::array<double, 2> hi,
                 std::array<int, 2> res);
    static GridFunction sample(int dim, std::array<double, 2> lo, std::array<double, 2> hi,
                               std::array<int, 2> res,
                               const std::function<double(const Point&)>& f);

    int dimension() const { return dim_; }
    int resolution(int axis) const { return res_[axis]; }
    double lo(int axis) const { return lo_[axis]; }
    double hi(int axis) const { return hi_[axis]; }
    double pitch(int axis) const { return (hi_[axis] - lo_[axis]) / res_[axis]; }
    double cell_volume() const;
    std::size_t size() const { return values_.size(); }

    std::size_t index(int i0, int i1 = 0) const {
        return static_cast<std::size_t>(i0) * res_[1] + i1;
    }
    double& operator[](std::size_t k) { return values_[k]; }
    double operator[](std::size_t k) const { return values_[k]; }
    Point center(std::size_t k) const;

    /// Piecewise-constant lookup; zero outside the box.
    double value_at(const Point& x) const;

    double l1_norm() const;
    double lp_norm(double p) const;
    double sup_norm() const;

    /// Header (n, box, resolution), then one sample per row with 17
    /// significant digits, which round-trips doubles exactly.
    void write_csv(std::ostream& os) const;
    static GridFunction read_csv(std::istream& is);

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

private:
    int dim_;
    std::array<double, 2> lo_, hi_;
    std::array<int, 2> res_;
    std::vector<double> values_;
};

/// A catalog entry together with what the experiments need to know about it:
/// continuity and the distance to its jump/singularity set.
struct CatalogFunction {
    GridFunction f;
    bool continuous = true;
    std::function<double(const Point&)> distance_to_rough;  // +inf when smooth
};

/// Known names: constant, tent, cosine-packet, ball-indicator (radius),
/// spike (n=1), step.
CatalogFunction test_function(const std::string& name, int dim, std::array<double, 2> lo,
                              std::array<double, 2> hi, std::array<int, 2> res,
                              const std::map<std::string, double>& params = {});
std::vector<std::string> test_function_catalog();

}  // namespace randmoll
