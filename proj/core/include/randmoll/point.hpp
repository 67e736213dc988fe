#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <initializer_list>
#include <stdexcept>

namespace randmoll {

/// Small fixed-capacity point in R^n. Grid paths only use n <= 2 but the
/// Monte Carlo machinery accepts anything up to kMaxDim.
inline constexpr int kMaxDim = 8;

class Point {
public:
    Point() = default;
    explicit Point(int dim) : n_(dim) {
        if (dim < 0 || dim > kMaxDim) throw std::invalid_argument("Point: bad dimension");
    }
    Point(std::initializer_list<double> xs) : n_(static_cast<int>(xs.size())) {
        if (n_ > kMaxDim) throw std::invalid_argument("Point: bad dimension");
        int i = 0;
        for (double x : xs) v_[i++] = x;
    }
    static Point zero(int dim) { return Point(dim); }

    int dim() const { return n_; }
    double& operator[](int i) { assert(i >= 0 && i < n_); return v_[i]; }
    double operator[](int i) const { assert(i >= 0 && i < n_); return v_[i]; }

    double norm_sq() const {
        double s = 0;
        for (int i = 0; i < n_; ++i) s += v_[i] * v_[i];
        return s;
    }
    double norm() const { return std::sqrt(norm_sq()); }

    friend Point operator-(const Point& a, const Point& b) {
        assert(a.n_ == b.n_);
        Point r(a.n_);
        for (int i = 0; i < a.n_; ++i) r.v_[i] = a.v_[i] - b.v_[i];
        return r;
    }
    friend Point operator+(const Point& a, const Point& b) {
        assert(a.n_ == b.n_);
        Point r(a.n_);
        for (int i = 0; i < a.n_; ++i) r.v_[i] = a.v_[i] + b.v_[i];
        return r;
    }
    friend Point operator*(double c, const Point& a) {
        Point r(a.n_);
        for (int i = 0; i < a.n_; ++i) r.v_[i] = c * a.v_[i];
        return r;
    }
    friend bool operator==(const Point& a, const Point& b) {
        if (a.n_ != b.n_) return false;
        for (int i = 0; i < a.n_; ++i)
            if (a.v_[i] != b.v_[i]) return false;
        return true;
    }

private:
    std::array<double, kMaxDim> v_{};
    int n_ = 0;
};

/// Surface measure of the unit sphere in R^n (2, 2*pi, 4*pi, ...).
inline double sphere_surface(int n) {
    return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

/// Volume of the unit ball in R^n.
inline double ball_volume(int n) { return sphere_surface(n) / n; }

}  // namespace randmoll
