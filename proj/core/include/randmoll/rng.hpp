#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "randmoll/point.hpp"

namespace randmoll {

/// Seeded generator with bit-stable mappings. All samplers take the seed as an
/// argument and hold no shared state, so concurrent use with distinct seeds is
/// safe. The uniform mapping is hand-rolled from raw 64-bit draws to keep the
/// stream identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Uniform in (a, b]: never returns the left endpoint.
    double uniform_left_open(double a, double b) { return b - (b - a) * uniform(); }

    double normal() {
        // Box-Muller, no caching; deterministic two-draw cost.
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    /// Uniform direction on the unit sphere S^{n-1}.
    Point sphere(int n) {
        if (n == 1) return Point{(eng_() & 1u) ? 1.0 : -1.0};
        Point p(n);
        double s = 0;
        do {
            for (int i = 0; i < n; ++i) p[i] = normal();
            s = p.norm();
        } while (s == 0);
        return (1.0 / s) * p;
    }

    std::size_t index(std::size_t n) {
        // Multiply-shift; negligible bias for the ranges used here.
        return static_cast<std::size_t>((static_cast<unsigned __int128>(eng_()) * n) >> 64);
    }

private:
    std::mt19937_64 eng_;
};

/// Streaming mean and standard error (Welford).
class MeanAccumulator {
public:
    void add(double x) {
        ++count_;
        double d = x - mean_;
        mean_ += d / count_;
        m2_ += d * (x - mean_);
    }
    long long count() const { return count_; }
    double mean() const { return mean_; }
    double variance() const { return count_ > 1 ? m2_ / (count_ - 1) : 0.0; }
    double std_error() const { return count_ > 1 ? std::sqrt(variance() / count_) : 0.0; }

private:
    long long count_ = 0;
    double mean_ = 0, m2_ = 0;
};

}  // namespace randmoll
