#pragma once

#include <stdexcept>
#include <string>

namespace randmoll {

/// A check was asked of an object that cannot support it (missing derivative,
/// wrong distribution form, non-evaluable kernel, ...).
struct UnsupportedError : std::runtime_error {
    explicit UnsupportedError(const std::string& what) : std::runtime_error(what) {}
};

/// A check refused to run because its hypotheses failed or were not verified.
struct RefusedError : std::runtime_error {
    explicit RefusedError(const std::string& what) : std::runtime_error(what) {}
};

/// Bad user-facing configuration (unknown names, missing keys, bad values).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical setup failure (non-integrable profile, rejection sampler with no
/// usable bound, ...).
struct NumericsError : std::runtime_error {
    explicit NumericsError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace randmoll
