#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include "bitan/core/scalar.hpp"

namespace bitan {

/// Seeded generator whose output is identical across standard libraries:
/// only the raw mt19937_64 stream is consumed, never a std distribution.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform on the square [-1,1] x [-1,1] i.
    std::complex<double> complex_box() { return {uniform(-1.0, 1.0), uniform(-1.0, 1.0)}; }

    template <class Real>
    Complex<Real> complex() {
        return from_cdouble<Real>(complex_box());
    }

    std::uint64_t index(std::uint64_t n) { return engine_() % n; }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace bitan
