#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include <boost/multiprecision/complex128.hpp>
#include <boost/multiprecision/float128.hpp>

namespace bitan {

/// Software quad precision (113-bit mantissa, ~34 decimal digits).
using Quad = boost::multiprecision::float128;

template <class Real>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
    using Complex = std::complex<double>;
    static constexpr const char* name = "binary64";
};

template <>
struct ScalarTraits<Quad> {
    using Complex = boost::multiprecision::complex128;
    static constexpr const char* name = "quad";
};

template <class Real>
using Complex = typename ScalarTraits<Real>::Complex;

template <class Real>
using Vec3 = std::array<Complex<Real>, 3>;

inline double to_double(double x) { return x; }
inline double to_double(const Quad& x) { return static_cast<double>(x); }

template <class C>
std::complex<double> to_cdouble(const C& z) {
    using std::imag;
    using std::real;
    return {to_double(real(z)), to_double(imag(z))};
}

template <class Real>
Complex<Real> from_cdouble(const std::complex<double>& z) {
    return Complex<Real>(Real(z.real()), Real(z.imag()));
}

template <class Real>
Real abs_of(const Complex<Real>& z) {
    using std::abs;
    return abs(z);
}

template <class Real>
Real norm2_of(const Complex<Real>& z) {
    using std::imag;
    using std::real;
    const Real re = real(z);
    const Real im = imag(z);
    return re * re + im * im;
}

template <class Real>
Real epsilon() {
    return std::numeric_limits<Real>::epsilon();
}

enum class PrecisionMode { standard, extended };

/// Relative tolerances shared across the pipeline. All residuals they are
/// compared against are scaled by the norms of their inputs.
struct Tolerances {
    double geo = 1e-8;  ///< on-variety residual
    double dup = 1e-6;  ///< projective distance below which two points coincide
    double sq = 1e-8;   ///< square-certificate residual

    void validate() const {
        if (!(geo > 0.0) || !(dup > 0.0) || !(sq > 0.0)) {
            throw std::invalid_argument("tolerances must be strictly positive");
        }
    }
};

struct Precision {
    PrecisionMode mode = PrecisionMode::standard;
    Tolerances tol{};
};

}  // namespace bitan
