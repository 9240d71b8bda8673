#pragma once

#include <algorithm>
#include <array>
#include <compare>

#include "bitan/core/error.hpp"
#include "bitan/core/scalar.hpp"

namespace bitan {

enum class Role { point, line };

/// Homogeneous triple in the plane or its dual. A line and the dual point it
/// defines share the same coordinates; only the role differs.
template <class Real>
struct ProjVec {
    using C = Complex<Real>;

    Vec3<Real> coords{};
    Role role = Role::point;

    ProjVec() = default;
    ProjVec(const Vec3<Real>& c, Role r = Role::point) : coords(c), role(r) {}
    ProjVec(C x, C y, C z, Role r = Role::point) : coords{x, y, z}, role(r) {}

    const C& operator[](std::size_t i) const { return coords[i]; }
    C& operator[](std::size_t i) { return coords[i]; }

    ProjVec dual() const { return {coords, role == Role::point ? Role::line : Role::point}; }

    ProjVec as(Role r) const { return {coords, r}; }

    Real max_abs() const {
        Real m(0);
        for (const auto& c : coords) m = std::max(m, abs_of<Real>(c));
        return m;
    }

    Real norm() const {
        Real s(0);
        for (const auto& c : coords) s += norm2_of<Real>(c);
        using std::sqrt;
        return sqrt(s);
    }

    template <class R2>
    ProjVec<R2> cast() const {
        ProjVec<R2> out;
        out.role = role;
        for (int i = 0; i < 3; ++i) {
            using std::imag;
            using std::real;
            out.coords[i] = Complex<R2>(R2(real(coords[i])), R2(imag(coords[i])));
        }
        return out;
    }
};

/// Scales `v` so its largest-magnitude coordinate is exactly 1; the first
/// index wins ties. `context_scale` is the magnitude of the data the vector
/// came from, so a vector that is negligible relative to it is rejected.
template <class Real>
ProjVec<Real> normalize(const ProjVec<Real>& v, double tol_geo = 1e-8, double context_scale = 1.0) {
    std::size_t pivot = 0;
    Real best = abs_of<Real>(v.coords[0]);
    for (std::size_t i = 1; i < 3; ++i) {
        const Real a = abs_of<Real>(v.coords[i]);
        if (a > best) {
            best = a;
            pivot = i;
        }
    }
    if (!(best > Real(tol_geo * context_scale)) || best == Real(0)) {
        throw Error(ErrorKind::ZeroVector, "cannot normalize a vanishing projective vector");
    }
    ProjVec<Real> out = v;
    const Complex<Real> inv = Complex<Real>(Real(1)) / v.coords[pivot];
    for (std::size_t i = 0; i < 3; ++i) out.coords[i] = i == pivot ? Complex<Real>(Real(1)) : v.coords[i] * inv;
    return out;
}

/// Sine of the Hermitian angle between two representatives; zero iff the
/// points coincide projectively. Independent of the normalization pivot.
/// Computed as |a ^ b| / (|a| |b|), which keeps full relative accuracy for
/// nearby points.
template <class Real>
Real proj_distance(const Vec3<Real>& a, const Vec3<Real>& b) {
    using std::sqrt;
    Real na(0), nb(0), w(0);
    for (int i = 0; i < 3; ++i) {
        na += norm2_of<Real>(a[i]);
        nb += norm2_of<Real>(b[i]);
    }
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) w += norm2_of<Real>(a[i] * b[j] - a[j] * b[i]);
    const Real s = sqrt(w / (na * nb));
    return s > Real(1) ? Real(1) : s;
}

template <class Real>
Real proj_distance(const ProjVec<Real>& a, const ProjVec<Real>& b) {
    return proj_distance<Real>(a.coords, b.coords);
}

template <class Real>
Vec3<Real> cross(const Vec3<Real>& a, const Vec3<Real>& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

template <class Real>
Complex<Real> dot(const Vec3<Real>& a, const Vec3<Real>& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

/// Relative incidence |<line, point>| / (|line| |point|).
template <class Real>
Real incidence(const ProjVec<Real>& line, const ProjVec<Real>& point) {
    return abs_of<Real>(dot<Real>(line.coords, point.coords)) / (line.norm() * point.norm());
}

/// Line through two points, or the intersection point of two lines.
template <class Real>
ProjVec<Real> join(const ProjVec<Real>& a, const ProjVec<Real>& b) {
    return {cross<Real>(a.coords, b.coords), a.role == Role::point ? Role::line : Role::point};
}

/// Lexicographic order on normalized coordinates, real part before imaginary.
template <class Real>
bool lex_less(const ProjVec<Real>& a, const ProjVec<Real>& b) {
    using std::imag;
    using std::real;
    for (int i = 0; i < 3; ++i) {
        if (real(a.coords[i]) != real(b.coords[i])) return real(a.coords[i]) < real(b.coords[i]);
        if (imag(a.coords[i]) != imag(b.coords[i])) return imag(a.coords[i]) < imag(b.coords[i]);
    }
    return false;
}

}  // namespace bitan
