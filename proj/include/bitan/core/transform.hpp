#pragma once

#include <array>
#include <cmath>

#include "bitan/core/error.hpp"
#include "bitan/core/hompoly.hpp"
#include "bitan/core/projvec.hpp"
#include "bitan/core/random.hpp"

namespace bitan {

/// Row-major 3x3 complex matrix acting on homogeneous point coordinates.
template <class Real>
using Mat3 = std::array<Vec3<Real>, 3>;

template <class Real>
Mat3<Real> identity3() {
    using C = Complex<Real>;
    Mat3<Real> m{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = C(Real(i == j ? 1 : 0));
    return m;
}

template <class Real>
Vec3<Real> apply(const Mat3<Real>& m, const Vec3<Real>& v) {
    Vec3<Real> out;
    for (int i = 0; i < 3; ++i) out[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2];
    return out;
}

template <class Real>
Mat3<Real> multiply(const Mat3<Real>& a, const Mat3<Real>& b) {
    Mat3<Real> out{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
    return out;
}

template <class Real>
Mat3<Real> transpose(const Mat3<Real>& m) {
    Mat3<Real> out{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out[i][j] = m[j][i];
    return out;
}

template <class Real>
Complex<Real> det3(const Mat3<Real>& m) {
    return dot<Real>(m[0], cross<Real>(m[1], m[2]));
}

template <class Real>
Mat3<Real> inverse(const Mat3<Real>& m) {
    const Complex<Real> d = det3<Real>(m);
    if (d == Complex<Real>(Real(0))) throw Error(ErrorKind::RankDeficient, "singular 3x3 matrix");
    // Columns of the inverse are cross products of rows.
    const Vec3<Real> c0 = cross<Real>(m[1], m[2]);
    const Vec3<Real> c1 = cross<Real>(m[2], m[0]);
    const Vec3<Real> c2 = cross<Real>(m[0], m[1]);
    Mat3<Real> out{};
    for (int i = 0; i < 3; ++i) {
        out[i][0] = c0[i] / d;
        out[i][1] = c1[i] / d;
        out[i][2] = c2[i] / d;
    }
    return out;
}

/// A projective map T together with its inverse; points map by T, lines by
/// T^{-T}, and a curve f maps to f o T^{-1}.
template <class Real>
struct ProjectiveMap {
    Mat3<Real> forward = identity3<Real>();
    Mat3<Real> backward = identity3<Real>();

    static ProjectiveMap from(const Mat3<Real>& m) { return {m, inverse<Real>(m)}; }

    ProjVec<Real> operator()(const ProjVec<Real>& v) const {
        if (v.role == Role::point) return {apply<Real>(forward, v.coords), Role::point};
        return {apply<Real>(transpose<Real>(backward), v.coords), Role::line};
    }

    HomPoly<Real> operator()(const HomPoly<Real>& f) const { return f.compose(backward); }
};

/// Random unitary matrix from Gram-Schmidt on a seeded complex matrix.
template <class Real>
Mat3<Real> random_unitary(Rng& rng) {
    using std::conj;
    using std::sqrt;
    Mat3<Real> m{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) m[i][j] = rng.complex<Real>();
        for (int k = 0; k < i; ++k) {
            Complex<Real> proj(Real(0));
            for (int j = 0; j < 3; ++j) proj += conj(m[k][j]) * m[i][j];
            for (int j = 0; j < 3; ++j) m[i][j] -= proj * m[k][j];
        }
        Real n(0);
        for (int j = 0; j < 3; ++j) n += norm2_of<Real>(m[i][j]);
        n = sqrt(n);
        for (int j = 0; j < 3; ++j) m[i][j] /= n;
    }
    return m;
}

/// Random projective map with entries in the unit box, rejected until its
/// condition number is moderate.
template <class Real>
ProjectiveMap<Real> random_projective_map(Rng& rng, double max_condition = 50.0) {
    for (;;) {
        Mat3<Real> m{};
        for (auto& row : m)
            for (auto& c : row) c = rng.complex<Real>();
        const Complex<Real> d = det3<Real>(m);
        Real fro(0);
        for (auto& row : m)
            for (auto& c : row) fro += norm2_of<Real>(c);
        const auto inv = inverse<Real>(m);
        Real fro_inv(0);
        for (auto& row : inv)
            for (auto& c : row) fro_inv += norm2_of<Real>(c);
        using std::sqrt;
        if (abs_of<Real>(d) > Real(0) && sqrt(fro * fro_inv) < Real(max_condition)) return {m, inv};
    }
}

}  // namespace bitan
