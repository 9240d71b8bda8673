#pragma once

#include <array>
#include <optional>
#include <vector>

#include <boost/math/constants/constants.hpp>

#include "bitan/core/error.hpp"
#include "bitan/core/hompoly.hpp"
#include "bitan/core/projvec.hpp"
#include "bitan/core/roots.hpp"
#include "bitan/core/subresultant.hpp"
#include "bitan/core/univariate.hpp"

namespace bitan {

/// b(s,t) = sum c[i] s^i t^(4-i).
template <class Real>
struct BinaryQuartic {
    std::array<Complex<Real>, 5> c{};

    Complex<Real> operator()(const Complex<Real>& s, const Complex<Real>& t) const {
        Complex<Real> acc(Real(0));
        Complex<Real> tp(Real(1));
        std::array<Complex<Real>, 5> tpow{};
        for (int i = 0; i < 5; ++i) {
            tpow[static_cast<std::size_t>(i)] = tp;
            tp *= t;
        }
        Complex<Real> sp(Real(1));
        for (int i = 0; i < 5; ++i) {
            acc += c[static_cast<std::size_t>(i)] * sp * tpow[static_cast<std::size_t>(4 - i)];
            sp *= s;
        }
        return acc;
    }

    Real norm() const {
        Real n(0);
        for (const auto& x : c) n += norm2_of<Real>(x);
        using std::sqrt;
        return sqrt(n);
    }

    bool is_zero() const {
        for (const auto& x : c)
            if (x != Complex<Real>(Real(0))) return false;
        return true;
    }
};

/// Two points spanning a line, orthonormal in the Hermitian inner product.
template <class Real>
struct LineBasis {
    Vec3<Real> p0{};
    Vec3<Real> p1{};

    Vec3<Real> point(const Complex<Real>& s, const Complex<Real>& t) const {
        return {s * p0[0] + t * p1[0], s * p0[1] + t * p1[1], s * p0[2] + t * p1[2]};
    }
};

/// Orthonormal basis of {p : line . p = 0}: Gram-Schmidt on the two unit
/// vectors e_i other than the one at the line's largest coordinate.
template <class Real>
LineBasis<Real> line_basis(const ProjVec<Real>& line) {
    using C = Complex<Real>;
    using std::conj;
    using std::sqrt;
    const Real n = line.norm();
    if (n == Real(0)) throw Error(ErrorKind::ZeroVector, "line covector is zero");
    Vec3<Real> u;
    for (int i = 0; i < 3; ++i) u[i] = conj(line.coords[i]) / n;
    std::size_t drop = 0;
    for (std::size_t i = 1; i < 3; ++i)
        if (abs_of<Real>(u[i]) > abs_of<Real>(u[drop])) drop = i;
    std::array<Vec3<Real>, 2> basis{};
    std::size_t out = 0;
    for (std::size_t e = 0; e < 3; ++e) {
        if (e == drop) continue;
        Vec3<Real> v{C(Real(0)), C(Real(0)), C(Real(0))};
        v[e] = C(Real(1));
        auto remove = [&](const Vec3<Real>& w) {
            C proj(Real(0));
            for (int i = 0; i < 3; ++i) proj += conj(w[i]) * v[i];
            for (int i = 0; i < 3; ++i) v[i] -= proj * w[i];
        };
        remove(u);
        if (out == 1) remove(basis[0]);
        Real vn(0);
        for (const auto& x : v) vn += norm2_of<Real>(x);
        vn = sqrt(vn);
        for (auto& x : v) x /= vn;
        basis[out++] = v;
    }
    return {basis[0], basis[1]};
}

/// Coefficients c[0..n-1] of the polynomial taking values[k] at the n-th
/// roots of unity.
template <class Real>
std::vector<Complex<Real>> interpolate_roots_of_unity(const std::vector<Complex<Real>>& values) {
    using C = Complex<Real>;
    const std::size_t n = values.size();
    const Real two_pi = boost::math::constants::two_pi<Real>();
    std::vector<C> out(n, C(Real(0)));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const Real ang = -two_pi * Real(static_cast<double>((i * k) % n)) / Real(static_cast<double>(n));
            using std::cos;
            using std::sin;
            out[i] += values[k] * C(cos(ang), sin(ang));
        }
        out[i] /= Real(static_cast<double>(n));
    }
    return out;
}

template <class Real>
std::vector<Complex<Real>> roots_of_unity(std::size_t n) {
    const Real two_pi = boost::math::constants::two_pi<Real>();
    std::vector<Complex<Real>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const Real ang = two_pi * Real(static_cast<double>(k)) / Real(static_cast<double>(n));
        using std::cos;
        using std::sin;
        out[k] = Complex<Real>(cos(ang), sin(ang));
    }
    return out;
}

template <class Real>
struct Restriction {
    BinaryQuartic<Real> b;
    LineBasis<Real> basis;
};

/// b(s,t) = q(s p0 + t p1) for a given parameterization.
template <class Real>
BinaryQuartic<Real> restrict_to(const HomPoly<Real>& q, const LineBasis<Real>& basis) {
    if (q.degree() != 4) throw Error(ErrorKind::InvalidArgument, "restriction needs a quartic");
    const auto w = roots_of_unity<Real>(5);
    std::vector<Complex<Real>> vals(5);
    for (std::size_t k = 0; k < 5; ++k) vals[k] = q(basis.point(w[k], Complex<Real>(Real(1))));
    const auto c = interpolate_roots_of_unity<Real>(vals);
    BinaryQuartic<Real> b;
    for (std::size_t i = 0; i < 5; ++i) b.c[i] = c[i];
    return b;
}

template <class Real>
Restriction<Real> restrict(const HomPoly<Real>& q, const ProjVec<Real>& line) {
    Restriction<Real> r;
    r.basis = line_basis<Real>(line);
    r.b = restrict_to<Real>(q, r.basis);
    return r;
}

template <class Real>
struct SquareCertificate {
    Complex<Real> scale;                   ///< b = scale * root^2
    std::array<Complex<Real>, 3> root{};   ///< root(s,t) = sum root[i] s^i t^(2-i)
    double residual = 0.0;                 ///< |b - scale root^2| / |b|
    double sres0 = 0.0;                    ///< relative principal subresultants of (b, b')
    double sres1 = 0.0;
    /// Zeros of root as (s,t) pairs, repeated for a double zero.
    std::array<std::array<Complex<Real>, 2>, 2> zeros{};
};

namespace detail {

/// p(s) -> p(a s - conj(b), b s + conj(a)) homogeneously, for a unitary
/// substitution (s,t) = U (s',t').
template <class Real, std::size_t N>
std::array<Complex<Real>, N> unitary_substitute(const std::array<Complex<Real>, N>& c, const Complex<Real>& a,
                                                const Complex<Real>& b) {
    using C = Complex<Real>;
    using std::conj;
    const int d = static_cast<int>(N) - 1;
    const UniPoly<Real> s_form({-conj(b), a});
    const UniPoly<Real> t_form({conj(a), b});
    UniPoly<Real> acc({C(Real(0))});
    for (int i = 0; i <= d; ++i) {
        UniPoly<Real> term({c[static_cast<std::size_t>(i)]});
        for (int k = 0; k < i; ++k) term = term * s_form;
        for (int k = 0; k < d - i; ++k) term = term * t_form;
        acc = acc + term;
    }
    std::array<C, N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = acc[i];
    return out;
}

template <class Real>
std::vector<std::array<Complex<Real>, 2>> unitary_candidates() {
    using C = Complex<Real>;
    using std::sqrt;
    const Real h = Real(1) / sqrt(Real(2));
    return {{C(Real(1)), C(Real(0))},      {C(Real(0)), C(Real(1))},      {C(h), C(h)},
            {C(h), C(-h)},                 {C(h), C(Real(0), h)},         {C(h), C(Real(0), -h)},
            {C(Real(0.6)), C(Real(0.8))},  {C(Real(0.8)), C(Real(0), Real(-0.6))}};
}

}  // namespace detail

/// Certificate that b is a constant times the square of a binary quadratic.
/// The polynomial is first moved by a unitary substitution so that its
/// leading coefficient is large; the square root is then read off the top
/// three coefficients and confirmed by re-expansion, together with the
/// vanishing of sres_0 and sres_1 of (b, b'). Returns nothing when any of
/// the three relative quantities exceeds tol_sq.
template <class Real>
std::optional<SquareCertificate<Real>> square_certificate(const BinaryQuartic<Real>& b, double tol_sq = 1e-8) {
    using C = Complex<Real>;
    using std::conj;
    using std::sqrt;
    const Real bn = b.norm();
    if (bn == Real(0)) throw Error(ErrorKind::InvalidArgument, "square certificate of the zero form");

    std::array<C, 2> best{};
    Real best_val(-1);
    for (const auto& cand : detail::unitary_candidates<Real>()) {
        const Real v = abs_of<Real>(b(cand[0], cand[1]));
        if (v > best_val) {
            best_val = v;
            best = cand;
        }
    }
    const C ua = best[0], ub = best[1];
    const auto cp = detail::unitary_substitute<Real, 5>(b.c, ua, ub);

    SquareCertificate<Real> cert;
    {
        const UniPoly<Real> p(std::vector<C>(cp.begin(), cp.end()));
        const UniPoly<Real> dp = p.derivative();
        const auto sres = principal_subresultants<Real>(p, dp);
        const Real pn = p.norm(), dn = dp.norm();
        using std::pow;
        cert.sres0 = to_double(abs_of<Real>(sres[0]) / (pow(pn, 3) * pow(dn, 4)));
        cert.sres1 = to_double(abs_of<Real>(sres[1]) / (pow(pn, 2) * pow(dn, 3)));
    }

    // Monic square root in the rotated coordinates.
    const C c4 = cp[4];
    const C a = cp[3] / (Real(2) * c4);
    const C beta = (cp[2] / c4 - a * a) / Real(2);
    const std::array<C, 3> rp{beta, a, C(Real(1))};

    // Back to the original (s,t): s' = conj(ua) s + conj(ub) t, t' = -ub s + ua t,
    // which is the substitution with (conj(ua), -ub).
    cert.root = detail::unitary_substitute<Real, 3>(rp, conj(ua), -ub);
    cert.scale = c4;

    Real res(0);
    {
        const UniPoly<Real> r(std::vector<C>(cert.root.begin(), cert.root.end()));
        const UniPoly<Real> sq = r * r;
        for (std::size_t i = 0; i < 5; ++i) res += norm2_of<Real>(b.c[i] - c4 * sq[i]);
    }
    cert.residual = to_double(sqrt(res) / bn);

    // Zeros: s'^2 + a s' + beta = 0 with t' = 1, mapped through U.
    const C disc = sqrt(a * a - Real(4) * beta);
    const std::array<C, 2> sr{(-a + disc) / Real(2), (-a - disc) / Real(2)};
    for (std::size_t k = 0; k < 2; ++k) {
        cert.zeros[k][0] = ua * sr[k] - conj(ub);
        cert.zeros[k][1] = ub * sr[k] + conj(ua);
    }

    if (!(cert.residual < tol_sq) || !(cert.sres0 < tol_sq) || !(cert.sres1 < tol_sq)) return std::nullopt;
    return cert;
}

}  // namespace bitan
