#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <type_traits>
#include <utility>
#include <vector>

#include "bitan/core/error.hpp"
#include "bitan/core/fit.hpp"
#include "bitan/core/hompoly.hpp"
#include "bitan/core/intersect.hpp"
#include "bitan/core/projvec.hpp"
#include "bitan/core/scalar.hpp"
#include "bitan/core/singular.hpp"
#include "bitan/solver/square.hpp"

namespace bitan {

enum class CubicClass { smooth, nodal, reducible };

inline const char* to_string(CubicClass c) {
    switch (c) {
        case CubicClass::smooth: return "smooth";
        case CubicClass::nodal: return "nodal";
        case CubicClass::reducible: return "reducible";
    }
    return "?";
}

template <class Real>
struct CubicCurve {
    HomPoly<Real> poly;  ///< unit coefficient norm
    CubicClass classification = CubicClass::smooth;
    std::optional<ProjVec<Real>> flex_origin;
    double tol_geo = 1e-8;
    double tol_dup = 1e-6;
};

/// Lexicographic order that treats coordinates closer than tol as equal,
/// so rounding noise in zero or unit entries cannot decide the order.
template <class Real>
bool lex_less_tol(const ProjVec<Real>& a, const ProjVec<Real>& b, double tol = 1e-9) {
    using std::imag;
    using std::real;
    const Real t(tol);
    for (int i = 0; i < 3; ++i) {
        const Real dr = real(a.coords[i]) - real(b.coords[i]);
        if (dr < -t) return true;
        if (dr > t) return false;
        const Real di = imag(a.coords[i]) - imag(b.coords[i]);
        if (di < -t) return true;
        if (di > t) return false;
    }
    return false;
}

namespace detail {

template <class Real>
Vec3<Real> unit_vec(const Vec3<Real>& v) {
    Real n(0);
    for (const auto& x : v) n += norm2_of<Real>(x);
    using std::sqrt;
    n = sqrt(n);
    if (n == Real(0)) throw Error(ErrorKind::ZeroVector, "zero vector");
    return {v[0] / n, v[1] / n, v[2] / n};
}

template <class Real>
std::array<std::array<Complex<Real>, 3>, 3> hessian_matrix(const HomPoly<Real>& f, const Vec3<Real>& p) {
    std::array<std::array<Complex<Real>, 3>, 3> h{};
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            h[i][j] = f.derivative(i).derivative(j)(p);
            h[j][i] = h[i][j];
        }
    return h;
}

template <class Real>
Complex<Real> bilinear(const std::array<std::array<Complex<Real>, 3>, 3>& h, const Vec3<Real>& a, const Vec3<Real>& b) {
    Complex<Real> acc(Real(0));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) acc += a[i] * h[i][j] * b[j];
    return acc;
}

/// Whether a line through the singular point p is a component: the tangent
/// cone directions d are tested for c(d) = 0.
template <class Real>
bool has_line_through(const HomPoly<Real>& c, const ProjVec<Real>& p_in, double tol) {
    using C = Complex<Real>;
    using std::conj;
    using std::sqrt;
    const Vec3<Real> p = unit_vec<Real>(p_in.coords);
    const auto h = hessian_matrix<Real>(c, p);
    Real hn(0);
    for (const auto& row : h)
        for (const auto& x : row) hn += norm2_of<Real>(x);
    // A triple point: the cubic is a cone over three points, i.e. three concurrent lines.
    if (sqrt(hn) < Real(tol) * c.norm()) return true;
    const LineBasis<Real> lb = line_basis<Real>(ProjVec<Real>({conj(p[0]), conj(p[1]), conj(p[2])}, Role::line));
    const C a = bilinear<Real>(h, lb.p0, lb.p0);
    const C b = Real(2) * bilinear<Real>(h, lb.p0, lb.p1);
    const C d = bilinear<Real>(h, lb.p1, lb.p1);
    std::vector<Vec3<Real>> dirs;
    auto quad_roots = [](const C& qa, const C& qb, const C& qc) {
        const C disc = sqrt(qb * qb - Real(4) * qa * qc);
        const C r1 = (-qb + disc) / (Real(2) * qa);
        const C r2 = (-qb - disc) / (Real(2) * qa);
        return std::array<C, 2>{r1, r2};
    };
    const Real lead = std::max(abs_of<Real>(a), abs_of<Real>(d));
    if (lead <= epsilon<Real>() * abs_of<Real>(b)) {
        // b m n: the cone is the two basis directions.
        dirs = {lb.p0, lb.p1};
    } else if (abs_of<Real>(a) >= abs_of<Real>(d)) {
        // a m^2 + b m + d = 0 for d = m p0 + p1
        for (const C& m : quad_roots(a, b, d)) dirs.push_back(lb.point(m, C(Real(1))));
    } else {
        for (const C& m : quad_roots(d, b, a)) dirs.push_back(lb.point(C(Real(1)), m));
    }
    for (const auto& dir : dirs)
        if (c.relative_value(unit_vec<Real>(dir)) < Real(tol)) return true;
    return false;
}

}  // namespace detail

/// Smooth iff no zero of the gradient; reducible iff a line through a
/// singular point lies on the curve; nodal otherwise (any irreducible
/// singular cubic, cusps included).
template <class Real>
CubicClass classify(const HomPoly<Real>& c_in, double tol_geo = 1e-8) {
    if (c_in.degree() != 3) throw Error(ErrorKind::InvalidArgument, "classify needs a cubic");
    if (c_in.is_zero()) throw Error(ErrorKind::ZeroVector, "zero cubic");
    const HomPoly<Real> c = c_in.unit();
    const auto scan = singular_scan<Real>(c);
    if (scan.common_component) return CubicClass::reducible;
    if (scan.measure > tol_geo) return CubicClass::smooth;
    using std::sqrt;
    const double line_tol = sqrt(tol_geo);
    for (std::size_t i = 0; i < scan.candidates.size(); ++i) {
        if (!(scan.measures[i] < tol_geo)) continue;
        if (detail::has_line_through<Real>(c, scan.candidates[i], line_tol)) return CubicClass::reducible;
    }
    return CubicClass::nodal;
}

/// The nine flexes, the intersection with the Hessian, in tolerant
/// lexicographic order of normalized coordinates.
template <class Real>
std::vector<ProjVec<Real>> flexes(const HomPoly<Real>& c) {
    if (c.degree() != 3) throw Error(ErrorKind::InvalidArgument, "flexes need a cubic");
    auto pts = intersect_curves<Real>(c.unit(), hessian<Real>(c.unit()).unit());
    for (auto& p : pts) p = normalize<Real>(p, 0.0);
    std::sort(pts.begin(), pts.end(), [](const ProjVec<Real>& a, const ProjVec<Real>& b) { return lex_less_tol<Real>(a, b); });
    return pts;
}

template <class Real>
CubicCurve<Real> make_cubic(const HomPoly<Real>& c, double tol_geo = 1e-8, double tol_dup = 1e-6) {
    CubicCurve<Real> out;
    out.poly = c.unit();
    out.tol_geo = tol_geo;
    out.tol_dup = tol_dup;
    out.classification = classify<Real>(out.poly, tol_geo);
    if (out.classification != CubicClass::smooth) return out;
    try {
        out.flex_origin = flexes<Real>(out.poly).back();
    } catch (const Error& e) {
        // The Hessian shares a component only with a line component.
        if (e.kind() != ErrorKind::CommonComponent) throw;
        out.classification = CubicClass::reducible;
    }
    return out;
}

namespace detail {

/// Third intersection of the line PQ with c; the tangent line at P when the
/// points coincide within tol_dup.
template <class Real>
ProjVec<Real> third_point_raw(const HomPoly<Real>& c, const ProjVec<Real>& p_in, const ProjVec<Real>& q_in, double tol_dup) {
    using C = Complex<Real>;
    using std::conj;
    const Vec3<Real> p = unit_vec<Real>(p_in.coords);
    const Vec3<Real> q = unit_vec<Real>(q_in.coords);
    const Real tiny(1e-12);
    Vec3<Real> r;
    if (proj_distance<Real>(p, q) < Real(tol_dup)) {
        const Vec3<Real> g = c.gradient(p);
        const Vec3<Real> d = unit_vec<Real>(cross<Real>(g, Vec3<Real>{conj(p[0]), conj(p[1]), conj(p[2])}));
        const C a1 = dot<Real>(c.gradient(d), p);
        const C a0 = c(d);
        if (abs_of<Real>(a1) < tiny && abs_of<Real>(a0) < tiny)
            throw Error(ErrorKind::TangentFailure, "tangent line lies on the cubic");
        for (int i = 0; i < 3; ++i) r[i] = a0 * p[i] - a1 * d[i];
    } else {
        const C a2 = dot<Real>(c.gradient(p), q);
        const C a1 = dot<Real>(c.gradient(q), p);
        if (abs_of<Real>(a1) < tiny && abs_of<Real>(a2) < tiny)
            throw Error(ErrorKind::TangentFailure, "chord lies on the cubic");
        for (int i = 0; i < 3; ++i) r[i] = a1 * p[i] - a2 * q[i];
    }
    return normalize<Real>(ProjVec<Real>(r, Role::point), 0.0);
}

}  // namespace detail

/// Third intersection point, retried in quad precision when the binary64
/// extraction degenerates.
template <class Real>
ProjVec<Real> third_point(const CubicCurve<Real>& c, const ProjVec<Real>& p, const ProjVec<Real>& q) {
    try {
        return detail::third_point_raw<Real>(c.poly, p, q, c.tol_dup);
    } catch (const Error& e) {
        if constexpr (std::is_same_v<Real, double>) {
            if (e.kind() != ErrorKind::TangentFailure) throw;
            const auto r = detail::third_point_raw<Quad>(c.poly.template cast<Quad>(), p.template cast<Quad>(),
                                                         q.template cast<Quad>(), c.tol_dup);
            return r.template cast<double>();
        } else {
            throw;
        }
    }
}

template <class Real>
const ProjVec<Real>& origin_of(const CubicCurve<Real>& c) {
    if (!c.flex_origin) throw Error(ErrorKind::InvalidArgument, "group law needs a smooth cubic with a flex origin");
    return *c.flex_origin;
}

template <class Real>
ProjVec<Real> neg(const CubicCurve<Real>& c, const ProjVec<Real>& p) {
    return third_point<Real>(c, origin_of<Real>(c), p);
}

template <class Real>
ProjVec<Real> add(const CubicCurve<Real>& c, const ProjVec<Real>& p, const ProjVec<Real>& q) {
    return third_point<Real>(c, origin_of<Real>(c), third_point<Real>(c, p, q));
}

template <class Real>
ProjVec<Real> sub(const CubicCurve<Real>& c, const ProjVec<Real>& p, const ProjVec<Real>& q) {
    return add<Real>(c, p, neg<Real>(c, q));
}

/// The three points T != O of order two: the polar conic of O meets the
/// cubic in O three times and in the three points whose tangent passes
/// through O.
template <class Real>
std::vector<ProjVec<Real>> two_torsion(const CubicCurve<Real>& c) {
    const ProjVec<Real>& o = origin_of<Real>(c);
    HomPoly<Real> polar(2);
    for (int i = 0; i < 3; ++i) {
        HomPoly<Real> t = c.poly.derivative(i);
        t *= o.coords[static_cast<std::size_t>(i)];
        polar += t;
    }
    auto pts = intersect_curves<Real>(c.poly, polar);
    std::sort(pts.begin(), pts.end(), [&](const ProjVec<Real>& a, const ProjVec<Real>& b) {
        return proj_distance<Real>(a, o) > proj_distance<Real>(b, o);
    });
    pts.resize(3);
    for (auto& p : pts) p = normalize<Real>(p, 0.0);
    std::sort(pts.begin(), pts.end(), [](const ProjVec<Real>& a, const ProjVec<Real>& b) { return lex_less_tol<Real>(a, b); });
    return pts;
}

/// Line through P and P + beta, as a point of the dual plane.
template <class Real>
ProjVec<Real> chord_map(const CubicCurve<Real>& c, const ProjVec<Real>& beta, const ProjVec<Real>& p) {
    const ProjVec<Real> q = add<Real>(c, p, beta);
    if (proj_distance<Real>(p, q) < Real(c.tol_dup))
        throw Error(ErrorKind::DegenerateChord, "P and P + beta coincide");
    return normalize<Real>(join<Real>(p.as(Role::point), q.as(Role::point)), 0.0);
}

template <class Real>
using PointPair = std::pair<ProjVec<Real>, ProjVec<Real>>;

template <class Real>
struct BetaResult {
    ProjVec<Real> beta;           ///< the common class, snapped to the exact 2-torsion point
    double spread = 0.0;          ///< largest distance of a difference class from beta
    double order2_residual = 0.0; ///< distance of beta + beta from O
};

/// The class of p - q shared by all six pairs, which must have order two.
template <class Real>
BetaResult<Real> beta_of_pairs(const CubicCurve<Real>& c, const std::vector<PointPair<Real>>& pairs) {
    if (pairs.size() != 6) throw Error(ErrorKind::InvalidArgument, "beta needs six pairs");
    std::vector<ProjVec<Real>> all;
    for (const auto& pr : pairs) {
        all.push_back(pr.first.as(Role::point));
        all.push_back(pr.second.as(Role::point));
    }
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (c.poly.relative_value(all[i].coords) > Real(c.tol_geo))
            throw Error(ErrorKind::InvalidArgument, "pair point is not on the cubic");
        for (std::size_t j = i + 1; j < all.size(); ++j)
            if (proj_distance<Real>(all[i], all[j]) < Real(c.tol_dup))
                throw Error(ErrorKind::InvalidArgument, "pair points are not distinct");
    }
    std::vector<ProjVec<Real>> diffs;
    for (const auto& pr : pairs) diffs.push_back(sub<Real>(c, pr.first.as(Role::point), pr.second.as(Role::point)));

    const auto torsion = two_torsion<Real>(c);
    BetaResult<Real> out;
    Real best(2);
    for (const auto& t : torsion) {
        const Real d = proj_distance<Real>(t, diffs[0]);
        if (d < best) {
            best = d;
            out.beta = t;
        }
    }
    for (const auto& d : diffs) out.spread = std::max(out.spread, to_double(proj_distance<Real>(d, out.beta)));
    out.order2_residual = to_double(proj_distance<Real>(add<Real>(c, diffs[0], diffs[0]), origin_of<Real>(c)));
    if (!(out.spread < c.tol_dup))
        throw Error(ErrorKind::InconsistentPairing, "difference classes of the pairs disagree");
    if (!(out.order2_residual < 10.0 * c.tol_geo))
        throw Error(ErrorKind::InconsistentPairing, "difference class does not have order two");
    return out;
}

template <class Real>
struct ConicFit {
    HomPoly<Real> conic;
    double residual = 0.0;
    double gram_det = 0.0;  ///< |det| of the symmetric matrix of the unit-norm conic
    std::vector<ProjVec<Real>> images;
};

/// |det| of the symmetric matrix of a conic scaled to unit coefficient norm.
template <class Real>
double conic_gram_det(const HomPoly<Real>& q_in) {
    const HomPoly<Real> q = q_in.unit();
    using C = Complex<Real>;
    const C a = q.coeff(2, 0, 0), b = q.coeff(1, 1, 0) / Real(2), cc = q.coeff(1, 0, 1) / Real(2);
    const C d = q.coeff(0, 2, 0), e = q.coeff(0, 1, 1) / Real(2), f = q.coeff(0, 0, 2);
    const C det = a * (d * f - e * e) - b * (b * f - e * cc) + cc * (b * e - d * cc);
    return to_double(abs_of<Real>(det));
}

/// Conic through the chord images of the pairs' first members.
template <class Real>
ConicFit<Real> conic_of_images(const CubicCurve<Real>& c, const ProjVec<Real>& beta, const std::vector<PointPair<Real>>& pairs) {
    ConicFit<Real> out;
    for (const auto& pr : pairs) out.images.push_back(chord_map<Real>(c, beta, pr.first.as(Role::point)));
    const auto fit = nullspace_fit<Real>(out.images, 2, c.tol_geo);
    out.conic = fit.curve;
    out.residual = fit.residual;
    out.gram_det = conic_gram_det<Real>(fit.curve);
    return out;
}

}  // namespace bitan
