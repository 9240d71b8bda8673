#pragma once

#include <algorithm>
#include <vector>

#include "bitan/core/error.hpp"
#include "bitan/core/hompoly.hpp"
#include "bitan/core/projvec.hpp"
#include "bitan/core/random.hpp"
#include "bitan/core/roots.hpp"
#include "bitan/core/subresultant.hpp"
#include "bitan/core/transform.hpp"

namespace bitan {

namespace detail {

/// f(x, y, 1) as a polynomial in y whose coefficients are polynomials in x.
template <class Real>
std::vector<UniPoly<Real>> dehomogenize_in_y(const HomPoly<Real>& f) {
    const int d = f.degree();
    std::vector<UniPoly<Real>> out;
    for (int j = 0; j <= d; ++j) {
        std::vector<Complex<Real>> c(static_cast<std::size_t>(d - j + 1));
        for (int i = 0; i <= d - j; ++i) c[static_cast<std::size_t>(i)] = f.coeff(i, j, d - i - j);
        out.emplace_back(std::move(c));
    }
    return out;
}

template <class Real>
UniPoly<Real> specialize_x(const std::vector<UniPoly<Real>>& f, const Complex<Real>& x) {
    std::vector<Complex<Real>> c;
    for (const auto& cj : f) c.push_back(cj(x));
    return UniPoly<Real>(std::move(c));
}

/// Guarded Newton iteration on the affine system f = g = 0 at z = 1.
template <class Real>
void polish_intersection(const HomPoly<Real>& f, const HomPoly<Real>& g, Vec3<Real>& p) {
    using C = Complex<Real>;
    const std::array<HomPoly<Real>, 2> df{f.derivative(0), f.derivative(1)};
    const std::array<HomPoly<Real>, 2> dg{g.derivative(0), g.derivative(1)};
    auto resid = [&](const Vec3<Real>& q) { return f.relative_value(q) + g.relative_value(q); };
    Real current = resid(p);
    for (int it = 0; it < 8 && current > Real(0); ++it) {
        const C fv = f(p), gv = g(p);
        const C a = df[0](p), b = df[1](p), c = dg[0](p), d = dg[1](p);
        const C det = a * d - b * c;
        if (det == C(Real(0))) return;
        Vec3<Real> cand = p;
        cand[0] -= (d * fv - b * gv) / det;
        cand[1] -= (a * gv - c * fv) / det;
        const Real next = resid(cand);
        if (!(next < current)) return;
        p = cand;
        current = next;
    }
}

}  // namespace detail

/// All d1*d2 intersection points of two plane curves with no common
/// component, repeated by multiplicity. A seeded unitary change of
/// coordinates puts the curves in general position; y is eliminated by a
/// resultant, x solved by Aberth, y recovered as the root of f closest to
/// the zero set of g, and each point polished by Newton.
template <class Real>
std::vector<ProjVec<Real>> intersect_curves(const HomPoly<Real>& f_in, const HomPoly<Real>& g_in,
                                            std::uint64_t seed = 0x5eed1234ULL) {
    using C = Complex<Real>;
    const bool swap = f_in.degree() < g_in.degree();
    const HomPoly<Real> f0 = (swap ? g_in : f_in).unit();
    const HomPoly<Real> g0 = (swap ? f_in : g_in).unit();
    const int d1 = f0.degree(), d2 = g0.degree();
    if (d1 < 1 || d2 < 1) throw Error(ErrorKind::InvalidArgument, "intersection needs curves of positive degree");

    Rng rng(seed);
    const Mat3<Real> u = random_unitary<Real>(rng);
    const HomPoly<Real> f = f0.compose(u);
    const HomPoly<Real> g = g0.compose(u);

    const auto fy = detail::dehomogenize_in_y<Real>(f);
    const auto gy = detail::dehomogenize_in_y<Real>(g);
    auto sres = principal_subresultants<Real>(fy, gy);
    auto coeffs = sres[0].coeffs();
    coeffs.resize(static_cast<std::size_t>(d1 * d2 + 1));
    UniPoly<Real> res(coeffs);
    Real big(0);
    for (const auto& c : coeffs) big = std::max(big, abs_of<Real>(c));
    if (!(big > Real(1e-13))) throw Error(ErrorKind::CommonComponent, "curves share a component");
    if (abs_of<Real>(coeffs.back()) < big * Real(1e-13))
        throw Error(ErrorKind::NoConvergence, "intersection escaped to infinity in the chosen chart");

    RootOptions ropt;
    ropt.tol_sq = 1e-6;
    const auto xs = roots_all<Real>(res, ropt);
    std::vector<ProjVec<Real>> out;
    for (const auto& x : xs) {
        const UniPoly<Real> fx = detail::specialize_x<Real>(fy, x);
        const auto ys = roots_all<Real>(fx, ropt);
        Vec3<Real> best{};
        Real best_val(-1);
        for (const auto& y : ys) {
            const Vec3<Real> cand{x, y, C(Real(1))};
            const Real v = g.relative_value(cand);
            if (best_val < Real(0) || v < best_val) {
                best_val = v;
                best = cand;
            }
        }
        detail::polish_intersection<Real>(f, g, best);
        out.push_back(ProjVec<Real>(apply<Real>(u, best), Role::point));
    }
    return out;
}

}  // namespace bitan
