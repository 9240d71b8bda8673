#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

#include "bitan/core/error.hpp"
#include "bitan/core/hompoly.hpp"
#include "bitan/core/intersect.hpp"
#include "bitan/core/projvec.hpp"
#include "bitan/core/random.hpp"

namespace bitan {

/// |grad f(p)| / (|f| |p|^(d-1)).
template <class Real>
double gradient_measure(const HomPoly<Real>& f, const std::array<HomPoly<Real>, 3>& d, const Vec3<Real>& p) {
    Real pn(0), gn(0);
    for (const auto& c : p) pn += norm2_of<Real>(c);
    for (const auto& di : d) gn += norm2_of<Real>(di(p));
    using std::pow;
    using std::sqrt;
    return to_double(sqrt(gn) / (f.norm() * pow(sqrt(pn), f.degree() - 1)));
}

namespace detail {

/// Gauss-Newton on grad f = 0 in the affine chart of the largest
/// coordinate; steps are kept only while the gradient measure drops.
template <class Real>
void polish_singular(const HomPoly<Real>& f, const std::array<HomPoly<Real>, 3>& d, Vec3<Real>& p) {
    using C = Complex<Real>;
    std::array<std::array<HomPoly<Real>, 3>, 3> h;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) h[i][j] = d[static_cast<std::size_t>(i)].derivative(j);
    double current = gradient_measure<Real>(f, d, p);
    for (int it = 0; it < 30 && current > 0.0; ++it) {
        std::size_t pivot = 0;
        for (std::size_t i = 1; i < 3; ++i)
            if (abs_of<Real>(p[i]) > abs_of<Real>(p[pivot])) pivot = i;
        Eigen::Matrix<C, 3, 2> jac;
        Eigen::Matrix<C, 3, 1> g;
        for (int i = 0; i < 3; ++i) {
            g(i) = d[static_cast<std::size_t>(i)](p);
            int col = 0;
            for (int j = 0; j < 3; ++j) {
                if (static_cast<std::size_t>(j) == pivot) continue;
                jac(i, col++) = h[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)](p);
            }
        }
        const Eigen::Matrix<C, 2, 1> step = jac.colPivHouseholderQr().solve(g);
        Vec3<Real> cand = p;
        int col = 0;
        for (std::size_t j = 0; j < 3; ++j) {
            if (j == pivot) continue;
            cand[j] -= step(col++);
        }
        const double next = gradient_measure<Real>(f, d, cand);
        if (!(next < current)) break;
        p = cand;
        current = next;
    }
}

}  // namespace detail

template <class Real>
struct SingularScan {
    double measure = 0.0;                       ///< smallest gradient measure found
    bool common_component = false;              ///< the partials share a curve: singular along it
    std::vector<ProjVec<Real>> candidates;      ///< polished common zeros of two partial combinations
    std::vector<double> measures;               ///< gradient measure at each candidate
};

/// Common zeros of two seeded combinations of the partial derivatives,
/// polished toward zeros of the full gradient. A curve is singular iff one
/// of them is a zero of the gradient (Euler's relation puts it on the curve).
inline std::uint64_t mix_scan_seed(std::uint64_t seed) { return seed * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL; }

template <class Real>
SingularScan<Real> singular_scan(const HomPoly<Real>& f_in, std::uint64_t seed = 0x736d6f6fULL, int attempt = 0) {
    constexpr int attempts = 3;
    SingularScan<Real> out;
    const HomPoly<Real> f = f_in.unit();
    const std::array<HomPoly<Real>, 3> d{f.derivative(0), f.derivative(1), f.derivative(2)};
    Rng rng(seed);
    auto combo = [&] {
        HomPoly<Real> g(f.degree() - 1);
        for (const auto& di : d) {
            HomPoly<Real> t = di;
            t *= rng.complex<Real>();
            g += t;
        }
        return g;
    };
    const HomPoly<Real> g1 = combo();
    const HomPoly<Real> g2 = combo();
    if (g1.norm() < Real(1e-12) || g2.norm() < Real(1e-12)) {
        out.common_component = true;
        return out;
    }
    std::vector<ProjVec<Real>> pts;
    try {
        pts = intersect_curves<Real>(g1, g2, seed ^ 0x9e3779b97f4a7c15ULL);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::CommonComponent) throw;
        // A badly scaled chart can make the resultant look identically zero;
        // a shared component has to show up for fresh combinations as well.
        if (attempt + 1 < attempts) return singular_scan<Real>(f_in, mix_scan_seed(seed), attempt + 1);
        out.common_component = true;
        return out;
    }
    out.measure = 1e300;
    for (auto& p : pts) {
        if (gradient_measure<Real>(f, d, p.coords) < 1e-3) detail::polish_singular<Real>(f, d, p.coords);
        const double m = gradient_measure<Real>(f, d, p.coords);
        out.candidates.push_back(normalize<Real>(p, 0.0));
        out.measures.push_back(m);
        out.measure = std::min(out.measure, m);
    }
    return out;
}

template <class Real>
double singularity_measure(const HomPoly<Real>& q) {
    const auto scan = singular_scan<Real>(q);
    return scan.common_component ? 0.0 : scan.measure;
}

/// Singular points: candidates whose gradient measure is below tol,
/// deduplicated.
template <class Real>
std::vector<ProjVec<Real>> singular_points(const HomPoly<Real>& f, double tol = 1e-6, double tol_dup = 1e-6) {
    const auto scan = singular_scan<Real>(f);
    std::vector<ProjVec<Real>> out;
    for (std::size_t i = 0; i < scan.candidates.size(); ++i) {
        if (!(scan.measures[i] < tol)) continue;
        const auto& p = scan.candidates[i];
        const bool dup = std::any_of(out.begin(), out.end(),
                                     [&](const ProjVec<Real>& o) { return proj_distance<Real>(o, p) < Real(tol_dup); });
        if (!dup) out.push_back(p);
    }
    return out;
}

}  // namespace bitan
