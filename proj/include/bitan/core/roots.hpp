#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <boost/math/constants/constants.hpp>

#include "bitan/core/error.hpp"
#include "bitan/core/scalar.hpp"
#include "bitan/core/univariate.hpp"

namespace bitan {

template <class Real>
struct RootCluster {
    Complex<Real> value;
    int multiplicity = 1;
};

struct RootOptions {
    int max_sweeps = 200;
    double tol_sq = 1e-8;   ///< residual bound every returned root must meet
    double tol_dup = 1e-6;  ///< clustering radius for multiplicity estimates
};

namespace detail {

template <class Real>
Real horner_bound(const UniPoly<Real>& p, Real r) {
    Real acc(0);
    const auto& c = p.coeffs();
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * r + abs_of<Real>(c[i]);
    return acc;
}

}  // namespace detail

/// Every root of `p` repeated by multiplicity, from Aberth-Ehrlich
/// simultaneous iteration followed by guarded Newton polishing.
template <class Real>
std::vector<Complex<Real>> roots_all(const UniPoly<Real>& input, const RootOptions& opt = {}) {
    using C = Complex<Real>;
    using std::abs;
    using std::pow;
    const UniPoly<Real> p = input.trimmed();
    const int n = p.degree();
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "root finding needs degree >= 1");

    // Exact zero roots are split off so the circle start has a sensible radius.
    std::size_t zeros = 0;
    while (p.coeffs()[zeros] == C(Real(0))) ++zeros;
    std::vector<C> out(zeros, C(Real(0)));
    if (static_cast<int>(zeros) == n) return out;
    const UniPoly<Real> q(std::vector<C>(p.coeffs().begin() + static_cast<std::ptrdiff_t>(zeros), p.coeffs().end()));
    const int m = q.degree();

    const Real lead = abs_of<Real>(q.leading());
    Real radius = pow(abs_of<Real>(q.coeffs()[0]) / lead, Real(1) / Real(m));
    if (!(radius > Real(0))) radius = Real(1);

    std::vector<C> z(static_cast<std::size_t>(m));
    const Real two_pi = Real(2) * boost::math::constants::pi<Real>();
    for (int k = 0; k < m; ++k) {
        using std::cos;
        using std::sin;
        const Real ang = two_pi * Real(k) / Real(m) + Real(0.4);
        z[static_cast<std::size_t>(k)] = C(radius * cos(ang), radius * sin(ang));
    }

    const Real eps = epsilon<Real>();
    std::vector<bool> done(static_cast<std::size_t>(m), false);
    int sweep = 0;
    for (; sweep < opt.max_sweeps; ++sweep) {
        bool all = true;
        for (std::size_t k = 0; k < z.size(); ++k) {
            if (done[k]) continue;
            const auto [val, der] = q.eval_with_derivative(z[k]);
            const Real bound = detail::horner_bound<Real>(q, abs_of<Real>(z[k])) * eps * Real(8 * m);
            if (abs_of<Real>(val) <= bound) {
                done[k] = true;
                continue;
            }
            all = false;
            if (der == C(Real(0))) {
                z[k] += C(eps * (Real(1) + abs_of<Real>(z[k])), Real(0));
                continue;
            }
            const C ratio = val / der;
            C sum(Real(0));
            for (std::size_t j = 0; j < z.size(); ++j) {
                if (j == k) continue;
                const C diff = z[k] - z[j];
                if (diff != C(Real(0))) sum += C(Real(1)) / diff;
            }
            z[k] -= ratio / (C(Real(1)) - ratio * sum);
        }
        if (all) break;
    }

    // Newton polishing, accepted only when the residual drops.
    for (auto& r : z) {
        for (int it = 0; it < 3; ++it) {
            const auto [val, der] = q.eval_with_derivative(r);
            if (der == C(Real(0)) || val == C(Real(0))) break;
            const C cand = r - val / der;
            if (abs_of<Real>(q(cand)) < abs_of<Real>(val)) r = cand;
            else break;
        }
    }

    const Real pnorm = q.norm();
    for (const auto& r : z) {
        const Real scale = pow(std::max(Real(1), abs_of<Real>(r)), Real(m));
        if (!(abs_of<Real>(q(r)) <= Real(opt.tol_sq) * pnorm * scale))
            throw Error(ErrorKind::NoConvergence, "Aberth iteration did not converge within " +
                                                      std::to_string(opt.max_sweeps) + " sweeps");
    }
    out.insert(out.end(), z.begin(), z.end());
    return out;
}

/// Groups roots lying within `tol_dup * max(1, |r|)` of each other; a
/// cluster's size is its multiplicity estimate and its value the mean.
template <class Real>
std::vector<RootCluster<Real>> cluster_roots(const std::vector<Complex<Real>>& z, double tol_dup) {
    std::vector<std::size_t> parent(z.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (std::size_t a = 0; a < z.size(); ++a)
        for (std::size_t b = a + 1; b < z.size(); ++b) {
            const Real scale = std::max(Real(1), std::max(abs_of<Real>(z[a]), abs_of<Real>(z[b])));
            if (abs_of<Real>(z[a] - z[b]) <= Real(tol_dup) * scale) parent[find(a)] = find(b);
        }
    std::vector<RootCluster<Real>> out;
    std::vector<std::size_t> slot(z.size(), z.size());
    for (std::size_t a = 0; a < z.size(); ++a) {
        const std::size_t r = find(a);
        if (slot[r] == z.size()) {
            slot[r] = out.size();
            out.push_back({Complex<Real>(Real(0)), 0});
        }
        auto& c = out[slot[r]];
        c.value += z[a];
        c.multiplicity += 1;
    }
    for (auto& c : out) c.value /= Real(c.multiplicity);
    return out;
}

template <class Real>
std::vector<RootCluster<Real>> roots(const UniPoly<Real>& p, const RootOptions& opt = {}) {
    return cluster_roots<Real>(roots_all<Real>(p, opt), opt.tol_dup);
}

}  // namespace bitan
