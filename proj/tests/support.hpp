#pragma once

#include <complex>
#include <vector>

#include "bitan/core/hompoly.hpp"
#include "bitan/core/random.hpp"
#include "bitan/solver/bitangents.hpp"

namespace bitan::fixtures {

inline HomPoly<double> fermat() {
    HomPoly<double> q(4);
    q.coeff(4, 0, 0) = q.coeff(0, 4, 0) = q.coeff(0, 0, 4) = 1.0;
    return q;
}

inline HomPoly<double> klein() {
    HomPoly<double> q(4);
    q.coeff(3, 1, 0) = q.coeff(0, 3, 1) = q.coeff(1, 0, 3) = 1.0;
    return q;
}

/// Smooth quartic with coefficients drawn from the complex unit box.
inline HomPoly<double> random_quartic(std::uint64_t seed) {
    Rng rng(seed * 0x9e3779b97f4a7c15ULL + 17);
    HomPoly<double> q(4);
    do {
        for (auto& c : q.coeffs()) c = rng.complex<double>();
    } while (!is_smooth<double>(q));
    return q;
}

inline ProjVec<double> random_vec(Rng& rng, Role role = Role::point) {
    return {rng.complex<double>(), rng.complex<double>(), rng.complex<double>(), role};
}

/// Index of the vector in `set` closest to `v`, with its distance.
template <class Real>
std::pair<std::size_t, double> nearest(const std::vector<ProjVec<Real>>& set, const ProjVec<Real>& v) {
    std::size_t best = 0;
    double d = 2.0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        const double x = to_double(proj_distance<Real>(set[i], v));
        if (x < d) {
            d = x;
            best = i;
        }
    }
    return {best, d};
}

}  // namespace bitan::fixtures
