#pragma once

#include <span>
#include <vector>

#include "bitan/core/error.hpp"
#include "bitan/core/hompoly.hpp"
#include "bitan/core/linalg.hpp"
#include "bitan/core/projvec.hpp"
#include "bitan/core/scalar.hpp"

namespace bitan {

template <class Real>
struct FitResult {
    HomPoly<Real> curve;
    double residual = 0.0;         ///< least singular value of the row-normalized incidence matrix
    double second_singular = 0.0;  ///< next singular value; small means the fit is not unique
};

/// Row of monomial values of a point, scaled to unit norm.
template <class Real>
std::vector<Complex<Real>> incidence_row(int degree, const Vec3<Real>& p) {
    auto row = monomial_values<Real>(degree, p);
    Real n(0);
    for (const auto& c : row) n += norm2_of<Real>(c);
    using std::sqrt;
    n = sqrt(n);
    for (auto& c : row) c /= n;
    return row;
}

/// Curve of the given degree through (or closest to, in the least-squares
/// sense) the points. The curve is the least right singular vector of the
/// incidence matrix, normalized so its largest coefficient is 1.
template <class Real>
FitResult<Real> nullspace_fit(std::span<const ProjVec<Real>> points, int degree, double tol_geo = 1e-8) {
    const std::size_t cols = monomial_count(degree);
    if (points.size() + 1 < cols)
        throw Error(ErrorKind::RankDeficient, "too few points to determine a curve of degree " + std::to_string(degree));
    MatX<Real> a(static_cast<Eigen::Index>(points.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < points.size(); ++r) {
        const auto row = incidence_row<Real>(degree, points[r].coords);
        for (std::size_t c = 0; c < cols; ++c) a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
    }
    const auto ns = least_singular<Real>(a);
    FitResult<Real> out;
    out.residual = to_double(ns.sigma[cols - 1]);
    out.second_singular = to_double(ns.sigma[cols - 2]);
    if (out.second_singular < tol_geo)
        throw Error(ErrorKind::RankDeficient, "more than one curve of degree " + std::to_string(degree) + " fits the points");
    std::vector<Complex<Real>> coeffs(cols);
    for (std::size_t c = 0; c < cols; ++c) coeffs[c] = ns.vector(static_cast<Eigen::Index>(c));
    out.curve = HomPoly<Real>(degree, std::move(coeffs)).normalized();
    return out;
}

template <class Real>
FitResult<Real> nullspace_fit(const std::vector<ProjVec<Real>>& points, int degree, double tol_geo = 1e-8) {
    return nullspace_fit<Real>(std::span<const ProjVec<Real>>(points), degree, tol_geo);
}

}  // namespace bitan
