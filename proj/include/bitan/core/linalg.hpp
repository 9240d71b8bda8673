#pragma once

#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include "bitan/core/scalar.hpp"

namespace bitan {

template <class Real>
using MatX = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <class Real>
using VecX = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>;

template <class Real>
struct NullspaceResult {
    VecX<Real> vector;          ///< right singular vector of the least singular value
    std::vector<Real> sigma;    ///< singular values padded with zeros to the column count, descending
};

/// Least right singular vector of `a`, with singular values padded so that
/// a wide matrix reports its missing values as exact zeros.
template <class Real>
NullspaceResult<Real> least_singular(const MatX<Real>& a) {
    Eigen::JacobiSVD<MatX<Real>> svd(a, Eigen::ComputeFullV);
    const auto cols = a.cols();
    NullspaceResult<Real> out;
    out.vector = svd.matrixV().col(cols - 1);
    out.sigma.assign(static_cast<std::size_t>(cols), Real(0));
    const auto& s = svd.singularValues();
    for (Eigen::Index i = 0; i < s.size(); ++i) out.sigma[static_cast<std::size_t>(i)] = s(i);
    return out;
}

template <class Real>
VecX<Real> solve_square(const MatX<Real>& a, const VecX<Real>& b) {
    return a.partialPivLu().solve(b);
}

template <class Real>
VecX<Real> solve_least_squares(const MatX<Real>& a, const VecX<Real>& b) {
    return a.colPivHouseholderQr().solve(b);
}

}  // namespace bitan
