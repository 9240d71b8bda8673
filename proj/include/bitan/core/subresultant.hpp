#pragma once

#include <algorithm>
#include <vector>

#include <boost/math/constants/constants.hpp>

#include "bitan/core/error.hpp"
#include "bitan/core/scalar.hpp"
#include "bitan/core/univariate.hpp"

namespace bitan {

/// Determinant by LU with partial pivoting; `a` is row-major n x n.
template <class Real>
Complex<Real> determinant(std::vector<Complex<Real>> a, std::size_t n) {
    using C = Complex<Real>;
    C det(Real(1));
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        Real best = abs_of<Real>(a[col * n + col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const Real v = abs_of<Real>(a[r * n + col]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best == Real(0)) return C(Real(0));
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a[piv * n + c], a[col * n + c]);
            det = -det;
        }
        const C d = a[col * n + col];
        det *= d;
        for (std::size_t r = col + 1; r < n; ++r) {
            const C f = a[r * n + col] / d;
            if (f == C(Real(0))) continue;
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
        }
    }
    return det;
}

namespace detail {

/// Rows x^{n-k-1} p, ..., p, x^{m-k-1} q, ..., q of the k-th Sylvester
/// submatrix; entry (row, col) is the coefficient of x^{m+n-k-1-col}.
/// Formal degrees are the coefficient-vector lengths minus one.
template <class Real>
std::vector<Complex<Real>> sylvester_rows(const UniPoly<Real>& p, const UniPoly<Real>& q, int k,
                                          std::vector<int>& col_degree) {
    const int m = static_cast<int>(p.coeffs().size()) - 1;
    const int n = static_cast<int>(q.coeffs().size()) - 1;
    const int size = m + n - 2 * k;
    const int top = m + n - k - 1;
    std::vector<Complex<Real>> rows(static_cast<std::size_t>(size) * static_cast<std::size_t>(top + 1),
                                    Complex<Real>(Real(0)));
    const std::size_t width = static_cast<std::size_t>(top + 1);
    int r = 0;
    for (int shift = n - k - 1; shift >= 0; --shift, ++r)
        for (int i = 0; i <= m; ++i)
            rows[static_cast<std::size_t>(r) * width + static_cast<std::size_t>(top - (i + shift))] = p[static_cast<std::size_t>(i)];
    for (int shift = m - k - 1; shift >= 0; --shift, ++r)
        for (int i = 0; i <= n; ++i)
            rows[static_cast<std::size_t>(r) * width + static_cast<std::size_t>(top - (i + shift))] = q[static_cast<std::size_t>(i)];
    col_degree.resize(width);
    for (std::size_t c = 0; c < width; ++c) col_degree[c] = top - static_cast<int>(c);
    return rows;
}

template <class Real>
Complex<Real> sres_with_column(const UniPoly<Real>& p, const UniPoly<Real>& q, int k, int last_degree) {
    const int m = static_cast<int>(p.coeffs().size()) - 1;
    const int n = static_cast<int>(q.coeffs().size()) - 1;
    const int size = m + n - 2 * k;
    if (size == 0) return Complex<Real>(Real(1));
    std::vector<int> col_degree;
    const auto rows = sylvester_rows<Real>(p, q, k, col_degree);
    const std::size_t width = col_degree.size();
    const std::size_t s = static_cast<std::size_t>(size);
    std::vector<Complex<Real>> mat(s * s);
    for (std::size_t r = 0; r < s; ++r) {
        for (std::size_t c = 0; c + 1 < s; ++c) mat[r * s + c] = rows[r * width + c];
        const std::size_t lc = static_cast<std::size_t>(m + n - k - 1 - last_degree);
        mat[r * s + s - 1] = rows[r * width + lc];
    }
    return determinant<Real>(std::move(mat), s);
}

}  // namespace detail

/// Principal subresultant coefficients sres_0 (the resultant) through
/// sres_n of p and q, deg p = m >= deg q = n taken as formal degrees.
/// sres_j vanishes for every j < d exactly when deg gcd(p, q) >= d.
template <class Real>
std::vector<Complex<Real>> principal_subresultants(const UniPoly<Real>& p, const UniPoly<Real>& q) {
    const int m = static_cast<int>(p.coeffs().size()) - 1;
    const int n = static_cast<int>(q.coeffs().size()) - 1;
    if (m < n || n < 0) throw Error(ErrorKind::InvalidArgument, "subresultants need deg p >= deg q >= 0");
    std::vector<Complex<Real>> out;
    for (int k = 0; k <= n; ++k) {
        if (k == n) {
            Complex<Real> v(Real(1));
            for (int i = 0; i < m - n; ++i) v *= q[static_cast<std::size_t>(n)];
            out.push_back(v);
        } else {
            out.push_back(detail::sres_with_column<Real>(p, q, k, k));
        }
    }
    return out;
}

/// The k-th subresultant polynomial; proportional to gcd(p, q) when k is
/// the gcd degree.
template <class Real>
UniPoly<Real> subresultant_polynomial(const UniPoly<Real>& p, const UniPoly<Real>& q, int k) {
    std::vector<Complex<Real>> c(static_cast<std::size_t>(k + 1));
    for (int j = 0; j <= k; ++j) c[static_cast<std::size_t>(j)] = detail::sres_with_column<Real>(p, q, k, j);
    return UniPoly<Real>(std::move(c));
}

/// Subresultants when coefficients are themselves polynomials in a second
/// variable u: p = sum_i p_i(u) s^i. Each sres_k(u) is recovered exactly by
/// evaluating on roots of unity and inverting the discrete Fourier transform.
template <class Real>
std::vector<UniPoly<Real>> principal_subresultants(const std::vector<UniPoly<Real>>& p,
                                                   const std::vector<UniPoly<Real>>& q) {
    using C = Complex<Real>;
    const int m = static_cast<int>(p.size()) - 1;
    const int n = static_cast<int>(q.size()) - 1;
    if (m < n || n < 0) throw Error(ErrorKind::InvalidArgument, "subresultants need deg p >= deg q >= 0");
    int dp = 0, dq = 0;
    for (const auto& c : p) dp = std::max(dp, static_cast<int>(c.coeffs().size()) - 1);
    for (const auto& c : q) dq = std::max(dq, static_cast<int>(c.coeffs().size()) - 1);
    const int samples = m * dq + n * dp + 1;
    const Real two_pi = Real(2) * boost::math::constants::pi<Real>();

    std::vector<std::vector<C>> values(static_cast<std::size_t>(n + 1));
    std::vector<C> nodes(static_cast<std::size_t>(samples));
    for (int t = 0; t < samples; ++t) {
        using std::cos;
        using std::sin;
        const Real ang = two_pi * Real(t) / Real(samples);
        nodes[static_cast<std::size_t>(t)] = C(cos(ang), sin(ang));
        std::vector<C> pv, qv;
        for (const auto& c : p) pv.push_back(c(nodes[static_cast<std::size_t>(t)]));
        for (const auto& c : q) qv.push_back(c(nodes[static_cast<std::size_t>(t)]));
        const auto sres = principal_subresultants<Real>(UniPoly<Real>(pv), UniPoly<Real>(qv));
        for (int k = 0; k <= n; ++k) values[static_cast<std::size_t>(k)].push_back(sres[static_cast<std::size_t>(k)]);
    }
    std::vector<UniPoly<Real>> out;
    for (int k = 0; k <= n; ++k) {
        std::vector<C> coeffs(static_cast<std::size_t>(samples), C(Real(0)));
        for (int j = 0; j < samples; ++j) {
            C acc(Real(0));
            for (int t = 0; t < samples; ++t) {
                using std::conj;
                C w = nodes[static_cast<std::size_t>((static_cast<long>(j) * t) % samples)];
                acc += values[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)] * conj(w);
            }
            coeffs[static_cast<std::size_t>(j)] = acc / Real(samples);
        }
        out.emplace_back(std::move(coeffs));
    }
    return out;
}

}  // namespace bitan
