#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <mutex>
#include <vector>

#include "bitan/core/error.hpp"
#include "bitan/core/projvec.hpp"
#include "bitan/core/scalar.hpp"

namespace bitan {

using Exponent = std::array<int, 3>;

/// Graded-lexicographic monomials of degree d in (x, y, z): x^d first, z^d
/// last. Degree 4 gives x4, x3y, x3z, x2y2, x2yz, x2z2, xy3, ..., z4.
inline const std::vector<Exponent>& monomials(int degree) {
    static std::mutex mutex;
    static std::map<int, std::vector<Exponent>> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(degree);
    if (it != cache.end()) return it->second;
    std::vector<Exponent> out;
    for (int i = degree; i >= 0; --i)
        for (int j = degree - i; j >= 0; --j) out.push_back({i, j, degree - i - j});
    return cache.emplace(degree, std::move(out)).first->second;
}

constexpr std::size_t monomial_count(int degree) {
    return static_cast<std::size_t>((degree + 1) * (degree + 2) / 2);
}

/// Index of x^i y^j z^k in the degree i+j+k monomial list.
constexpr std::size_t monomial_index(int i, int j, int k) {
    const int d = i + j + k;
    const int a = d - i;  // monomials with a larger x-exponent come first
    return static_cast<std::size_t>(a * (a + 1) / 2 + (a - j));
}

/// Evaluates every degree-d monomial at `p`, in list order.
template <class Real>
std::vector<Complex<Real>> monomial_values(int degree, const Vec3<Real>& p) {
    using C = Complex<Real>;
    std::vector<std::array<C, 3>> pw(static_cast<std::size_t>(degree + 1));
    for (int v = 0; v < 3; ++v) {
        C acc(Real(1));
        for (int e = 0; e <= degree; ++e) {
            pw[static_cast<std::size_t>(e)][static_cast<std::size_t>(v)] = acc;
            acc *= p[static_cast<std::size_t>(v)];
        }
    }
    const auto& mons = monomials(degree);
    std::vector<C> out(mons.size());
    for (std::size_t m = 0; m < mons.size(); ++m)
        out[m] = pw[static_cast<std::size_t>(mons[m][0])][0] * pw[static_cast<std::size_t>(mons[m][1])][1] *
                 pw[static_cast<std::size_t>(mons[m][2])][2];
    return out;
}

/// Homogeneous ternary form with complex coefficients in the fixed
/// graded-lexicographic monomial order.
template <class Real>
class HomPoly {
public:
    using C = Complex<Real>;

    HomPoly() = default;

    explicit HomPoly(int degree) : degree_(degree), coeffs_(monomial_count(degree), C(Real(0))) {
        if (degree < 0) throw Error(ErrorKind::InvalidArgument, "negative degree");
    }

    HomPoly(int degree, std::vector<C> coeffs) : degree_(degree), coeffs_(std::move(coeffs)) {
        if (degree < 0) throw Error(ErrorKind::InvalidArgument, "negative degree");
        if (coeffs_.size() != monomial_count(degree))
            throw Error(ErrorKind::InvalidArgument, "coefficient count does not match degree");
    }

    /// The linear form a x + b y + c z.
    static HomPoly linear(const Vec3<Real>& v) { return HomPoly(1, {v[0], v[1], v[2]}); }

    static HomPoly constant(C c) { return HomPoly(0, {c}); }

    int degree() const { return degree_; }
    const std::vector<C>& coeffs() const { return coeffs_; }
    std::vector<C>& coeffs() { return coeffs_; }
    std::size_t size() const { return coeffs_.size(); }

    C& coeff(int i, int j, int k) { return coeffs_[monomial_index(i, j, k)]; }
    const C& coeff(int i, int j, int k) const { return coeffs_[monomial_index(i, j, k)]; }

    bool is_zero() const {
        for (const auto& c : coeffs_)
            if (c != C(Real(0))) return false;
        return true;
    }

    C operator()(const Vec3<Real>& p) const {
        const auto vals = monomial_values<Real>(degree_, p);
        C acc(Real(0));
        for (std::size_t m = 0; m < vals.size(); ++m) acc += coeffs_[m] * vals[m];
        return acc;
    }

    C operator()(const ProjVec<Real>& p) const { return (*this)(p.coords); }

    HomPoly derivative(int var) const {
        if (degree_ == 0) return HomPoly(0);
        HomPoly out(degree_ - 1);
        const auto& mons = monomials(degree_);
        for (std::size_t m = 0; m < mons.size(); ++m) {
            Exponent e = mons[m];
            const int p = e[static_cast<std::size_t>(var)];
            if (p == 0) continue;
            e[static_cast<std::size_t>(var)] -= 1;
            out.coeff(e[0], e[1], e[2]) += coeffs_[m] * Real(p);
        }
        return out;
    }

    Vec3<Real> gradient(const Vec3<Real>& p) const {
        return {derivative(0)(p), derivative(1)(p), derivative(2)(p)};
    }

    HomPoly operator*(const HomPoly& other) const {
        HomPoly out(degree_ + other.degree_);
        const auto& ma = monomials(degree_);
        const auto& mb = monomials(other.degree_);
        for (std::size_t a = 0; a < ma.size(); ++a) {
            if (coeffs_[a] == C(Real(0))) continue;
            for (std::size_t b = 0; b < mb.size(); ++b)
                out.coeff(ma[a][0] + mb[b][0], ma[a][1] + mb[b][1], ma[a][2] + mb[b][2]) +=
                    coeffs_[a] * other.coeffs_[b];
        }
        return out;
    }

    HomPoly& operator+=(const HomPoly& other) {
        require_same_degree(other);
        for (std::size_t m = 0; m < coeffs_.size(); ++m) coeffs_[m] += other.coeffs_[m];
        return *this;
    }

    HomPoly& operator-=(const HomPoly& other) {
        require_same_degree(other);
        for (std::size_t m = 0; m < coeffs_.size(); ++m) coeffs_[m] -= other.coeffs_[m];
        return *this;
    }

    HomPoly& operator*=(const C& s) {
        for (auto& c : coeffs_) c *= s;
        return *this;
    }

    friend HomPoly operator+(HomPoly a, const HomPoly& b) { return a += b; }
    friend HomPoly operator-(HomPoly a, const HomPoly& b) { return a -= b; }
    friend HomPoly operator*(HomPoly a, const C& s) { return a *= s; }
    friend HomPoly operator*(const C& s, HomPoly a) { return a *= s; }

    HomPoly pow(int e) const {
        HomPoly out = constant(C(Real(1)));
        for (int i = 0; i < e; ++i) out = out * *this;
        return out;
    }

    /// The form p |-> f(M p), i.e. each variable replaced by a row of M.
    HomPoly compose(const std::array<Vec3<Real>, 3>& rows) const {
        const std::array<HomPoly, 3> forms{linear(rows[0]), linear(rows[1]), linear(rows[2])};
        std::array<std::vector<HomPoly>, 3> powers;
        for (std::size_t v = 0; v < 3; ++v) {
            powers[v].push_back(constant(C(Real(1))));
            for (int e = 1; e <= degree_; ++e) powers[v].push_back(powers[v].back() * forms[v]);
        }
        HomPoly out(degree_);
        const auto& mons = monomials(degree_);
        for (std::size_t m = 0; m < mons.size(); ++m) {
            if (coeffs_[m] == C(Real(0))) continue;
            HomPoly term = powers[0][static_cast<std::size_t>(mons[m][0])] *
                           powers[1][static_cast<std::size_t>(mons[m][1])] *
                           powers[2][static_cast<std::size_t>(mons[m][2])];
            out += term * coeffs_[m];
        }
        return out;
    }

    Real norm() const {
        Real s(0);
        for (const auto& c : coeffs_) s += norm2_of<Real>(c);
        using std::sqrt;
        return sqrt(s);
    }

    Real max_abs() const {
        Real m(0);
        for (const auto& c : coeffs_) m = std::max(m, abs_of<Real>(c));
        return m;
    }

    /// Largest-magnitude coefficient scaled to exactly 1 (first index wins).
    HomPoly normalized() const {
        std::size_t pivot = 0;
        Real best(0);
        for (std::size_t m = 0; m < coeffs_.size(); ++m) {
            const Real a = abs_of<Real>(coeffs_[m]);
            if (a > best) {
                best = a;
                pivot = m;
            }
        }
        if (best == Real(0)) throw Error(ErrorKind::ZeroVector, "cannot normalize the zero polynomial");
        HomPoly out = *this;
        const C inv = C(Real(1)) / coeffs_[pivot];
        for (std::size_t m = 0; m < coeffs_.size(); ++m) out.coeffs_[m] = m == pivot ? C(Real(1)) : coeffs_[m] * inv;
        return out;
    }

    HomPoly unit() const {
        HomPoly out = *this;
        const Real n = norm();
        if (n == Real(0)) throw Error(ErrorKind::ZeroVector, "cannot scale the zero polynomial");
        for (auto& c : out.coeffs_) c /= n;
        return out;
    }

    /// |f(p)| relative to |f| |p|^d; scale-invariant in both arguments.
    Real relative_value(const Vec3<Real>& p) const {
        Real pn(0);
        for (const auto& c : p) pn += norm2_of<Real>(c);
        using std::pow;
        using std::sqrt;
        pn = sqrt(pn);
        Real scale = norm();
        for (int i = 0; i < degree_; ++i) scale *= pn;
        return abs_of<Real>((*this)(p)) / scale;
    }

    template <class R2>
    HomPoly<R2> cast() const {
        std::vector<Complex<R2>> c(coeffs_.size());
        for (std::size_t m = 0; m < c.size(); ++m) {
            using std::imag;
            using std::real;
            c[m] = Complex<R2>(R2(real(coeffs_[m])), R2(imag(coeffs_[m])));
        }
        return HomPoly<R2>(degree_, std::move(c));
    }

private:
    void require_same_degree(const HomPoly& other) const {
        if (other.degree_ != degree_) throw Error(ErrorKind::InvalidArgument, "degree mismatch");
    }

    int degree_ = 0;
    std::vector<C> coeffs_{C(Real(0))};
};

/// Determinant of the 3x3 matrix of second partials (the Hessian curve).
template <class Real>
HomPoly<Real> hessian(const HomPoly<Real>& f) {
    std::array<std::array<HomPoly<Real>, 3>, 3> h;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) h[i][j] = f.derivative(i).derivative(j);
    return h[0][0] * (h[1][1] * h[2][2] - h[1][2] * h[2][1]) - h[0][1] * (h[1][0] * h[2][2] - h[1][2] * h[2][0]) +
           h[0][2] * (h[1][0] * h[2][1] - h[1][1] * h[2][0]);
}

}  // namespace bitan
