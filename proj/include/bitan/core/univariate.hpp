#pragma once

#include <vector>

#include "bitan/core/scalar.hpp"

namespace bitan {

/// Dense univariate polynomial, coefficients stored from the constant term up.
template <class Real>
class UniPoly {
public:
    using C = Complex<Real>;

    UniPoly() = default;
    explicit UniPoly(std::vector<C> coeffs) : c_(std::move(coeffs)) {}

    /// prod (s - r_k)
    static UniPoly from_roots(const std::vector<C>& roots) {
        UniPoly p({C(Real(1))});
        for (const auto& r : roots) p = p * UniPoly({-r, C(Real(1))});
        return p;
    }

    const std::vector<C>& coeffs() const { return c_; }
    std::vector<C>& coeffs() { return c_; }

    /// Degree after ignoring exact trailing zeros; -1 for the zero polynomial.
    int degree() const {
        for (int i = static_cast<int>(c_.size()) - 1; i >= 0; --i)
            if (c_[static_cast<std::size_t>(i)] != C(Real(0))) return i;
        return -1;
    }

    C operator[](std::size_t i) const { return i < c_.size() ? c_[i] : C(Real(0)); }

    C leading() const {
        const int d = degree();
        return d < 0 ? C(Real(0)) : c_[static_cast<std::size_t>(d)];
    }

    C operator()(const C& s) const {
        C acc(Real(0));
        for (std::size_t i = c_.size(); i-- > 0;) acc = acc * s + c_[i];
        return acc;
    }

    /// Value and first derivative in one Horner pass.
    std::pair<C, C> eval_with_derivative(const C& s) const {
        C p(Real(0)), dp(Real(0));
        for (std::size_t i = c_.size(); i-- > 0;) {
            dp = dp * s + p;
            p = p * s + c_[i];
        }
        return {p, dp};
    }

    UniPoly derivative() const {
        if (c_.size() <= 1) return UniPoly({C(Real(0))});
        std::vector<C> d(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * Real(static_cast<double>(i));
        return UniPoly(std::move(d));
    }

    /// Drops trailing coefficients below `rel` times the largest magnitude.
    UniPoly trimmed(double rel = 0.0) const {
        Real big(0);
        for (const auto& c : c_) big = std::max(big, abs_of<Real>(c));
        std::size_t n = c_.size();
        while (n > 1 && abs_of<Real>(c_[n - 1]) <= Real(rel) * big) --n;
        return UniPoly(std::vector<C>(c_.begin(), c_.begin() + static_cast<std::ptrdiff_t>(n)));
    }

    Real norm() const {
        Real s(0);
        for (const auto& c : c_) s += norm2_of<Real>(c);
        using std::sqrt;
        return sqrt(s);
    }

    friend UniPoly operator*(const UniPoly& a, const UniPoly& b) {
        if (a.c_.empty() || b.c_.empty()) return UniPoly();
        std::vector<C> out(a.c_.size() + b.c_.size() - 1, C(Real(0)));
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
        return UniPoly(std::move(out));
    }

    friend UniPoly operator+(const UniPoly& a, const UniPoly& b) {
        std::vector<C> out(std::max(a.c_.size(), b.c_.size()), C(Real(0)));
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
        return UniPoly(std::move(out));
    }

    friend UniPoly operator*(const C& s, UniPoly a) {
        for (auto& c : a.c_) c *= s;
        return a;
    }

private:
    std::vector<C> c_;
};

}  // namespace bitan
