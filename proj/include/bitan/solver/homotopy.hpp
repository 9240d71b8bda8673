#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "bitan/core/error.hpp"
#include "bitan/core/hompoly.hpp"
#include "bitan/core/linalg.hpp"
#include "bitan/core/projvec.hpp"
#include "bitan/core/random.hpp"
#include "bitan/core/transform.hpp"
#include "bitan/solver/square.hpp"

// Bitangent lines as solutions of a square polynomial system, followed
// along a parameter homotopy from a quartic whose 28 solutions are known.
//
// Unknowns X = (P0, P1, r, lambda) in C^10: the line through P0 and P1 is a
// bitangent with square root r iff q(P0 + s P1) = lambda r(s)^2 as
// polynomials of degree 4 in s, imposed at the five fifth roots of unity.
// Five affine patches M P0 = (1,0), M P1 = (0,1), k.r = 1 fix the gauge;
// they force P0 and P1 apart, so the system has no spurious components.
// The patches are moved along with the solution during tracking.
namespace bitan::homotopy {

inline constexpr int dim = 10;

template <class Real>
using State = Eigen::Matrix<Complex<Real>, dim, 1>;

template <class Real>
using Jacobian = Eigen::Matrix<Complex<Real>, dim, dim>;

template <class Real>
struct Patch {
    Vec3<Real> m0{}, m1{}, k{};
};

/// Straight segment q(t) = (1-t) a + t b between two quartics.
template <class Real>
struct Segment {
    HomPoly<Real> a, b;
    std::array<HomPoly<Real>, 3> da, db;

    Segment(const HomPoly<Real>& qa, const HomPoly<Real>& qb) : a(qa), b(qb) {
        for (int v = 0; v < 3; ++v) {
            da[static_cast<std::size_t>(v)] = a.derivative(v);
            db[static_cast<std::size_t>(v)] = b.derivative(v);
        }
    }
};

template <class Real>
const std::array<Complex<Real>, 5>& samples() {
    static const std::array<Complex<Real>, 5> s = [] {
        std::array<Complex<Real>, 5> out{};
        const auto w = roots_of_unity<Real>(5);
        for (std::size_t i = 0; i < 5; ++i) out[i] = w[i];
        return out;
    }();
    return s;
}

template <class Real>
Vec3<Real> point0(const State<Real>& x) {
    return {x(0), x(1), x(2)};
}

template <class Real>
Vec3<Real> point1(const State<Real>& x) {
    return {x(3), x(4), x(5)};
}

template <class Real>
Vec3<Real> line_of(const State<Real>& x) {
    return cross<Real>(point0<Real>(x), point1<Real>(x));
}

template <class Real>
struct Evaluation {
    State<Real> value;
    Jacobian<Real> jx;
    State<Real> jt;
};

template <class Real>
Evaluation<Real> evaluate(const Patch<Real>& pa, const Segment<Real>& seg, const State<Real>& x, const Real& t) {
    using C = Complex<Real>;
    Evaluation<Real> ev;
    ev.value.setZero();
    ev.jx.setZero();
    ev.jt.setZero();
    const C lam = x(9);
    const Real u = Real(1) - t;
    const auto& ss = samples<Real>();
    for (int i = 0; i < 5; ++i) {
        const C s = ss[static_cast<std::size_t>(i)];
        const Vec3<Real> p{x(0) + s * x(3), x(1) + s * x(4), x(2) + s * x(5)};
        const C qa = seg.a(p), qb = seg.b(p);
        const C r = x(6) + s * (x(7) + s * x(8));
        ev.value(i) = u * qa + t * qb - lam * r * r;
        ev.jt(i) = qb - qa;
        for (std::size_t v = 0; v < 3; ++v) {
            const C g = u * seg.da[v](p) + t * seg.db[v](p);
            ev.jx(i, static_cast<int>(v)) = g;
            ev.jx(i, 3 + static_cast<int>(v)) = s * g;
        }
        C sm(Real(1));
        for (int m = 0; m < 3; ++m) {
            ev.jx(i, 6 + m) = -Real(2) * lam * r * sm;
            sm *= s;
        }
        ev.jx(i, 9) = -r * r;
    }
    const C one(Real(1));
    ev.value(5) = pa.m0[0] * x(0) + pa.m0[1] * x(1) + pa.m0[2] * x(2) - one;
    ev.value(6) = pa.m1[0] * x(0) + pa.m1[1] * x(1) + pa.m1[2] * x(2);
    ev.value(7) = pa.m0[0] * x(3) + pa.m0[1] * x(4) + pa.m0[2] * x(5);
    ev.value(8) = pa.m1[0] * x(3) + pa.m1[1] * x(4) + pa.m1[2] * x(5) - one;
    ev.value(9) = pa.k[0] * x(6) + pa.k[1] * x(7) + pa.k[2] * x(8) - one;
    for (int j = 0; j < 3; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        ev.jx(5, j) = pa.m0[sj];
        ev.jx(6, j) = pa.m1[sj];
        ev.jx(7, 3 + j) = pa.m0[sj];
        ev.jx(8, 3 + j) = pa.m1[sj];
        ev.jx(9, 6 + j) = pa.k[sj];
    }
    return ev;
}

template <class Real>
Real state_norm(const State<Real>& x) {
    Real n(0);
    for (int i = 0; i < dim; ++i) n += norm2_of<Real>(x(i));
    using std::sqrt;
    return sqrt(n);
}

/// Replaces (P0, P1) by an orthonormal basis of their span, rewrites r in
/// the new parameter, scales r to unit norm, and returns the patch under
/// which the new state satisfies the gauge equations exactly.
template <class Real>
Patch<Real> repatch(State<Real>& x) {
    using C = Complex<Real>;
    using std::conj;
    using std::sqrt;
    auto inner = [](const Vec3<Real>& a, const Vec3<Real>& b) {
        C s(Real(0));
        for (std::size_t i = 0; i < 3; ++i) s += conj(a[i]) * b[i];
        return s;
    };
    Vec3<Real> p0 = point0<Real>(x), p1 = point1<Real>(x);
    // [P0' P1'] = [P0 P1] G with G = [[g00, g01], [0, g11]].
    const Real n0 = sqrt(norm2_of<Real>(p0[0]) + norm2_of<Real>(p0[1]) + norm2_of<Real>(p0[2]));
    const C g00 = C(Real(1) / n0);
    for (auto& c : p0) c *= g00;
    const C proj = inner(p0, p1);
    for (std::size_t i = 0; i < 3; ++i) p1[i] -= proj * p0[i];
    const Real n1 = sqrt(norm2_of<Real>(p1[0]) + norm2_of<Real>(p1[1]) + norm2_of<Real>(p1[2]));
    for (auto& c : p1) c /= n1;
    const C g11 = C(Real(1) / n1);
    const C g01 = -proj * g00 * g11;
    // sigma P0 + tau P1 with (sigma, tau) = G (1, s'):
    // r'(s') = r0 sigma^2 + r1 sigma tau + r2 tau^2.
    const UniPoly<Real> sig({g00, g01}), tau({C(Real(0)), g11});
    const UniPoly<Real> rp = x(6) * (sig * sig) + (x(7) * (sig * tau) + x(8) * (tau * tau));
    std::array<C, 3> r{rp[0], rp[1], rp[2]};
    Real rn(0);
    for (const auto& c : r) rn += norm2_of<Real>(c);
    rn = sqrt(rn);
    for (auto& c : r) c /= rn;
    for (int j = 0; j < 3; ++j) {
        x(j) = p0[static_cast<std::size_t>(j)];
        x(3 + j) = p1[static_cast<std::size_t>(j)];
        x(6 + j) = r[static_cast<std::size_t>(j)];
    }
    x(9) *= C(rn * rn);
    Patch<Real> pa;
    for (std::size_t j = 0; j < 3; ++j) {
        pa.m0[j] = conj(p0[j]);
        pa.m1[j] = conj(p1[j]);
        pa.k[j] = conj(r[j]);
    }
    return pa;
}

struct TrackOptions {
    double initial_step = 0.02;
    double max_step = 0.05;
    double min_step = 1e-9;
    int max_steps = 20000;
    int corrector_iterations = 3;
    double corrector_tol = 1e-9;  ///< relative correction size that counts as converged
    double divergence = 1e8;      ///< |lambda| treated as a path at infinity
};

template <class Real>
State<Real> tangent(const Patch<Real>& pa, const Segment<Real>& seg, const State<Real>& x, const Real& t) {
    const auto ev = evaluate<Real>(pa, seg, x, t);
    return -ev.jx.partialPivLu().solve(ev.jt);
}

/// Newton on H(., t); true if the correction falls below tol * (1 + |x|)
/// within the iteration budget while contracting.
template <class Real>
bool correct(const Patch<Real>& pa, const Segment<Real>& seg, State<Real>& x, const Real& t, int iterations,
             double tol) {
    Real prev(-1);
    for (int it = 0; it < iterations; ++it) {
        const auto ev = evaluate<Real>(pa, seg, x, t);
        const State<Real> dx = ev.jx.partialPivLu().solve(ev.value);
        const Real dn = state_norm<Real>(dx);
        if (!(dn == dn)) return false;
        const Real bound = Real(tol) * (Real(1) + state_norm<Real>(x));
        if (prev >= Real(0) && dn > prev / Real(2) && dn > bound) return false;
        x -= dx;
        prev = dn;
        if (dn <= bound) return true;
    }
    return false;
}

/// Newton steps at fixed t for as long as they reduce the residual.
template <class Real>
void sharpen(const Patch<Real>& pa, const Segment<Real>& seg, State<Real>& x, const Real& t, int iterations = 12) {
    auto ev = evaluate<Real>(pa, seg, x, t);
    Real current = state_norm<Real>(ev.value);
    for (int it = 0; it < iterations && current > Real(0); ++it) {
        const State<Real> y = x - ev.jx.partialPivLu().solve(ev.value);
        auto ey = evaluate<Real>(pa, seg, y, t);
        const Real next = state_norm<Real>(ey.value);
        if (!(next < current)) return;
        x = y;
        ev = std::move(ey);
        current = next;
    }
}

/// Follows one solution from t = 0 to t = 1 with an RK4 predictor and a
/// Newton corrector under adaptive step control, then sharpens the endpoint.
template <class Real>
bool track(const Segment<Real>& seg, State<Real>& x, const TrackOptions& opt) {
    Patch<Real> pa = repatch<Real>(x);
    Real t(0);
    Real dt(opt.initial_step);
    int streak = 0;
    const Complex<Real> two(Real(2));
    for (int step = 0; step < opt.max_steps && t < Real(1); ++step) {
        if (t + dt > Real(1)) dt = Real(1) - t;
        const Complex<Real> h(dt), h2(dt / Real(2)), h6(dt / Real(6));
        const State<Real> k1 = tangent<Real>(pa, seg, x, t);
        const State<Real> k2 = tangent<Real>(pa, seg, State<Real>(x + h2 * k1), t + dt / Real(2));
        const State<Real> k3 = tangent<Real>(pa, seg, State<Real>(x + h2 * k2), t + dt / Real(2));
        const State<Real> k4 = tangent<Real>(pa, seg, State<Real>(x + h * k3), t + dt);
        State<Real> y = x + h6 * (k1 + two * k2 + two * k3 + k4);
        const bool ok = correct<Real>(pa, seg, y, t + dt, opt.corrector_iterations, opt.corrector_tol);
        if (ok && abs_of<Real>(y(9)) < Real(opt.divergence)) {
            x = y;
            t += dt;
            pa = repatch<Real>(x);
            if (++streak >= 3) {
                dt = std::min(Real(opt.max_step), dt * Real(2));
                streak = 0;
            }
        } else {
            dt /= Real(2);
            streak = 0;
            if (dt < Real(opt.min_step)) return false;
        }
    }
    if (t < Real(1)) return false;
    sharpen<Real>(pa, seg, x, Real(1));
    return true;
}

template <class Real>
struct StartSystem {
    HomPoly<Real> quartic;
    std::vector<State<Real>> solutions;
};

namespace detail {

template <class Real>
HomPoly<Real> random_quartic(Rng& rng) {
    std::vector<Complex<Real>> c(15);
    for (auto& x : c) x = rng.complex<Real>();
    return HomPoly<Real>(4, std::move(c)).unit();
}

inline bool same_line(const State<double>& a, const State<double>& b) {
    return proj_distance<double>(line_of<double>(a), line_of<double>(b)) < 1e-6;
}

/// Quartic with one prescribed bitangent: a random quartic plus the
/// correction that makes its restriction to the line P0 P1 equal lam0 r0^2.
inline StartSystem<double> seeded_start(Rng& rng) {
    using C = std::complex<double>;
    StartSystem<double> st;
    auto rv = [&] { return Vec3<double>{rng.complex<double>(), rng.complex<double>(), rng.complex<double>()}; };
    const Vec3<double> p0 = rv(), p1 = rv(), r0 = rv(), c = rv();
    const C lam0 = rng.complex<double>();
    const HomPoly<double> qr = random_quartic<double>(rng);
    const auto& ss = samples<double>();
    std::vector<C> diff(5);
    for (std::size_t i = 0; i < 5; ++i) {
        const C s = ss[i];
        const Vec3<double> p{p0[0] + s * p1[0], p0[1] + s * p1[1], p0[2] + s * p1[2]};
        const C r = r0[0] + s * (r0[1] + s * r0[2]);
        diff[i] = lam0 * r * r - qr(p);
    }
    const auto g = interpolate_roots_of_unity<double>(diff);

    // Coordinates (alpha, beta, gamma) with X = alpha p0 + beta p1 + gamma c.
    const Mat3<double> cols{Vec3<double>{p0[0], p1[0], c[0]}, Vec3<double>{p0[1], p1[1], c[1]},
                            Vec3<double>{p0[2], p1[2], c[2]}};
    const Mat3<double> inv = inverse<double>(cols);
    const HomPoly<double> alpha = HomPoly<double>::linear(inv[0]);
    const HomPoly<double> beta = HomPoly<double>::linear(inv[1]);
    HomPoly<double> q0 = qr;
    for (int i = 0; i < 5; ++i) q0 += (alpha.pow(4 - i) * beta.pow(i)) * g[static_cast<std::size_t>(i)];

    const double n = to_double(q0.norm());
    q0 *= C(1.0 / n);
    State<double> x;
    for (int j = 0; j < 3; ++j) {
        x(j) = p0[static_cast<std::size_t>(j)];
        x(3 + j) = p1[static_cast<std::size_t>(j)];
        x(6 + j) = r0[static_cast<std::size_t>(j)];
    }
    x(9) = lam0 / n;
    st.quartic = q0;
    const Segment<double> still(q0, q0);
    const Patch<double> pa = repatch<double>(x);
    sharpen<double>(pa, still, x, 0.0);
    st.solutions.push_back(x);
    return st;
}

/// Completes the solution set of the seeded start quartic by monodromy:
/// every known solution is carried around random triangle loops in the
/// space of quartics and any new endpoint is kept.
inline StartSystem<double> build_start_double() {
    constexpr std::size_t expected = 28;
    Rng rng(0x6269746eULL);
    StartSystem<double> st = seeded_start(rng);
    TrackOptions opt;
    int stale = 0;
    for (int loop = 0; loop < 400 && st.solutions.size() < expected; ++loop) {
        const HomPoly<double> qa = random_quartic<double>(rng);
        const HomPoly<double> qb = random_quartic<double>(rng);
        const std::array<Segment<double>, 3> legs{Segment<double>(st.quartic, qa), Segment<double>(qa, qb),
                                                   Segment<double>(qb, st.quartic)};
        const std::size_t before = st.solutions.size();
        for (std::size_t i = 0; i < st.solutions.size() && st.solutions.size() < expected; ++i) {
            State<double> x = st.solutions[i];
            bool ok = true;
            for (const auto& leg : legs) ok = ok && track<double>(leg, x, opt);
            if (!ok) continue;
            const bool known = std::any_of(st.solutions.begin(), st.solutions.end(),
                                           [&](const State<double>& y) { return same_line(x, y); });
            if (!known) st.solutions.push_back(x);
        }
        stale = st.solutions.size() == before ? stale + 1 : 0;
        if (stale > 50) break;
    }
    if (st.solutions.size() != expected)
        throw Error(ErrorKind::CountMismatch, "monodromy did not complete the start system",
                    static_cast<long>(st.solutions.size()));
    return st;
}

}  // namespace detail

/// Start quartic with all 28 solutions, built once per process in binary64
/// and polished in the requested precision.
template <class Real>
const StartSystem<Real>& start_system() {
    static const StartSystem<Real> cached = [] {
        if constexpr (std::is_same_v<Real, double>) {
            return detail::build_start_double();
        } else {
            const StartSystem<double>& base = start_system<double>();
            StartSystem<Real> st;
            st.quartic = base.quartic.template cast<Real>();
            const Segment<Real> still(st.quartic, st.quartic);
            for (const auto& xd : base.solutions) {
                State<Real> x;
                for (int i = 0; i < dim; ++i) x(i) = from_cdouble<Real>(xd(i));
                const Patch<Real> pa = repatch<Real>(x);
                sharpen<Real>(pa, still, x, Real(0));
                st.solutions.push_back(x);
            }
            return st;
        }
    }();
    return cached;
}

}  // namespace bitan::homotopy
