#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "bitan/core/error.hpp"
#include "bitan/core/fit.hpp"
#include "bitan/core/hompoly.hpp"
#include "bitan/core/intersect.hpp"
#include "bitan/core/linalg.hpp"
#include "bitan/core/projvec.hpp"
#include "bitan/core/random.hpp"
#include "bitan/core/transform.hpp"
#include "bitan/cubic/cubic.hpp"
#include "bitan/detect/detect.hpp"
#include "bitan/solver/bitangents.hpp"
#include "bitan/solver/square.hpp"
#include "bitan/theta/theta_f2.hpp"

namespace bitan {

/// Relative square-certificate residual of q restricted to a line; 1 when
/// the restriction is not close to a square at all.
template <class Real>
double bitangency_residual(const HomPoly<Real>& q, const ProjVec<Real>& line) {
    const auto r = restrict<Real>(q, line.as(Role::line));
    if (r.b.is_zero()) return 1.0;
    const auto cert = square_certificate<Real>(r.b, 1e300);
    return cert ? std::min(1.0, cert->residual) : 1.0;
}

/// Largest coordinate difference after scaling both to unit norm and
/// fixing the phase at the largest coefficient of a.
template <class Real>
double compare_proportional(const HomPoly<Real>& a, const HomPoly<Real>& b) {
    if (a.degree() != b.degree()) throw Error(ErrorKind::InvalidArgument, "compare needs equal degrees");
    const HomPoly<Real> ua = a.unit(), ub = b.unit();
    std::size_t pivot = 0;
    for (std::size_t m = 1; m < ua.size(); ++m)
        if (abs_of<Real>(ua.coeffs()[m]) > abs_of<Real>(ua.coeffs()[pivot])) pivot = m;
    auto phase = [&](const HomPoly<Real>& f) {
        using std::conj;
        const Complex<Real> c = f.coeffs()[pivot];
        const Real r = abs_of<Real>(c);
        return r == Real(0) ? Complex<Real>(Real(1)) : Complex<Real>(conj(c) / r);
    };
    const Complex<Real> pa = phase(ua), pb = phase(ub);
    double err = 0.0;
    for (std::size_t m = 0; m < ua.size(); ++m)
        err = std::max(err, to_double(abs_of<Real>(ua.coeffs()[m] * pa - ub.coeffs()[m] * pb)));
    return err;
}

/// Cubic in the dual plane traced by the chords {P, P + beta}, fitted
/// through the images of points cut out by seeded random lines.
template <class Real>
FitResult<Real> image_cubic(const CubicCurve<Real>& f, const ProjVec<Real>& beta, std::uint64_t seed = 0x696d6167ULL) {
    Rng rng(seed);
    std::vector<ProjVec<Real>> images;
    while (images.size() < 18) {
        const Vec3<Real> l{rng.complex<Real>(), rng.complex<Real>(), rng.complex<Real>()};
        for (const auto& p : intersect_curves<Real>(f.poly, HomPoly<Real>::linear(l))) {
            try {
                images.push_back(chord_map<Real>(f, beta, normalize<Real>(p, 0.0)));
            } catch (const Error&) {
            }
        }
    }
    return nullspace_fit<Real>(images, 3, f.tol_geo);
}

template <class Real>
struct NineCompletion {
    std::array<ProjVec<Real>, 3> recovered{};  ///< indices 9, 10, 11 in `pairs`
    Partition pairs{};                         ///< over 0..8 (input) and 9..11 (recovered)
    CubicCurve<Real> cubic;
    ProjVec<Real> beta;
    HomPoly<Real> conic;
    double conic_residual = 0.0;
    bool used_conic = false;  ///< a whole pair was missing and came from the conic
};

/// The three missing points of a twelve-tuple from nine of its points and
/// one known pair. Translation by the pair's difference class recovers
/// every point whose partner is among the nine; when two missing points are
/// partners of each other, their chord is the sixth point where the conic
/// through the five known chord images meets the image cubic.
template <class Real>
NineCompletion<Real> complete_from_nine(const std::array<ProjVec<Real>, 9>& nine_in, std::array<int, 2> marked,
                                        const Tolerances& tol = {}) {
    tol.validate();
    if (marked[0] == marked[1] || marked[0] < 0 || marked[1] < 0 || marked[0] > 8 || marked[1] > 8)
        throw Error(ErrorKind::InvalidArgument, "marked pair must be two distinct indices below 9");
    std::vector<ProjVec<Real>> pts;
    for (const auto& p : nine_in) pts.push_back(normalize<Real>(p.as(Role::point), tol.geo));
    for (std::size_t i = 0; i < 9; ++i)
        for (std::size_t j = i + 1; j < 9; ++j)
            if (proj_distance<Real>(pts[i], pts[j]) < Real(tol.dup))
                throw Error(ErrorKind::InvalidArgument, "the nine points are not distinct");

    NineCompletion<Real> out;
    const auto fit = nullspace_fit<Real>(pts, 3, tol.geo);
    out.cubic = make_cubic<Real>(fit.curve, tol.geo, tol.dup);
    if (out.cubic.classification != CubicClass::smooth)
        throw Error(ErrorKind::DegenerateConfiguration, std::string("the cubic through the nine points is ") +
                                                            to_string(out.cubic.classification));
    const CubicCurve<Real>& f = out.cubic;
    const auto& o = origin_of<Real>(f);

    const ProjVec<Real> diff = sub<Real>(f, pts[static_cast<std::size_t>(marked[0])], pts[static_cast<std::size_t>(marked[1])]);
    if (!(to_double(proj_distance<Real>(add<Real>(f, diff, diff), o)) < 10.0 * tol.geo) ||
        proj_distance<Real>(diff, o) < Real(tol.dup))
        throw Error(ErrorKind::InconsistentPairing, "the marked pair does not differ by a point of order two");
    Real best(2);
    for (const auto& t : two_torsion<Real>(f)) {
        const Real d = proj_distance<Real>(t, diff);
        if (d < best) {
            best = d;
            out.beta = t;
        }
    }
    const ProjVec<Real>& beta = out.beta;

    auto find = [&](const ProjVec<Real>& p, const std::vector<ProjVec<Real>>& among) {
        for (std::size_t k = 0; k < among.size(); ++k)
            if (proj_distance<Real>(p, among[k]) < Real(tol.dup)) return static_cast<int>(k);
        return -1;
    };
    std::array<int, 9> partner{};
    std::vector<ProjVec<Real>> images;
    std::vector<int> lonely;
    std::size_t np = 0;
    for (int i = 0; i < 9; ++i) {
        const ProjVec<Real> t = normalize<Real>(add<Real>(f, pts[static_cast<std::size_t>(i)], beta), 0.0);
        partner[static_cast<std::size_t>(i)] = find(t, pts);
        const int j = partner[static_cast<std::size_t>(i)];
        if (j == i) throw Error(ErrorKind::InconsistentPairing, "translation fixes an input point");
        if (j < 0) {
            if (lonely.size() == 3) throw Error(ErrorKind::InconsistentPairing, "more than three translates leave the tuple");
            lonely.push_back(i);
            out.recovered[lonely.size() - 1] = t;
            out.pairs[np++] = {i, 8 + static_cast<int>(lonely.size())};
        } else if (j > i) {
            if (np == 6) throw Error(ErrorKind::InconsistentPairing, "too many pairs");
            out.pairs[np++] = {i, j};
        }
        if (j < 0 || j > i) images.push_back(chord_map<Real>(f, beta, pts[static_cast<std::size_t>(i)]));
    }
    for (int i = 0; i < 9; ++i) {
        const int j = partner[static_cast<std::size_t>(i)];
        if (j >= 0 && partner[static_cast<std::size_t>(j)] != i)
            throw Error(ErrorKind::InconsistentPairing, "translation is not an involution on the nine points");
    }
    for (std::size_t a = 0; a < lonely.size(); ++a)
        for (std::size_t b = a + 1; b < lonely.size(); ++b)
            if (proj_distance<Real>(out.recovered[a], out.recovered[b]) < Real(tol.dup))
                throw Error(ErrorKind::InconsistentPairing, "recovered points coincide");
    if (lonely.size() != 1 && lonely.size() != 3)
        throw Error(ErrorKind::InconsistentPairing, "the translates do not close up into six pairs");

    const auto qfit = nullspace_fit<Real>(images, 2, tol.geo);
    out.conic = qfit.curve;
    out.conic_residual = qfit.residual;
    if (lonely.size() == 3) {
        if (!(qfit.residual < tol.geo)) throw Error(ErrorKind::InconsistentPairing, "the six chord images are not on a conic");
        return out;
    }

    // One missing pair: its chord is the sixth common point of Q and E.
    out.used_conic = true;
    const auto e = image_cubic<Real>(f, beta);
    auto meet = intersect_curves<Real>(e.curve, qfit.curve);
    std::vector<bool> taken(meet.size(), false);
    for (const auto& im : images) {
        std::size_t k_best = meet.size();
        Real d_best(2);
        for (std::size_t k = 0; k < meet.size(); ++k) {
            const Real d = proj_distance<Real>(meet[k], im);
            if (!taken[k] && d < d_best) {
                d_best = d;
                k_best = k;
            }
        }
        if (k_best == meet.size() || !(d_best < Real(tol.dup)))
            throw Error(ErrorKind::PullbackAmbiguity, "a known chord image is not on the image cubic");
        taken[k_best] = true;
    }
    std::optional<ProjVec<Real>> chord;
    for (std::size_t k = 0; k < meet.size(); ++k) {
        if (taken[k]) continue;
        if (chord && proj_distance<Real>(*chord, meet[k]) > Real(tol.dup))
            throw Error(ErrorKind::PullbackAmbiguity, "conic and image cubic leave more than one new chord");
        if (!chord) chord = meet[k];
    }
    if (!chord) throw Error(ErrorKind::PullbackAmbiguity, "conic and image cubic leave no new chord");

    const auto on_line = intersect_curves<Real>(f.poly, HomPoly<Real>::linear(chord->coords));
    std::optional<std::pair<ProjVec<Real>, ProjVec<Real>>> found;
    for (std::size_t a = 0; a < on_line.size(); ++a)
        for (std::size_t b = 0; b < on_line.size(); ++b) {
            if (a == b) continue;
            const ProjVec<Real> pa = normalize<Real>(on_line[a], 0.0), pb = normalize<Real>(on_line[b], 0.0);
            if (proj_distance<Real>(pa, pb) < Real(tol.dup)) continue;
            if (!(proj_distance<Real>(add<Real>(f, pa, beta), pb) < Real(tol.dup))) continue;
            if (found && proj_distance<Real>(found->first, pb) > Real(tol.dup))
                throw Error(ErrorKind::PullbackAmbiguity, "two chord pairs differ by beta");
            if (!found) found = std::make_pair(pa, pb);
        }
    if (!found) throw Error(ErrorKind::PullbackAmbiguity, "no two points on the chord differ by beta");
    if (find(found->first, pts) >= 0 || find(found->second, pts) >= 0 ||
        proj_distance<Real>(found->first, out.recovered[0]) < Real(tol.dup) ||
        proj_distance<Real>(found->second, out.recovered[0]) < Real(tol.dup))
        throw Error(ErrorKind::PullbackAmbiguity, "the pulled-back pair repeats a known point");
    const bool flip = lex_less<Real>(found->second, found->first);
    out.recovered[1] = flip ? found->second : found->first;
    out.recovered[2] = flip ? found->first : found->second;
    out.pairs[np++] = {10, 11};
    return out;
}

/// Lexicographically first seven point indices whose labels form an
/// Aronhold set.
template <class Real>
std::array<int, 7> select_aronhold(const LevelStructure<Real>& s) {
    const auto& lab = s.labeling;
    std::array<int, 7> cur{};
    auto rec = [&](auto&& self, int start, std::size_t depth) -> bool {
        if (depth == 7) return true;
        for (int i = start; i < static_cast<int>(lab.size()); ++i) {
            bool ok = true;
            for (std::size_t a = 0; a < depth && ok; ++a)
                for (std::size_t b = a + 1; b < depth && ok; ++b)
                    ok = theta::azygetic_triple(lab[static_cast<std::size_t>(cur[a])], lab[static_cast<std::size_t>(cur[b])],
                                                lab[static_cast<std::size_t>(i)]);
            if (!ok) continue;
            cur[depth] = i;
            if (self(self, i + 1, depth + 1)) return true;
        }
        return false;
    };
    if (!rec(rec, 0, 0)) throw Error(ErrorKind::InconsistentStructure, "labeling contains no Aronhold set");
    return cur;
}

/// Quartic with seven given bitangents forming an Aronhold set. In
/// coordinates where the first four lines are x, y, z, x + y + z the quartic
/// is (x u + y v - z w)^2 - 4 x y u v, with linear forms u, v, w fixed by
///   u + v + w + x + y + z = 0,
///   u / a1 + v / a2 + w / a3 + k_a (a1 x + a2 y + a3 z) = 0
/// for each of the last three lines a = (a1, a2, a3), a 12 x 12 linear system
/// in the coefficients of u, v, w and the three scalars k.
template <class Real>
HomPoly<Real> aronhold_quartic(const std::array<ProjVec<Real>, 7>& seven, const Tolerances& tol = {}) {
    using C = Complex<Real>;
    tol.validate();
    std::array<Vec3<Real>, 7> l;
    for (std::size_t i = 0; i < 7; ++i) {
        const ProjVec<Real> n = normalize<Real>(seven[i].as(Role::line), tol.geo);
        const Real nn = n.norm();
        for (std::size_t j = 0; j < 3; ++j) l[i][j] = n.coords[j] / nn;
    }
    for (std::size_t i = 0; i < 7; ++i)
        for (std::size_t j = i + 1; j < 7; ++j)
            for (std::size_t k = j + 1; k < 7; ++k)
                if (abs_of<Real>(det3<Real>(Mat3<Real>{l[i], l[j], l[k]})) < Real(tol.geo))
                    throw Error(ErrorKind::GeneralPositionFailure, "three of the seven lines are concurrent");

    // Lines transform by M^T when points transform by p = M p'. Choose
    // M^T = diag(d) L^{-1}, L with columns l1, l2, l3, so that l1, l2, l3 go
    // to the coordinate lines and l4 to (1, 1, 1).
    Mat3<Real> cols{};
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) cols[j][i] = l[i][j];
    const Mat3<Real> cinv = inverse<Real>(cols);
    const Vec3<Real> mu = apply<Real>(cinv, l[3]);
    Mat3<Real> mt{};
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) mt[i][j] = cinv[i][j] / mu[i];
    std::array<Vec3<Real>, 3> abc;
    for (std::size_t r = 0; r < 3; ++r) {
        abc[r] = apply<Real>(mt, l[4 + r]);
        for (const auto& c : abc[r])
            if (abs_of<Real>(c) < Real(tol.geo)) throw Error(ErrorKind::GeneralPositionFailure, "a line passes through a vertex");
    }

    // Unknowns: X[i][j] at 3 i + j (form i, coordinate j), then k_a, k_b, k_c.
    MatX<Real> a = MatX<Real>::Zero(12, 12);
    VecX<Real> rhs = VecX<Real>::Zero(12);
    for (int j = 0; j < 3; ++j) {
        for (int i = 0; i < 3; ++i) a(j, 3 * i + j) = C(Real(1));
        rhs(j) = C(Real(-1));
        for (int r = 0; r < 3; ++r) {
            const int row = 3 + 3 * r + j;
            for (int i = 0; i < 3; ++i) a(row, 3 * i + j) = C(Real(1)) / abc[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)];
            a(row, 9 + r) = abc[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)];
        }
    }
    Eigen::JacobiSVD<MatX<Real>> svd(a);
    const auto& sv = svd.singularValues();
    if (!(sv(11) > Real(tol.geo) * sv(0))) throw Error(ErrorKind::GeneralPositionFailure, "the linear system for u, v, w is singular");
    const VecX<Real> sol = a.partialPivLu().solve(rhs);
    std::array<HomPoly<Real>, 3> uvw;
    for (std::size_t i = 0; i < 3; ++i)
        uvw[i] = HomPoly<Real>::linear({sol(static_cast<Eigen::Index>(3 * i)), sol(static_cast<Eigen::Index>(3 * i + 1)),
                                        sol(static_cast<Eigen::Index>(3 * i + 2))});
    const C one(Real(1)), zero(Real(0));
    const HomPoly<Real> x = HomPoly<Real>::linear({one, zero, zero});
    const HomPoly<Real> y = HomPoly<Real>::linear({zero, one, zero});
    const HomPoly<Real> z = HomPoly<Real>::linear({zero, zero, one});
    const HomPoly<Real> inner = x * uvw[0] + y * uvw[1] - z * uvw[2];
    const HomPoly<Real> local = inner * inner - C(Real(4)) * (x * y * uvw[0] * uvw[1]);

    // Back to the input coordinates: q(p) = local(M^{-1} p), M^{-1} = (M^T)^{-T}.
    const Mat3<Real> minv = transpose<Real>(inverse<Real>(mt));
    const HomPoly<Real> q = local.compose(minv).normalized();

    if (!is_smooth<Real>(q, tol.geo)) throw Error(ErrorKind::NotAronhold, "the constructed quartic is singular");
    for (std::size_t i = 0; i < 7; ++i)
        if (!(bitangency_residual<Real>(q, seven[i]) < tol.sq))
            throw Error(ErrorKind::NotAronhold, "line " + std::to_string(i) + " is not a bitangent of the constructed quartic");
    return q;
}

template <class Real>
struct RefineResult {
    HomPoly<Real> quartic;
    int iterations = 0;
    double defect = 0.0;             ///< final norm of the stacked relative defects
    std::vector<double> residuals;   ///< per-line certificate residuals of the output
};

namespace detail {

/// Linear map from quartic coefficients to the restriction of a line, in
/// binary coordinates rotated so the leading coefficient is large.
template <class Real>
struct LineDefect {
    MatX<Real> map;  // 5 x 15
};

template <class Real>
LineDefect<Real> line_defect(const HomPoly<Real>& seed, const ProjVec<Real>& line) {
    const LineBasis<Real> basis = line_basis<Real>(line.as(Role::line));
    const BinaryQuartic<Real> b = restrict_to<Real>(seed, basis);
    std::array<Complex<Real>, 2> rot{};
    Real best(-1);
    for (const auto& cand : unitary_candidates<Real>()) {
        const Real v = abs_of<Real>(b(cand[0], cand[1]));
        if (v > best) {
            best = v;
            rot = cand;
        }
    }
    LineDefect<Real> out;
    out.map = MatX<Real>::Zero(5, 15);
    for (std::size_t m = 0; m < 15; ++m) {
        HomPoly<Real> mono(4);
        mono.coeffs()[m] = Complex<Real>(Real(1));
        const auto cp = unitary_substitute<Real, 5>(restrict_to<Real>(mono, basis).c, rot[0], rot[1]);
        for (std::size_t i = 0; i < 5; ++i) out.map(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) = cp[i];
    }
    return out;
}

/// b = c4 (s^2 + a s + beta)^2 fixes a and beta from c4, c3, c2; the two
/// remaining coefficients are the defect. Returns the defects and their
/// derivatives with respect to (c0, ..., c4).
template <class Real>
void square_defect(const VecX<Real>& cp, std::array<Complex<Real>, 2>& r, std::array<std::array<Complex<Real>, 5>, 2>& d) {
    using C = Complex<Real>;
    const C c0 = cp(0), c1 = cp(1), c2 = cp(2), c3 = cp(3), c4 = cp(4);
    const C two(Real(2)), three(Real(3)), four(Real(4)), eight(Real(8)), sixteen(Real(16)), sixtyfour(Real(64));
    const C dd = four * c4 * c2 - c3 * c3;
    r[0] = c1 - c2 * c3 / (two * c4) + c3 * c3 * c3 / (eight * c4 * c4);
    r[1] = c0 - dd * dd / (sixtyfour * c4 * c4 * c4);
    d[0] = {C(Real(0)), C(Real(1)), -c3 / (two * c4), -c2 / (two * c4) + three * c3 * c3 / (eight * c4 * c4),
            c2 * c3 / (two * c4 * c4) - c3 * c3 * c3 / (four * c4 * c4 * c4)};
    d[1] = {C(Real(1)), C(Real(0)), -dd / (eight * c4 * c4), dd * c3 / (sixteen * c4 * c4 * c4),
            -dd * c2 / (eight * c4 * c4 * c4) + three * dd * dd / (sixtyfour * c4 * c4 * c4 * c4)};
}

}  // namespace detail

/// Gauss-Newton on the square defects of all lines over the quartic
/// coefficients, with the largest seed coefficient frozen at 1. Stops when
/// a step no longer halves the defect.
template <class Real>
RefineResult<Real> refine(const HomPoly<Real>& seed_in, const std::vector<ProjVec<Real>>& lines, const Tolerances& tol = {},
                          int max_iterations = 100) {
    if (seed_in.degree() != 4) throw Error(ErrorKind::InvalidArgument, "refine needs a quartic");
    if (lines.empty()) throw Error(ErrorKind::InvalidArgument, "refine needs lines");
    const HomPoly<Real> seed = seed_in.normalized();
    std::size_t gauge = 0;
    for (std::size_t m = 1; m < 15; ++m)
        if (abs_of<Real>(seed.coeffs()[m]) > abs_of<Real>(seed.coeffs()[gauge])) gauge = m;

    std::vector<detail::LineDefect<Real>> defs;
    for (const auto& l : lines) defs.push_back(detail::line_defect<Real>(seed, l));
    const auto nl = static_cast<Eigen::Index>(lines.size());

    VecX<Real> c(15);
    for (std::size_t m = 0; m < 15; ++m) c(static_cast<Eigen::Index>(m)) = seed.coeffs()[m];

    auto evaluate = [&](const VecX<Real>& coeffs, VecX<Real>& res, MatX<Real>* jac) {
        res.resize(2 * nl);
        if (jac) jac->resize(2 * nl, 14);
        for (Eigen::Index k = 0; k < nl; ++k) {
            const auto& map = defs[static_cast<std::size_t>(k)].map;
            const VecX<Real> cp = map * coeffs;
            const Real scale = cp.norm();
            std::array<Complex<Real>, 2> r{};
            std::array<std::array<Complex<Real>, 5>, 2> d{};
            detail::square_defect<Real>(cp, r, d);
            for (std::size_t t = 0; t < 2; ++t) {
                res(2 * k + static_cast<Eigen::Index>(t)) = r[t] / scale;
                if (!jac) continue;
                Eigen::Index col = 0;
                for (Eigen::Index m = 0; m < 15; ++m) {
                    if (static_cast<std::size_t>(m) == gauge) continue;
                    Complex<Real> acc(Real(0));
                    for (Eigen::Index i = 0; i < 5; ++i) acc += d[t][static_cast<std::size_t>(i)] * map(i, m);
                    (*jac)(2 * k + static_cast<Eigen::Index>(t), col++) = acc / scale;
                }
            }
        }
    };

    RefineResult<Real> out;
    VecX<Real> res;
    MatX<Real> jac;
    evaluate(c, res, &jac);
    Real norm = res.norm();
    for (;;) {
        if (out.iterations >= max_iterations) throw Error(ErrorKind::NoConvergence, "refinement did not converge in " + std::to_string(max_iterations) + " iterations");
        if (norm == Real(0)) break;
        ++out.iterations;
        const VecX<Real> step = jac.colPivHouseholderQr().solve(-res);
        VecX<Real> trial = c;
        Eigen::Index col = 0;
        for (Eigen::Index m = 0; m < 15; ++m) {
            if (static_cast<std::size_t>(m) == gauge) continue;
            trial(m) += step(col++);
        }
        VecX<Real> tres;
        evaluate(trial, tres, nullptr);
        const Real tnorm = tres.norm();
        if (!(tnorm < norm)) break;
        const bool stalled = !(tnorm < norm / Real(2));
        c = trial;
        norm = tnorm;
        if (stalled) break;
        evaluate(c, res, &jac);
    }
    std::vector<Complex<Real>> coeffs(15);
    for (std::size_t m = 0; m < 15; ++m) coeffs[m] = c(static_cast<Eigen::Index>(m));
    out.quartic = HomPoly<Real>(4, std::move(coeffs)).normalized();
    out.defect = to_double(norm);
    for (const auto& l : lines) out.residuals.push_back(bitangency_residual<Real>(out.quartic, l));
    const double worst = *std::max_element(out.residuals.begin(), out.residuals.end());
    if (!(worst < tol.sq))
        throw Error(ErrorKind::NoConvergence, "refinement stalled with a bitangency residual of " + std::to_string(worst));
    return out;
}

template <class Real>
struct Configuration {
    std::size_t tuple = 0;
    CubicCurve<Real> cubic;
    ProjVec<Real> beta;
    HomPoly<Real> image_cubic;
    double image_residual = 0.0;
    ConicFit<Real> conic;
};

template <class Real>
struct ReconstructionReport {
    std::vector<ProjVec<Real>> input_lines;
    LevelStructure<Real> structure;
    std::vector<PairingReport<Real>> pairings;
    DetectStats detect_stats;
    std::optional<Configuration<Real>> configuration;  ///< absent when every tuple cubic is singular
    std::array<int, 7> aronhold{};
    HomPoly<Real> seed_quartic;
    HomPoly<Real> refined_quartic;
    std::vector<double> seed_residuals;
    std::vector<double> residuals;
    int refine_iterations = 0;
    std::optional<double> comparison;
};

struct ReconstructOptions {
    Tolerances tol{};
    unsigned threads = 1;
};

/// Plane data of the first tuple (by member indices) whose cubic is smooth.
template <class Real>
std::optional<Configuration<Real>> configuration_of(const LevelStructure<Real>& s, const std::vector<PairingReport<Real>>& pairings) {
    for (std::size_t u = 0; u < s.tuples.size(); ++u) {
        if (!pairings[u].geometric) continue;
        Configuration<Real> cfg;
        cfg.tuple = u;
        cfg.cubic = s.tuples[u].cubic;
        cfg.beta = pairings[u].beta.beta;
        cfg.conic = pairings[u].conic;
        const auto e = image_cubic<Real>(cfg.cubic, cfg.beta);
        cfg.image_cubic = e.curve;
        cfg.image_residual = e.residual;
        return cfg;
    }
    return std::nullopt;
}

/// The quartic from its 28 bitangents: tuples and level structure from the
/// dual points, an Aronhold set read off the labels, the classical quartic
/// through it, and a refinement against all 28 lines.
template <class Real>
ReconstructionReport<Real> reconstruct(const std::vector<ProjVec<Real>>& lines, const ReconstructOptions& opt = {},
                                       const HomPoly<Real>* reference = nullptr) {
    opt.tol.validate();
    const auto mc = theta::model_constants();
    if (static_cast<int>(lines.size()) != mc.odd)
        throw Error(ErrorKind::TupleCountMismatch, "reconstruction needs 28 lines", static_cast<long>(lines.size()));
    ReconstructionReport<Real> r;
    std::vector<ProjVec<Real>> points;
    for (const auto& l : lines) {
        r.input_lines.push_back(normalize<Real>(l.as(Role::line), opt.tol.geo));
        points.push_back(r.input_lines.back().as(Role::point));
    }
    DetectOptions dopt;
    dopt.tol = opt.tol;
    dopt.threads = opt.threads;
    auto tuples = detect_tuples<Real>(points, dopt, &r.detect_stats);
    r.structure = build_structure<Real>(points, std::move(tuples));
    for (std::size_t u = 0; u < r.structure.tuples.size(); ++u) r.pairings.push_back(extract_pairing<Real>(r.structure, u));
    r.configuration = configuration_of<Real>(r.structure, r.pairings);

    r.aronhold = select_aronhold<Real>(r.structure);
    std::array<ProjVec<Real>, 7> seven;
    for (std::size_t i = 0; i < 7; ++i) seven[i] = r.input_lines[static_cast<std::size_t>(r.aronhold[i])];
    r.seed_quartic = aronhold_quartic<Real>(seven, opt.tol);
    for (const auto& l : r.input_lines) r.seed_residuals.push_back(bitangency_residual<Real>(r.seed_quartic, l));
    const auto ref = refine<Real>(r.seed_quartic, r.input_lines, opt.tol);
    r.refined_quartic = ref.quartic;
    r.residuals = ref.residuals;
    r.refine_iterations = ref.iterations;
    if (reference) r.comparison = compare_proportional<Real>(r.refined_quartic, *reference);
    return r;
}

}  // namespace bitan
