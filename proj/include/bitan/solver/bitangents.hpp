#pragma once

#include <algorithm>
#include <array>
#include <string>
#include <type_traits>
#include <vector>

#include "bitan/core/error.hpp"
#include "bitan/core/fit.hpp"
#include "bitan/core/hompoly.hpp"
#include "bitan/core/projvec.hpp"
#include "bitan/core/random.hpp"
#include "bitan/core/scalar.hpp"
#include "bitan/core/singular.hpp"
#include "bitan/solver/homotopy.hpp"
#include "bitan/solver/square.hpp"

namespace bitan {

template <class Real>
struct Bitangent {
    ProjVec<Real> line;                      ///< normalized, role line
    std::array<ProjVec<Real>, 2> contact{};  ///< normalized points, equal for a hyperflex
    double certificate = 0.0;                ///< relative square-certificate residual
    std::array<Complex<Real>, 3> square_root{};
    LineBasis<Real> basis;                   ///< parameterization the square root refers to

    template <class R2>
    Bitangent<R2> cast() const {
        Bitangent<R2> out;
        out.line = line.template cast<R2>();
        for (std::size_t i = 0; i < 2; ++i) out.contact[i] = contact[i].template cast<R2>();
        out.certificate = certificate;
        for (std::size_t i = 0; i < 3; ++i) out.square_root[i] = from_cdouble<R2>(to_cdouble(square_root[i]));
        out.basis.p0 = ProjVec<Real>(basis.p0).template cast<R2>().coords;
        out.basis.p1 = ProjVec<Real>(basis.p1).template cast<R2>().coords;
        return out;
    }
};

struct SolveProvenance {
    std::string precision = "binary64";
    int attempts = 0;
    int paths = 0;
    int failed_paths = 0;
};

template <class Real>
struct BitangentSet {
    HomPoly<Real> quartic;
    std::vector<Bitangent<Real>> lines;
    SolveProvenance provenance;

    std::vector<ProjVec<Real>> line_vectors() const {
        std::vector<ProjVec<Real>> out;
        for (const auto& b : lines) out.push_back(b.line);
        return out;
    }
};

template <class Real>
bool is_smooth(const HomPoly<Real>& q, double tol_geo = 1e-8) {
    return singularity_measure<Real>(q) > tol_geo;
}

namespace detail {

template <class Real>
std::optional<Bitangent<Real>> certify_line(const HomPoly<Real>& q, const ProjVec<Real>& raw, const Tolerances& tol) {
    ProjVec<Real> line;
    try {
        line = normalize<Real>(raw.as(Role::line), tol.geo);
    } catch (const Error&) {
        return std::nullopt;
    }
    const Restriction<Real> res = restrict<Real>(q, line);
    if (res.b.is_zero()) return std::nullopt;
    const auto cert = square_certificate<Real>(res.b, tol.sq);
    if (!cert) return std::nullopt;
    Bitangent<Real> bt;
    bt.line = line;
    bt.certificate = cert->residual;
    bt.square_root = cert->root;
    bt.basis = res.basis;
    for (std::size_t k = 0; k < 2; ++k) {
        const Vec3<Real> p = res.basis.point(cert->zeros[k][0], cert->zeros[k][1]);
        bt.contact[k] = normalize<Real>(ProjVec<Real>(p, Role::point), 0.0);
    }
    return bt;
}

template <class Real>
std::vector<Bitangent<Real>> solve_once(const HomPoly<Real>& q, const Tolerances& tol, const homotopy::TrackOptions& opt,
                                        std::uint64_t detour_seed, SolveProvenance& prov) {
    using namespace homotopy;
    const StartSystem<Real>& st = start_system<Real>();
    std::vector<Segment<Real>> legs;
    if (detour_seed == 0) {
        legs.emplace_back(st.quartic, q);
    } else {
        Rng rng(detour_seed);
        std::vector<Complex<Real>> c(15);
        for (auto& x : c) x = rng.complex<Real>();
        const HomPoly<Real> mid = HomPoly<Real>(4, std::move(c)).unit();
        legs.emplace_back(st.quartic, mid);
        legs.emplace_back(mid, q);
    }
    std::vector<Bitangent<Real>> found;
    for (const auto& x0 : st.solutions) {
        State<Real> x = x0;
        ++prov.paths;
        bool ok = true;
        for (const auto& leg : legs) ok = ok && track<Real>(leg, x, opt);
        if (!ok) {
            ++prov.failed_paths;
            continue;
        }
        const ProjVec<Real> raw(line_of<Real>(x), Role::line);
        const auto bt = certify_line<Real>(q, raw, tol);
        if (!bt) {
            ++prov.failed_paths;
            continue;
        }
        const bool dup = std::any_of(found.begin(), found.end(), [&](const Bitangent<Real>& o) {
            return proj_distance<Real>(o.line, bt->line) < Real(tol.dup);
        });
        if (!dup) found.push_back(*bt);
    }
    return found;
}

}  // namespace detail

/// All 28 bitangents of a smooth quartic. Lines come from a parameter
/// homotopy and are accepted only after the square certificate of the
/// exact restriction passes; a short count is retried along a detour path
/// with tighter steps and then, for binary64 callers, in quad precision.
template <class Real>
BitangentSet<Real> bitangents(const HomPoly<Real>& q_in, const Tolerances& tol = {}) {
    tol.validate();
    if (q_in.degree() != 4) throw Error(ErrorKind::InvalidArgument, "bitangents need a quartic");
    if (q_in.is_zero()) throw Error(ErrorKind::ZeroVector, "zero quartic");
    if (!is_smooth<Real>(q_in, tol.geo)) throw Error(ErrorKind::NotSmooth, "the quartic is singular");
    const HomPoly<Real> q = q_in.unit();

    BitangentSet<Real> out;
    out.quartic = q_in;
    out.provenance.precision = ScalarTraits<Real>::name;

    homotopy::TrackOptions opt;
    if constexpr (!std::is_same_v<Real, double>) opt.corrector_tol = 1e-20;
    std::vector<Bitangent<Real>> best;
    const std::array<std::uint64_t, 2> detours{0, 0x64657475ULL};
    for (std::size_t attempt = 0; attempt < detours.size(); ++attempt) {
        ++out.provenance.attempts;
        if (attempt > 0) {
            opt.max_step /= 4;
            opt.initial_step /= 4;
        }
        auto found = detail::solve_once<Real>(q, tol, opt, detours[attempt], out.provenance);
        if (found.size() == 28) {
            best = std::move(found);
            break;
        }
        if (found.size() > best.size()) best = std::move(found);
    }
    if (best.size() != 28) {
        if constexpr (std::is_same_v<Real, double>) {
            const auto ext = bitangents<Quad>(q_in.template cast<Quad>(), tol);
            out.provenance.attempts += ext.provenance.attempts;
            out.provenance.paths += ext.provenance.paths;
            out.provenance.failed_paths += ext.provenance.failed_paths;
            out.provenance.precision = ext.provenance.precision;
            best.clear();
            for (const auto& b : ext.lines) {
                auto bd = b.template cast<double>();
                bd.line = normalize<double>(bd.line, 0.0);
                bd.certificate = square_certificate<double>(restrict_to<double>(q_in, bd.basis), 1.0)->residual;
                best.push_back(bd);
            }
        } else {
            throw Error(ErrorKind::CountMismatch,
                        "found " + std::to_string(best.size()) + " certified bitangents instead of 28",
                        static_cast<long>(best.size()));
        }
    }
    std::sort(best.begin(), best.end(),
              [](const Bitangent<Real>& a, const Bitangent<Real>& b) { return lex_less<Real>(a.line, b.line); });
    out.lines = std::move(best);
    return out;
}

template <class Real>
BitangentSet<Real> bitangents(const HomPoly<Real>& q, const Precision& prec) {
    if (prec.mode == PrecisionMode::extended && std::is_same_v<Real, double>) {
        const auto ext = bitangents<Quad>(q.template cast<Quad>(), prec.tol);
        BitangentSet<Real> out;
        out.quartic = q;
        out.provenance = ext.provenance;
        for (const auto& b : ext.lines) out.lines.push_back(b.template cast<Real>());
        return out;
    }
    return bitangents<Real>(q, prec.tol);
}

/// 1 iff the eight contact points of four bitangents lie on a conic.
template <class Real>
bool syzygetic_test(const std::array<Bitangent<Real>, 4>& four, double tol_geo = 1e-8, double tol_dup = 1e-6) {
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j)
            if (proj_distance<Real>(four[i].line, four[j].line) < Real(tol_dup))
                throw Error(ErrorKind::InvalidArgument, "syzygetic test needs four distinct bitangents");
    std::vector<ProjVec<Real>> pts;
    for (const auto& b : four)
        for (const auto& c : b.contact) pts.push_back(c);
    try {
        const auto fit = nullspace_fit<Real>(pts, 2, tol_geo);
        return fit.residual < tol_geo;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::RankDeficient) return true;
        throw;
    }
}

}  // namespace bitan
