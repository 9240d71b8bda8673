#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bitan/core/error.hpp"
#include "bitan/core/hompoly.hpp"
#include "bitan/core/projvec.hpp"
#include "bitan/core/random.hpp"
#include "bitan/core/scalar.hpp"
#include "bitan/cubic/cubic.hpp"
#include "bitan/theta/theta_f2.hpp"

namespace bitan {

struct DetectOptions {
    Tolerances tol{};
    unsigned threads = 1;
    std::uint64_t seed = 0x74757031ULL;
    int samples_per_visit = 48;  ///< random 7-subsets tried per pair per round
    long max_stale = 250000;     ///< fits without a new tuple before the search gives up
    double screen = 1e-6;        ///< loose incidence screen applied before the refit
};

struct DetectStats {
    long fits = 0;
    int rounds = 0;
    int candidates = 0;           ///< distinct twelve-point cubics found
    int rejected_reducible = 0;   ///< ... whose cubic is reducible
    int rejected_singular = 0;    ///< ... whose cubic is irreducible but singular
    int rejected_unpaired = 0;    ///< ... smooth, but no 2-torsion translation permutes the twelve points
    int derived = 0;              ///< tuples implied by the coordinates of known tuples, then verified
    int singular_tuples = 0;      ///< accepted tuples whose cubic is singular
};

using IndexPair = std::pair<int, int>;
using Partition = std::array<IndexPair, 6>;

template <class Real>
struct DetectedTuple {
    std::array<int, 12> members{};
    std::uint32_t mask = 0;
    CubicCurve<Real> cubic;
    double residual = 0.0;  ///< largest member incidence against the refitted cubic
    double margin = 0.0;    ///< 13th-smallest incidence over the 12th
    std::optional<Partition> pairs;

    bool contains(int i) const { return (mask >> i) & 1u; }
};

namespace detail {

template <class Real>
using Row10 = Eigen::Matrix<Complex<Real>, 10, 1>;

template <class Real>
struct Candidate {
    std::uint32_t mask = 0;
    Row10<Real> cubic;
    double residual = 0.0;
    double margin = 0.0;
};

template <class Real>
class TupleSearch {
public:
    TupleSearch(const std::vector<ProjVec<Real>>& pts, const DetectOptions& opt) : opt_(opt) {
        for (const auto& p : pts) {
            const auto r = incidence_row<Real>(3, p.coords);
            Row10<Real> row;
            for (int i = 0; i < 10; ++i) row(i) = r[static_cast<std::size_t>(i)];
            rows_.push_back(row);
        }
    }

    std::size_t size() const { return rows_.size(); }
    const DetectOptions& options() const { return opt_; }

    /// Cubic through nine points, then the incidence count over all points.
    std::optional<Candidate<Real>> try_fit(const std::array<int, 9>& idx) const {
        using C = Complex<Real>;
        Eigen::Matrix<C, 10, 9> m;
        for (int k = 0; k < 9; ++k) m.col(k) = rows_[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])].conjugate();
        const Eigen::HouseholderQR<Eigen::Matrix<C, 10, 9>> qr(m);
        const Eigen::Matrix<C, 10, 10> q = qr.householderQ();
        const Row10<Real> c = q.col(9);
        std::vector<int> near;
        for (std::size_t k = 0; k < rows_.size(); ++k)
            if (to_double(abs_of<Real>(rows_[k].dot(c.conjugate()))) < opt_.screen) near.push_back(static_cast<int>(k));
        if (near.size() < 12) return std::nullopt;
        return refine(near);
    }

    /// Least-squares cubic through the given points and the twelve points
    /// closest to it, if exactly twelve are incident with a clear margin.
    std::optional<Candidate<Real>> refine(const std::vector<int>& near) const {
        using C = Complex<Real>;
        Eigen::Matrix<C, Eigen::Dynamic, 10> a(static_cast<Eigen::Index>(near.size()), 10);
        for (std::size_t r = 0; r < near.size(); ++r) a.row(static_cast<Eigen::Index>(r)) = rows_[static_cast<std::size_t>(near[r])].transpose();
        const Eigen::JacobiSVD<Eigen::Matrix<C, Eigen::Dynamic, 10>> svd(a, Eigen::ComputeFullV);
        const Row10<Real> c = svd.matrixV().col(9);
        std::vector<std::pair<double, int>> res;
        for (std::size_t k = 0; k < rows_.size(); ++k)
            res.emplace_back(to_double(abs_of<Real>(rows_[k].transpose() * c)), static_cast<int>(k));
        std::sort(res.begin(), res.end());
        int on = 0;
        while (on < static_cast<int>(res.size()) && res[static_cast<std::size_t>(on)].first < opt_.tol.geo) ++on;
        if (on < 12) return std::nullopt;
        if (on > 12) throw Error(ErrorKind::ExcessIncidence, std::to_string(on) + " points lie on one cubic", on);
        Candidate<Real> out;
        out.cubic = c;
        out.residual = res[11].first;
        const double next = res.size() > 12 ? res[12].first : 1.0;
        out.margin = next / std::max(out.residual, 1e-300);
        if (!(out.margin > 10.0))
            throw Error(ErrorKind::ExcessIncidence, "a thirteenth point nearly lies on a tuple cubic", 13);
        for (int k = 0; k < 12; ++k) out.mask |= std::uint32_t{1} << res[static_cast<std::size_t>(k)].second;
        return out;
    }

private:
    DetectOptions opt_;
    std::vector<Row10<Real>> rows_;
};

inline std::uint64_t mix_seed(std::uint64_t seed, int i, int j, int visit) {
    std::uint64_t x = seed ^ (static_cast<std::uint64_t>(i) << 40) ^ (static_cast<std::uint64_t>(j) << 20) ^
                      static_cast<std::uint64_t>(visit);
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    return x;
}

/// Pairs of a tuple by translation with the 2-torsion point that maps its
/// twelve points onto themselves.
template <class Real>
std::optional<Partition> geometric_partition(const std::vector<ProjVec<Real>>& pts, const DetectedTuple<Real>& t) {
    if (t.cubic.classification != CubicClass::smooth) return std::nullopt;
    std::optional<Partition> result;
    for (const auto& tor : two_torsion<Real>(t.cubic)) {
        std::array<int, 32> partner{};
        partner.fill(-1);
        bool ok = true;
        for (int a : t.members) {
            const auto img = add<Real>(t.cubic, pts[static_cast<std::size_t>(a)], tor);
            int hit = -1;
            for (int b : t.members)
                if (b != a && proj_distance<Real>(img, pts[static_cast<std::size_t>(b)]) < Real(t.cubic.tol_dup)) hit = b;
            if (hit < 0) {
                ok = false;
                break;
            }
            partner[static_cast<std::size_t>(a)] = hit;
        }
        if (!ok) continue;
        Partition p{};
        std::size_t np = 0;
        for (int a : t.members) {
            const int b = partner[static_cast<std::size_t>(a)];
            if (partner[static_cast<std::size_t>(b)] != a) ok = false;
            if (a < b && np < 6) p[np++] = {a, b};
        }
        if (!ok || np != 6) continue;
        if (result) return std::nullopt;
        result = p;
    }
    return result;
}

template <class Real>
DetectedTuple<Real> to_tuple(const Candidate<Real>& c, int n, const DetectOptions& opt) {
    DetectedTuple<Real> t;
    t.mask = c.mask;
    int k = 0;
    for (int i = 0; i < n; ++i)
        if ((c.mask >> i) & 1u) t.members[static_cast<std::size_t>(k++)] = i;
    std::vector<Complex<Real>> coeffs(c.cubic.data(), c.cubic.data() + 10);
    t.cubic = make_cubic<Real>(HomPoly<Real>(3, std::move(coeffs)), opt.tol.geo, opt.tol.dup);
    t.residual = c.residual;
    t.margin = c.margin;
    return t;
}

/// Greedy symplectic basis e1, f1, e2, f2, e3, f3 of a 63-element pairing.
template <class Pair>
std::optional<std::array<std::size_t, 6>> symplectic_basis(std::size_t count, Pair pair) {
    std::vector<std::size_t> pool(count);
    for (std::size_t i = 0; i < count; ++i) pool[i] = i;
    std::array<std::size_t, 6> basis{};
    for (std::size_t k = 0; k < 3; ++k) {
        if (pool.empty()) return std::nullopt;
        const std::size_t e = pool.front();
        auto it = std::find_if(pool.begin(), pool.end(), [&](std::size_t f) { return pair(e, f) == 1; });
        if (it == pool.end()) return std::nullopt;
        const std::size_t f = *it;
        basis[2 * k] = e;
        basis[2 * k + 1] = f;
        std::vector<std::size_t> next;
        for (std::size_t x : pool)
            if (pair(x, e) == 0 && pair(x, f) == 0) next.push_back(x);
        pool = std::move(next);
    }
    return basis;
}

/// Tuples implied by the known ones. Known tuples get F2 coordinates from a
/// symplectic basis of their intersection pairing. For known u, v and each
/// point b on both, {partner_u(b), partner_v(b)} is a pair of the tuple with
/// coordinates c(u) + c(v). A coordinate class that collects six disjoint
/// pairs is accepted as a tuple only if its twelve points lie on a cubic
/// containing no other input point.
template <class Real>
int close_under_sums(std::vector<DetectedTuple<Real>>& found, std::vector<std::uint32_t>& masks, const TupleSearch<Real>& search,
                     int n, int syzygetic, int azygetic) {
    const auto pair_id = [n](int a, int b) { return static_cast<std::size_t>(std::min(a, b) * n + std::max(a, b)); };
    auto fail = [](const char* why) { throw Error(ErrorKind::InconsistentStructure, why); };
    int added = 0;
    for (bool changed = true; changed;) {
        changed = false;
        const std::size_t nk = found.size();
        auto pairing = [&](std::size_t u, std::size_t v) {
            if (u == v) return 0;
            const int k = std::popcount(found[u].mask & found[v].mask);
            if (k == azygetic) return 1;
            if (k != syzygetic) fail("two tuples meet in an impossible number of points");
            return 0;
        };
        // Six tuples with independent pairing rows form a basis; pairing
        // against them is an injective linear coordinate map.
        std::vector<std::size_t> basis;
        std::vector<std::vector<std::uint8_t>> rows;
        for (std::size_t u = 0; u < nk && basis.size() < 6; ++u) {
            std::vector<std::uint8_t> r(nk);
            for (std::size_t v = 0; v < nk; ++v) r[v] = static_cast<std::uint8_t>(pairing(u, v));
            for (const auto& e : rows) {
                const auto lead = static_cast<std::size_t>(std::find(e.begin(), e.end(), 1) - e.begin());
                if (r[lead])
                    for (std::size_t v = 0; v < nk; ++v) r[v] ^= e[v];
            }
            if (std::find(r.begin(), r.end(), 1) == r.end()) continue;
            rows.push_back(std::move(r));
            basis.push_back(u);
        }
        if (basis.size() < 6) return added;
        std::vector<unsigned> coord(nk, 0);
        std::vector<int> owner(64, -1);
        for (std::size_t u = 0; u < nk; ++u) {
            for (std::size_t k = 0; k < 6; ++k)
                if (pairing(u, basis[k])) coord[u] |= 1u << k;
            if (coord[u] == 0 || owner[coord[u]] >= 0) fail("tuple coordinates are not injective");
            owner[coord[u]] = static_cast<int>(u);
        }
        std::vector<int> cls(static_cast<std::size_t>(n * n), -1);
        auto assign = [&](int a, int b, unsigned c) {
            if (a == b) fail("tuple sum is degenerate");
            int& slot = cls[pair_id(a, b)];
            if (slot >= 0 && slot != static_cast<int>(c)) fail("a pair of points lies in two tuple classes");
            slot = static_cast<int>(c);
        };
        std::vector<std::array<int, 32>> partner(nk);
        for (std::size_t u = 0; u < nk; ++u) {
            partner[u].fill(-1);
            for (const auto& [a, b] : *found[u].pairs) {
                partner[u][static_cast<std::size_t>(a)] = b;
                partner[u][static_cast<std::size_t>(b)] = a;
                assign(a, b, coord[u]);
            }
        }
        for (std::size_t u = 0; u < nk; ++u)
            for (std::size_t v = u + 1; v < nk; ++v) {
                const std::uint32_t common = found[u].mask & found[v].mask;
                for (int b = 0; b < n; ++b)
                    if ((common >> b) & 1u)
                        assign(partner[u][static_cast<std::size_t>(b)], partner[v][static_cast<std::size_t>(b)], coord[u] ^ coord[v]);
            }
        std::vector<std::vector<IndexPair>> groups(64);
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                if (cls[pair_id(a, b)] >= 0) groups[static_cast<std::size_t>(cls[pair_id(a, b)])].emplace_back(a, b);
        for (unsigned c = 1; c < 64; ++c) {
            const auto& g = groups[c];
            if (g.size() > 6) fail("more than six pairs share a tuple class");
            if (owner[c] >= 0 || g.size() != 6) continue;
            std::uint32_t mask = 0;
            for (const auto& [a, b] : g) mask |= (std::uint32_t{1} << a) | (std::uint32_t{1} << b);
            if (std::popcount(mask) != 12) fail("pairs of one tuple class overlap");
            std::vector<int> idx;
            for (int b = 0; b < n; ++b)
                if ((mask >> b) & 1u) idx.push_back(b);
            const auto cand = search.refine(idx);
            if (!cand || cand->mask != mask) fail("an implied tuple does not lie on a cubic");
            auto tup = to_tuple<Real>(*cand, n, search.options());
            Partition part{};
            std::copy(g.begin(), g.end(), part.begin());
            tup.pairs = part;
            if (std::find(masks.begin(), masks.end(), mask) == masks.end()) masks.push_back(mask);
            found.push_back(std::move(tup));
            ++added;
            changed = true;
        }
    }
    return added;
}

inline bool covered(std::uint32_t mask, const std::vector<std::uint32_t>& known) {
    return std::any_of(known.begin(), known.end(), [&](std::uint32_t t) { return (mask & ~t) == 0; });
}

}  // namespace detail

/// The 63 twelve-point subsets lying on a cubic. For a pair {i,j} of points,
/// cubics through i, j and seven further points are fitted and the points on
/// them counted; sampling for the pair stops once it lies in as many found
/// tuples as the theta model prescribes. A twelve-point cubic counts as a
/// tuple only if it is smooth and translation by one of its 2-torsion points
/// permutes the twelve points; special quartics have other twelve-point
/// cubics that fail this. Sample streams are seeded by
/// (pair, visit), so the result does not depend on the thread count.
template <class Real>
std::vector<DetectedTuple<Real>> detect_tuples(const std::vector<ProjVec<Real>>& points, const DetectOptions& opt = {},
                                               DetectStats* stats = nullptr) {
    opt.tol.validate();
    const int n = static_cast<int>(points.size());
    if (n < 12 || n > 32) throw Error(ErrorKind::InvalidArgument, "tuple detection needs between 12 and 32 points");
    std::vector<ProjVec<Real>> pts;
    for (const auto& p : points) pts.push_back(normalize<Real>(p.as(Role::point), opt.tol.geo));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (proj_distance<Real>(pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(j)]) < Real(opt.tol.dup))
                throw Error(ErrorKind::InvalidArgument, "input points are not pairwise distinct");

    const detail::TupleSearch<Real> search(pts, opt);
    const int target = theta::tuples_per_pair();
    const auto mc = theta::model_constants();
    std::vector<DetectedTuple<Real>> found;
    std::vector<std::uint32_t> masks;
    std::vector<std::vector<int>> pair_count(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), 0));
    std::vector<std::vector<int>> visits = pair_count;
    DetectStats st;
    long stale = 0;

    for (;;) {
        std::vector<IndexPair> todo;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (pair_count[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] < target) todo.emplace_back(i, j);
        if (todo.empty() || stale >= opt.max_stale) break;
        ++st.rounds;

        const unsigned nthreads = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(todo.size())));
        std::vector<std::vector<detail::Candidate<Real>>> local(nthreads);
        std::vector<long> fits(nthreads, 0);
        std::vector<std::exception_ptr> errors(nthreads);
        auto work = [&](unsigned tid) {
            try {
                for (std::size_t w = tid; w < todo.size(); w += nthreads) {
                    const auto [i, j] = todo[w];
                    Rng rng(detail::mix_seed(opt.seed, i, j, visits[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]));
                    std::vector<int> others;
                    for (int k = 0; k < n; ++k)
                        if (k != i && k != j) others.push_back(k);
                    std::vector<std::uint32_t> seen = masks;
                    for (const auto& c : local[tid]) seen.push_back(c.mask);
                    for (int s = 0; s < opt.samples_per_visit; ++s) {
                        std::array<int, 9> idx{i, j};
                        for (std::size_t k = 0; k < 7; ++k) {
                            const std::size_t pick = k + static_cast<std::size_t>(rng.index(others.size() - k));
                            std::swap(others[k], others[pick]);
                            idx[k + 2] = others[k];
                        }
                        std::uint32_t m = 0;
                        for (int x : idx) m |= std::uint32_t{1} << x;
                        if (detail::covered(m, seen)) continue;
                        ++fits[tid];
                        auto cand = search.try_fit(idx);
                        if (!cand || std::find(seen.begin(), seen.end(), cand->mask) != seen.end()) continue;
                        seen.push_back(cand->mask);
                        local[tid].push_back(*cand);
                    }
                }
            } catch (...) {
                errors[tid] = std::current_exception();
            }
        };
        if (nthreads == 1) {
            work(0);
        } else {
            std::vector<std::thread> pool;
            for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(work, t);
            for (auto& th : pool) th.join();
        }
        for (const auto& e : errors)
            if (e) std::rethrow_exception(e);
        for (const auto& [i, j] : todo) ++visits[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];

        bool fresh = false;
        for (unsigned t = 0; t < nthreads; ++t) {
            st.fits += fits[t];
            stale += fits[t];
            for (const auto& c : local[t]) {
                if (std::find(masks.begin(), masks.end(), c.mask) != masks.end()) continue;
                masks.push_back(c.mask);
                ++st.candidates;
                auto tup = detail::to_tuple<Real>(c, n, opt);
                if (tup.cubic.classification == CubicClass::reducible) {
                    ++st.rejected_reducible;
                    continue;
                }
                if (tup.cubic.classification == CubicClass::nodal) {
                    ++st.rejected_singular;
                    continue;
                }
                tup.pairs = detail::geometric_partition<Real>(pts, tup);
                if (!tup.pairs) {
                    ++st.rejected_unpaired;
                    continue;
                }
                fresh = true;
                found.push_back(std::move(tup));
            }
        }
        if (n == mc.odd) {
            const int added = detail::close_under_sums<Real>(found, masks, search, n, mc.syz_intersection, mc.azy_intersection);
            st.derived += added;
            fresh = fresh || added > 0;
        }
        for (auto& row : pair_count) std::fill(row.begin(), row.end(), 0);
        for (const auto& t : found)
            for (int a = 0; a < n; ++a)
                for (int b = a + 1; b < n; ++b)
                    if (t.contains(a) && t.contains(b)) ++pair_count[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
        if (fresh) stale = 0;
    }
    for (const auto& t : found) st.singular_tuples += t.cubic.classification == CubicClass::smooth ? 0 : 1;
    if (stats) *stats = st;

    const int expected = mc.two_torsion;
    if (static_cast<int>(found.size()) != expected) {
        const std::string msg = "found " + std::to_string(found.size()) + " tuples instead of " + std::to_string(expected);
        if (static_cast<int>(found.size()) < expected && st.rejected_reducible + st.rejected_singular > 0)
            throw Error(ErrorKind::DegenerateConfiguration, msg + "; some twelve-point cubics are singular",
                        static_cast<long>(found.size()));
        throw Error(ErrorKind::TupleCountMismatch, msg, static_cast<long>(found.size()));
    }
    std::sort(found.begin(), found.end(),
              [](const DetectedTuple<Real>& a, const DetectedTuple<Real>& b) { return a.members < b.members; });
    return found;
}

template <class Real>
struct LevelStructure {
    std::vector<ProjVec<Real>> points;
    std::vector<DetectedTuple<Real>> tuples;
    std::vector<std::vector<std::uint8_t>> pairing_matrix;  ///< 1 iff the tuples meet in the azygetic number of points
    std::vector<theta::ThetaLabel> labeling;                ///< point index -> odd label
    std::vector<theta::TwoTorsion> tuple_class;             ///< tuple index -> class
    std::vector<bool> statistic_separated;                  ///< whether the pair statistic alone gave the partition
};

namespace detail {

/// Partition of a tuple by the pair statistic: a and b are paired iff the
/// number of syzygetic tuples containing both equals the model's v_pair.
template <class Real>
std::optional<Partition> statistic_partition(const std::vector<DetectedTuple<Real>>& tuples,
                                             const std::vector<std::vector<std::uint8_t>>& pairing, std::size_t ti) {
    const auto th = theta::pair_threshold();
    const auto& t = tuples[ti];
    Partition p{};
    std::size_t np = 0;
    std::array<int, 32> degree{};
    for (std::size_t x = 0; x < 12; ++x)
        for (std::size_t y = x + 1; y < 12; ++y) {
            const int a = t.members[x], b = t.members[y];
            const std::uint32_t both = (std::uint32_t{1} << a) | (std::uint32_t{1} << b);
            int count = 0;
            for (std::size_t u = 0; u < tuples.size(); ++u)
                if (u != ti && pairing[ti][u] == 0 && (tuples[u].mask & both) == both) ++count;
            if (count == th.v_pair) {
                if (np == 6) return std::nullopt;
                p[np++] = {a, b};
                ++degree[static_cast<std::size_t>(a)];
                ++degree[static_cast<std::size_t>(b)];
            } else if (count != th.v_nonpair) {
                return std::nullopt;
            }
        }
    if (np != 6) return std::nullopt;
    for (int a : t.members)
        if (degree[static_cast<std::size_t>(a)] != 1) return std::nullopt;
    return p;
}

inline Partition canonical(Partition p) {
    for (auto& [a, b] : p)
        if (a > b) std::swap(a, b);
    std::sort(p.begin(), p.end());
    return p;
}

}  // namespace detail

/// Abstract level-2 structure of the detected tuples, with an explicit
/// bijection onto the theta model. Tuple classes are read off a symplectic
/// basis of the intersection pairing; the label of point 0 is the unique
/// odd label whose tuple membership matches; the other labels follow from
/// the tuple in which each point is paired with point 0.
template <class Real>
LevelStructure<Real> build_structure(const std::vector<ProjVec<Real>>& points, std::vector<DetectedTuple<Real>> tuples) {
    using namespace theta;
    const auto mc = model_constants();
    const std::size_t nt = tuples.size();
    const int n = static_cast<int>(points.size());
    if (static_cast<int>(nt) != mc.two_torsion || n != mc.odd)
        throw Error(ErrorKind::InconsistentStructure, "structure needs 63 tuples on 28 points");
    auto fail = [](const std::string& why) { throw Error(ErrorKind::InconsistentStructure, why); };

    LevelStructure<Real> s;
    for (const auto& p : points) s.points.push_back(normalize<Real>(p.as(Role::point), 0.0));

    s.pairing_matrix.assign(nt, std::vector<std::uint8_t>(nt, 0));
    for (std::size_t u = 0; u < nt; ++u)
        for (std::size_t v = u + 1; v < nt; ++v) {
            const int k = std::popcount(tuples[u].mask & tuples[v].mask);
            if (k == mc.syz_intersection) continue;
            if (k != mc.azy_intersection) fail("tuples meet in " + std::to_string(k) + " points");
            s.pairing_matrix[u][v] = s.pairing_matrix[v][u] = 1;
        }
    for (int a = 0; a < n; ++a) {
        int k = 0;
        for (const auto& t : tuples) k += t.contains(a) ? 1 : 0;
        if (k != tuples_per_label()) fail("a point lies in " + std::to_string(k) + " tuples");
    }

    // Partitions: the pair statistic, checked against any partition the
    // detection already witnessed; geometry is the fallback.
    s.statistic_separated.assign(nt, false);
    for (std::size_t u = 0; u < nt; ++u) {
        auto p = detail::statistic_partition<Real>(tuples, s.pairing_matrix, u);
        s.statistic_separated[u] = p.has_value();
        if (p && tuples[u].pairs && detail::canonical(*p) != detail::canonical(*tuples[u].pairs))
            fail("pair statistic contradicts the witnessed pairing of tuple " + std::to_string(u));
        if (!p) p = tuples[u].pairs;
        if (!p) p = detail::geometric_partition<Real>(s.points, tuples[u]);
        if (!p) throw Error(ErrorKind::PairingAmbiguous, "no pairing separates tuple " + std::to_string(u));
        tuples[u].pairs = detail::canonical(*p);
    }

    // tau(a, b): the tuple in which a and b are paired.
    std::vector<std::vector<int>> tau(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), -1));
    std::vector<std::array<int, 32>> partner(nt);
    for (std::size_t u = 0; u < nt; ++u) {
        partner[u].fill(-1);
        for (const auto& [a, b] : *tuples[u].pairs) {
            int& slot = tau[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
            if (slot >= 0) fail("a pair of points is paired in two tuples");
            slot = tau[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = static_cast<int>(u);
            partner[u][static_cast<std::size_t>(a)] = b;
            partner[u][static_cast<std::size_t>(b)] = a;
        }
    }
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (a != b && tau[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] < 0) fail("a pair of points is paired nowhere");

    auto pair_d = [&](std::size_t u, std::size_t v) { return static_cast<int>(s.pairing_matrix[u][v]); };
    const auto db = detail::symplectic_basis(nt, pair_d);
    const auto& classes = two_torsion_classes();
    auto pair_m = [&](std::size_t u, std::size_t v) { return weil(classes[u], classes[v]); };
    const auto mb = detail::symplectic_basis(classes.size(), pair_m);
    if (!db || !mb) fail("the intersection pairing has no symplectic basis");

    // Coordinates in a symplectic basis are pairings with the dual vectors.
    s.tuple_class.resize(nt);
    std::vector<int> seen(64, -1);
    for (std::size_t u = 0; u < nt; ++u) {
        std::uint8_t bits = 0;
        for (std::size_t k = 0; k < 3; ++k) {
            if (pair_d(u, (*db)[2 * k + 1])) bits ^= classes[(*mb)[2 * k]].bits;
            if (pair_d(u, (*db)[2 * k])) bits ^= classes[(*mb)[2 * k + 1]].bits;
        }
        if (bits == 0 || seen[bits] >= 0) fail("tuple classes are not a bijection");
        seen[bits] = static_cast<int>(u);
        s.tuple_class[u] = TwoTorsion{bits};
    }
    for (std::size_t u = 0; u < nt; ++u)
        for (std::size_t v = 0; v < nt; ++v)
            if (u != v && pair_d(u, v) != weil(s.tuple_class[u], s.tuple_class[v])) fail("pairing is not symplectic");
    // Addition: for b in both tuples, partner_u(b) and partner_v(b) are paired in u + v.
    for (std::size_t u = 0; u < nt; ++u)
        for (std::size_t v = u + 1; v < nt; ++v) {
            const std::uint8_t sum = s.tuple_class[u].bits ^ s.tuple_class[v].bits;
            for (int b : tuples[u].members) {
                if (!tuples[v].contains(b)) continue;
                const int a = partner[u][static_cast<std::size_t>(b)];
                const int c = partner[v][static_cast<std::size_t>(b)];
                if (s.tuple_class[static_cast<std::size_t>(tau[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)])].bits != sum)
                    fail("tuple addition is not linear");
            }
        }

    // Point 0's label: l in theta(g) iff <l, g> = parity(g).
    std::optional<ThetaLabel> l0;
    for (unsigned cand = 0; cand < 64; ++cand) {
        bool ok = true;
        for (std::size_t u = 0; u < nt && ok; ++u) {
            const TwoTorsion g = s.tuple_class[u];
            const bool member = tuples[u].contains(0);
            ok = (weil_bits(static_cast<std::uint8_t>(cand), g.bits) == parity(g)) == member;
        }
        if (ok) {
            if (l0) fail("the label of the base point is not unique");
            l0 = ThetaLabel{static_cast<std::uint8_t>(cand)};
        }
    }
    if (!l0 || !is_odd(*l0)) fail("no odd label matches the base point");

    s.labeling.assign(static_cast<std::size_t>(n), *l0);
    LabelSet used = bit_of(*l0);
    for (int a = 1; a < n; ++a) {
        const ThetaLabel l = *l0 + s.tuple_class[static_cast<std::size_t>(tau[0][static_cast<std::size_t>(a)])];
        if (!is_odd(l) || (used & bit_of(l))) fail("labeling is not a bijection onto the odd labels");
        used |= bit_of(l);
        s.labeling[static_cast<std::size_t>(a)] = l;
    }
    for (std::size_t u = 0; u < nt; ++u) {
        const Tuple12& model = tuple_of(s.tuple_class[u]);
        LabelSet img = 0;
        for (int a : tuples[u].members) img |= bit_of(s.labeling[static_cast<std::size_t>(a)]);
        if (img != model.as_set()) fail("a tuple does not map onto its model tuple");
        for (const auto& [a, b] : *tuples[u].pairs)
            if (s.labeling[static_cast<std::size_t>(a)] + s.tuple_class[u] != s.labeling[static_cast<std::size_t>(b)])
                fail("a pair does not map onto a model pair");
    }
    s.tuples = std::move(tuples);
    return s;
}

template <class Real>
struct PairingReport {
    Partition pairs{};
    bool from_statistic = true;
    bool geometric = false;         ///< the tuple cubic is smooth, so the group-law checks ran
    bool geometric_agrees = false;  ///< translation by beta reproduces the same partition
    BetaResult<Real> beta;
    ConicFit<Real> conic;
};

/// The six pairs of a tuple, cross-validated by the group law when the tuple
/// cubic is smooth: the pairs share one difference class of order two,
/// translation by it reproduces the partition, and the chord images lie on
/// a conic. Singular tuple cubics carry no group law; their pairs rest on
/// the combinatorial statistic alone and `geometric` stays false.
template <class Real>
PairingReport<Real> extract_pairing(const LevelStructure<Real>& s, std::size_t ti) {
    if (ti >= s.tuples.size()) throw Error(ErrorKind::InvalidArgument, "tuple index out of range");
    const auto& t = s.tuples[ti];
    PairingReport<Real> r;
    r.pairs = *t.pairs;
    r.from_statistic = s.statistic_separated[ti];
    if (t.cubic.classification != CubicClass::smooth) return r;
    r.geometric = true;
    std::vector<PointPair<Real>> pp;
    for (const auto& [a, b] : r.pairs) pp.emplace_back(s.points[static_cast<std::size_t>(a)], s.points[static_cast<std::size_t>(b)]);
    r.beta = beta_of_pairs<Real>(t.cubic, pp);
    r.conic = conic_of_images<Real>(t.cubic, r.beta.beta, pp);
    const auto geo = detail::geometric_partition<Real>(s.points, t);
    r.geometric_agrees = geo && detail::canonical(*geo) == detail::canonical(r.pairs);
    if (!r.geometric_agrees) throw Error(ErrorKind::InconsistentPairing, "combinatorial and geometric pairings disagree");
    return r;
}

}  // namespace bitan
