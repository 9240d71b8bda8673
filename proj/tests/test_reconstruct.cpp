#include <gtest/gtest.h>

#include <bit>
#include <numeric>

#include "bitan/core/transform.hpp"
#include "bitan/reconstruct/reconstruct.hpp"
#include "support.hpp"

using namespace bitan;

namespace {

struct Case {
    HomPoly<double> q;
    std::vector<ProjVec<double>> lines;
    LevelStructure<double> s;
};

Case make_case(const HomPoly<double>& q) {
    Case c;
    c.q = q;
    c.lines = bitangents<double>(q).line_vectors();
    std::vector<ProjVec<double>> pts;
    for (const auto& l : c.lines) pts.push_back(l.as(Role::point));
    c.s = build_structure<double>(pts, detect_tuples<double>(pts));
    return c;
}

const Case& random_case() {
    static const Case c = make_case(fixtures::random_quartic(3));
    return c;
}

int q_of(unsigned v) { return std::popcount((v >> 3) & v & 7u) & 1; }

template <class F>
ErrorKind kind_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::InvalidArgument;
}

// Nine of the twelve points of a tuple: `drop` are positions into the
// tuple's pair list, as (pair, side).
struct NineSetup {
    std::array<ProjVec<double>, 9> nine;
    std::array<int, 2> marked{};
    std::vector<ProjVec<double>> dropped;
    std::vector<std::pair<int, int>> true_pairs;  // in nine-indices, partners both kept
};

NineSetup nine_from_tuple(const Case& c, std::size_t tuple, const std::vector<std::pair<int, int>>& drop) {
    NineSetup out;
    const auto& pairs = *c.s.tuples[tuple].pairs;
    std::vector<int> index_of(28, -1);
    int k = 0;
    for (int p = 0; p < 6; ++p)
        for (int side = 0; side < 2; ++side) {
            const int pt = side ? pairs[static_cast<std::size_t>(p)].second : pairs[static_cast<std::size_t>(p)].first;
            const bool gone = std::find(drop.begin(), drop.end(), std::make_pair(p, side)) != drop.end();
            if (gone) {
                out.dropped.push_back(c.s.points[static_cast<std::size_t>(pt)]);
            } else {
                index_of[static_cast<std::size_t>(pt)] = k;
                out.nine[static_cast<std::size_t>(k++)] = c.s.points[static_cast<std::size_t>(pt)];
            }
        }
    for (const auto& [a, b] : pairs)
        if (index_of[static_cast<std::size_t>(a)] >= 0 && index_of[static_cast<std::size_t>(b)] >= 0)
            out.true_pairs.emplace_back(index_of[static_cast<std::size_t>(a)], index_of[static_cast<std::size_t>(b)]);
    out.marked = {out.true_pairs[0].first, out.true_pairs[0].second};
    return out;
}

void expect_recovers(const NineSetup& n, const NineCompletion<double>& got) {
    for (const auto& d : n.dropped) {
        double best = 2.0;
        for (const auto& r : got.recovered) best = std::min(best, proj_distance<double>(r, d));
        EXPECT_LT(best, 1e-8);
    }
    for (const auto& [a, b] : n.true_pairs) {
        const bool present = std::any_of(got.pairs.begin(), got.pairs.end(), [&](const IndexPair& p) {
            return (p.first == a && p.second == b) || (p.first == b && p.second == a);
        });
        EXPECT_TRUE(present);
    }
}

}  // namespace

TEST(CompleteNine, ThreeSeparatePartnersByTranslation) {
    const auto& c = random_case();
    for (std::size_t u = 0; u < 63; u += 13) {
        const auto n = nine_from_tuple(c, u, {{1, 0}, {3, 1}, {5, 0}});
        const auto got = complete_from_nine<double>(n.nine, n.marked);
        EXPECT_FALSE(got.used_conic);
        EXPECT_LT(got.conic_residual, 1e-8);
        expect_recovers(n, got);
    }
}

TEST(CompleteNine, WholeMissingPairFromTheConic) {
    const auto& c = random_case();
    for (std::size_t u = 0; u < 63; u += 13) {
        const auto n = nine_from_tuple(c, u, {{2, 0}, {2, 1}, {4, 1}});
        const auto got = complete_from_nine<double>(n.nine, n.marked);
        EXPECT_TRUE(got.used_conic);
        expect_recovers(n, got);
    }
}

TEST(CompleteNine, FalsePairIsRejected) {
    const auto& c = random_case();
    auto n = nine_from_tuple(c, 0, {{1, 0}, {3, 1}, {5, 0}});
    // Two kept points from different pairs.
    n.marked = {n.true_pairs[0].first, n.true_pairs[1].first};
    EXPECT_EQ(kind_of([&] { complete_from_nine<double>(n.nine, n.marked); }), ErrorKind::InconsistentPairing);
}

TEST(CompleteNine, ImageCubicHoldsTheChordImages) {
    const auto& c = random_case();
    const auto& t = c.s.tuples[0];
    std::vector<PointPair<double>> pp;
    for (const auto& [a, b] : *t.pairs) pp.emplace_back(c.s.points[static_cast<std::size_t>(a)], c.s.points[static_cast<std::size_t>(b)]);
    const auto beta = beta_of_pairs<double>(t.cubic, pp).beta;
    const auto e = image_cubic<double>(t.cubic, beta);
    EXPECT_LT(e.residual, 1e-8);
    Rng rng(4);
    for (int i = 0; i < 5; ++i) {
        const auto l = HomPoly<double>::linear({rng.complex_box(), rng.complex_box(), rng.complex_box()});
        const auto p = intersect_curves<double>(t.cubic.poly, l)[0];
        EXPECT_LT(e.curve.relative_value(chord_map<double>(t.cubic, beta, p).coords), 1e-8);
    }
}

TEST(Aronhold, SelectionIsTheFirstAronholdSet) {
    const auto& c = random_case();
    const auto got = select_aronhold<double>(c.s);
    std::vector<unsigned> bits;
    for (const auto& l : c.s.labeling) bits.push_back(l.bits);
    auto azygetic = [&](const std::vector<int>& pick) {
        for (std::size_t a = 0; a < pick.size(); ++a)
            for (std::size_t b = a + 1; b < pick.size(); ++b)
                for (std::size_t d = b + 1; d < pick.size(); ++d)
                    if (q_of(bits[static_cast<std::size_t>(pick[a])] ^ bits[static_cast<std::size_t>(pick[b])] ^
                             bits[static_cast<std::size_t>(pick[d])]))
                        return false;
        return true;
    };
    // Walk 7-subsets in lexicographic order, pruning prefixes that already fail.
    std::vector<int> cur;
    std::vector<int> first;
    int total = 0;
    auto rec = [&](auto&& self, int start) -> void {
        if (cur.size() == 7) {
            if (first.empty()) first = cur;
            ++total;
            return;
        }
        for (int i = start; i < 28; ++i) {
            cur.push_back(i);
            if (azygetic(cur)) self(self, i + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    EXPECT_EQ(total, 288);
    EXPECT_EQ(std::vector<int>(got.begin(), got.end()), first);
}

TEST(Aronhold, QuarticFromSevenBitangents) {
    for (std::uint64_t seed : {3, 11}) {
        const Case c = seed == 3 ? random_case() : make_case(fixtures::random_quartic(seed));
        const auto idx = select_aronhold<double>(c.s);
        std::array<ProjVec<double>, 7> seven;
        for (std::size_t i = 0; i < 7; ++i) seven[i] = c.lines[static_cast<std::size_t>(idx[i])];
        const auto q = aronhold_quartic<double>(seven);
        EXPECT_LT(compare_proportional<double>(q, c.q), 1e-8);
        for (const auto& l : c.lines) EXPECT_LT(bitangency_residual<double>(q, l), 1e-8);
    }
}

TEST(Aronhold, SevenLinesWithASyzygeticTetradDoNotGiveTheQuartic) {
    // Two pairs of one tuple are syzygetic, so these seven are no Aronhold set.
    const auto& c = random_case();
    const auto& p = *c.s.tuples[0].pairs;
    std::vector<int> pick{p[0].first, p[0].second, p[1].first, p[1].second};
    for (int i = 0; pick.size() < 7; ++i)
        if (std::find(pick.begin(), pick.end(), i) == pick.end()) pick.push_back(i);
    std::array<ProjVec<double>, 7> seven;
    for (std::size_t i = 0; i < 7; ++i) seven[i] = c.lines[static_cast<std::size_t>(pick[i])];
    try {
        const auto q = aronhold_quartic<double>(seven);
        EXPECT_GT(compare_proportional<double>(q, c.q), 1e-3);
    } catch (const Error& e) {
        EXPECT_TRUE(e.kind() == ErrorKind::NotAronhold || e.kind() == ErrorKind::GeneralPositionFailure) << e.what();
    }
}

TEST(Aronhold, ConcurrentLinesAreRejected) {
    std::array<ProjVec<double>, 7> seven;
    Rng rng(2);
    for (auto& l : seven) l = fixtures::random_vec(rng, Role::line);
    // Lines through (1, 0, 0) have first coordinate zero.
    seven[0] = ProjVec<double>(0.0, 1.0, 2.0, Role::line);
    seven[1] = ProjVec<double>(0.0, 1.0, -1.0, Role::line);
    seven[2] = ProjVec<double>(0.0, 3.0, 1.0, Role::line);
    EXPECT_EQ(kind_of([&] { aronhold_quartic<double>(seven); }), ErrorKind::GeneralPositionFailure);
}

TEST(Refine, ConvergesFromANearbySeed) {
    const auto& c = random_case();
    Rng rng(6);
    HomPoly<double> seed = c.q.normalized();
    for (auto& x : seed.coeffs()) x += 1e-4 * rng.complex_box();
    const auto r = refine<double>(seed, c.lines);
    EXPECT_LT(compare_proportional<double>(r.quartic, c.q), 1e-10);
    for (double x : r.residuals) EXPECT_LT(x, 1e-10);
}

TEST(Refine, ExactQuarticIsAFixedPoint) {
    const auto& c = random_case();
    const auto r = refine<double>(c.q, c.lines);
    EXPECT_LE(r.iterations, 1);
    EXPECT_LT(compare_proportional<double>(r.quartic, c.q), 1e-12);
}

TEST(Compare, ProportionalAndDistinct) {
    const auto q = fixtures::random_quartic(1);
    HomPoly<double> scaled = q;
    for (auto& x : scaled.coeffs()) x *= std::complex<double>(0, 5);
    EXPECT_LT(compare_proportional<double>(q, scaled), 1e-15);
    EXPECT_GT(compare_proportional<double>(fixtures::fermat(), fixtures::klein()), 0.1);
}

TEST(Reconstruct, RecoversRandomAndSpecialQuartics) {
    for (const auto& q : {fixtures::random_quartic(4), fixtures::fermat(), fixtures::klein()}) {
        const auto lines = bitangents<double>(q).line_vectors();
        const auto r = reconstruct<double>(lines, {}, &q);
        ASSERT_TRUE(r.comparison.has_value());
        EXPECT_LT(*r.comparison, 1e-10);
        for (double x : r.residuals) EXPECT_LT(x, 1e-10);
    }
}

TEST(Reconstruct, OrderOfTheLinesDoesNotMatter) {
    const auto& c = random_case();
    auto lines = c.lines;
    Rng rng(8);
    for (std::size_t i = lines.size() - 1; i > 0; --i) std::swap(lines[i], lines[rng.index(i + 1)]);
    const auto r = reconstruct<double>(lines, {}, &c.q);
    EXPECT_LT(*r.comparison, 1e-10);
}

TEST(Reconstruct, GeneralQuarticHasNoProjectiveSymmetry) {
    // A map other than the identity moves the bitangent set, so it is not
    // an automorphism of the quartic.
    const auto& c = random_case();
    Rng rng(10);
    const auto t = random_projective_map<double>(rng);
    const auto moved = bitangents<double>(t(c.q)).line_vectors();
    double far = 0.0;
    for (const auto& l : moved) far = std::max(far, fixtures::nearest(c.lines, l).second);
    EXPECT_GT(far, 1e-3);
}

TEST(Reconstruct, WrongLineCount) {
    const auto& c = random_case();
    std::vector<ProjVec<double>> lines(c.lines.begin(), c.lines.end() - 1);
    EXPECT_EQ(kind_of([&] { reconstruct<double>(lines); }), ErrorKind::TupleCountMismatch);
}

TEST(Reconstruct, ExtendedPrecision) {
    const auto q = fixtures::random_quartic(5);
    std::vector<ProjVec<Quad>> lines;
    for (const auto& l : bitangents<Quad>(q.cast<Quad>()).line_vectors()) lines.push_back(l);
    const auto ref = q.cast<Quad>();
    const auto r = reconstruct<Quad>(lines, {}, &ref);
    EXPECT_LT(*r.comparison, 1e-25);
}
