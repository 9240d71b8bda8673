#include <gtest/gtest.h>

#include <bit>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#include "bitan/core/transform.hpp"
#include "bitan/detect/detect.hpp"
#include "support.hpp"

using namespace bitan;

namespace {

struct Detected {
    BitangentSet<double> bs;
    std::vector<ProjVec<double>> lines;
    std::vector<DetectedTuple<double>> tuples;
    DetectStats stats;
};

Detected detect_for(const HomPoly<double>& q) {
    Detected d;
    d.bs = bitangents<double>(q);
    d.lines = d.bs.line_vectors();
    d.tuples = detect_tuples<double>(d.lines, {}, &d.stats);
    return d;
}

const Detected& random_case() {
    static const Detected d = detect_for(fixtures::random_quartic(1));
    return d;
}

std::set<std::uint32_t> masks_of(const std::vector<DetectedTuple<double>>& ts) {
    std::set<std::uint32_t> out;
    for (const auto& t : ts) out.insert(t.mask);
    return out;
}

void expect_kind(ErrorKind want, const std::function<void()>& f) {
    try {
        f();
        ADD_FAILURE() << "no error thrown";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), want) << e.what();
    }
}

}  // namespace

TEST(Detect, RandomQuarticHasSixtyThreeTuples) {
    const auto& d = random_case();
    ASSERT_EQ(d.tuples.size(), 63u);
    EXPECT_EQ(d.stats.singular_tuples, 0);
    EXPECT_EQ(masks_of(d.tuples).size(), 63u);
    for (const auto& t : d.tuples) {
        EXPECT_EQ(std::popcount(t.mask), 12);
        EXPECT_EQ(t.cubic.classification, CubicClass::smooth);
        ASSERT_TRUE(t.pairs.has_value());
    }
}

TEST(Detect, IncidenceCounts) {
    const auto& d = random_case();
    for (int i = 0; i < 28; ++i) {
        int per_point = 0;
        for (const auto& t : d.tuples) per_point += t.contains(i) ? 1 : 0;
        EXPECT_EQ(per_point, 27);
        for (int j = i + 1; j < 28; ++j) {
            int per_pair = 0;
            for (const auto& t : d.tuples) per_pair += (t.contains(i) && t.contains(j)) ? 1 : 0;
            EXPECT_EQ(per_pair, 11);
        }
    }
}

TEST(Detect, IntersectionProfile) {
    const auto& d = random_case();
    for (std::size_t u = 0; u < 63; ++u) {
        std::map<int, int> profile;
        for (std::size_t v = 0; v < 63; ++v)
            if (v != u) ++profile[std::popcount(d.tuples[u].mask & d.tuples[v].mask)];
        EXPECT_EQ(profile, (std::map<int, int>{{4, 30}, {6, 32}}));
    }
}

TEST(Detect, PairsOfATupleAreSyzygetic) {
    // Two pairs of one tuple give four bitangents with eight contacts on a
    // conic; a pair and a non-pair from the same tuple do not.
    const auto& d = random_case();
    for (std::size_t u = 0; u < 63; u += 7) {
        const auto& p = *d.tuples[u].pairs;
        const auto& L = d.bs.lines;
        for (std::size_t a = 0; a < 6; ++a)
            for (std::size_t b = a + 1; b < 6; ++b) {
                std::size_t c = 0;
                while (c == a || c == b) ++c;
                EXPECT_TRUE(syzygetic_test<double>(
                    std::array<Bitangent<double>, 4>{L[p[a].first], L[p[a].second], L[p[b].first], L[p[b].second]}));
                EXPECT_FALSE(syzygetic_test<double>(
                    std::array<Bitangent<double>, 4>{L[p[a].first], L[p[a].second], L[p[b].first], L[p[c].first]}));
            }
    }
}

TEST(Detect, StructureIsIsomorphicToTheModel) {
    const auto& d = random_case();
    const auto s = build_structure<double>(d.lines, d.tuples);
    std::set<unsigned> labels;
    for (const auto& l : s.labeling) labels.insert(l.bits);
    EXPECT_EQ(labels.size(), 28u);
    std::set<unsigned> classes;
    for (std::size_t u = 0; u < 63; ++u) {
        classes.insert(s.tuple_class[u].bits);
        const auto& model = theta::tuple_of(s.tuple_class[u]);
        std::set<unsigned> want, got;
        for (const auto& l : model.members) want.insert(l.bits);
        for (int a : s.tuples[u].members) got.insert(s.labeling[static_cast<std::size_t>(a)].bits);
        EXPECT_EQ(got, want);
    }
    EXPECT_EQ(classes.size(), 63u);
    for (std::size_t u = 0; u < 63; ++u)
        for (std::size_t v = 0; v < 63; ++v) {
            if (u == v) continue;
            const bool azy = std::popcount(s.tuples[u].mask & s.tuples[v].mask) == 6;
            EXPECT_EQ(s.pairing_matrix[u][v], azy ? 1 : 0);
            EXPECT_EQ(theta::weil(s.tuple_class[u], s.tuple_class[v]), azy ? 1 : 0);
        }
}

TEST(Detect, GeometricPairingAgrees) {
    const auto& d = random_case();
    const auto s = build_structure<double>(d.lines, d.tuples);
    for (std::size_t u = 0; u < 63; u += 9) {
        const auto r = extract_pairing<double>(s, u);
        EXPECT_TRUE(r.geometric);
        EXPECT_TRUE(r.geometric_agrees);
        EXPECT_LT(r.beta.spread, 1e-6);
        EXPECT_LT(r.conic.residual, 1e-6);
    }
}

TEST(Detect, PermutedInputGivesPermutedTuples) {
    const auto& d = random_case();
    std::vector<int> perm(28);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(12);
    for (int i = 27; i > 0; --i) std::swap(perm[static_cast<std::size_t>(i)], perm[rng.index(static_cast<std::uint64_t>(i + 1))]);
    std::vector<ProjVec<double>> shuffled(28);
    for (int i = 0; i < 28; ++i) shuffled[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = d.lines[static_cast<std::size_t>(i)];
    const auto t2 = detect_tuples<double>(shuffled);
    std::set<std::uint32_t> mapped;
    for (const auto m : masks_of(d.tuples)) {
        std::uint32_t x = 0;
        for (int i = 0; i < 28; ++i)
            if ((m >> i) & 1u) x |= 1u << perm[static_cast<std::size_t>(i)];
        mapped.insert(x);
    }
    EXPECT_EQ(masks_of(t2), mapped);
    EXPECT_NO_THROW(build_structure<double>(shuffled, t2));
}

TEST(Detect, ProjectiveImageHasTheSameTuples) {
    const auto& d = random_case();
    Rng rng(31);
    const auto t = random_projective_map<double>(rng);
    std::vector<ProjVec<double>> moved;
    for (const auto& l : d.lines) moved.push_back(t(l));
    EXPECT_EQ(masks_of(detect_tuples<double>(moved)), masks_of(d.tuples));
}

TEST(Detect, CorruptedTupleBreaksTheStructure) {
    const auto& d = random_case();
    auto tuples = d.tuples;
    auto& t = tuples[5];
    const int out = t.members[0];
    int in = 0;
    while (t.contains(in)) ++in;
    t.mask = (t.mask & ~(1u << out)) | (1u << in);
    t.members[0] = in;
    std::sort(t.members.begin(), t.members.end());
    expect_kind(ErrorKind::InconsistentStructure, [&] { build_structure<double>(d.lines, tuples); });
}

TEST(Detect, WrongPointCountsAreRejected) {
    const auto& d = random_case();
    std::vector<ProjVec<double>> fewer(d.lines.begin(), d.lines.begin() + 27);
    expect_kind(ErrorKind::TupleCountMismatch, [&] { detect_tuples<double>(fewer); });
}

TEST(Detect, RandomLinesHaveNoStructure) {
    Rng rng(99);
    std::vector<ProjVec<double>> lines;
    for (int i = 0; i < 28; ++i) lines.push_back(fixtures::random_vec(rng, Role::line));
    expect_kind(ErrorKind::TupleCountMismatch, [&] { detect_tuples<double>(lines); });
}

TEST(Detect, SpecialQuartics) {
    for (const auto& q : {fixtures::fermat(), fixtures::klein()}) {
        const auto d = detect_for(q);
        ASSERT_EQ(d.tuples.size(), 63u);
        EXPECT_NO_THROW(build_structure<double>(d.lines, d.tuples));
    }
}
