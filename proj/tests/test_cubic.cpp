#include <gtest/gtest.h>

#include "bitan/cubic/cubic.hpp"
#include "support.hpp"

using namespace bitan;
using cd = std::complex<double>;

namespace {

HomPoly<double> random_cubic(std::uint64_t seed) {
    Rng rng(seed);
    HomPoly<double> c(3);
    for (auto& x : c.coeffs()) x = rng.complex_box();
    return c;
}

// The three points where a random line meets the cubic.
std::vector<ProjVec<double>> line_section(const HomPoly<double>& c, Rng& rng) {
    const auto l = HomPoly<double>::linear({rng.complex_box(), rng.complex_box(), rng.complex_box()});
    return intersect_curves<double>(c, l);
}

ProjVec<double> point_on(const HomPoly<double>& c, Rng& rng) { return line_section(c, rng)[0]; }

bool same(const ProjVec<double>& a, const ProjVec<double>& b, double tol = 1e-8) { return proj_distance<double>(a, b) < tol; }

}  // namespace

TEST(Cubic, ClassifiesSmoothNodalCuspidalReducible) {
    EXPECT_EQ(classify<double>(random_cubic(1)), CubicClass::smooth);

    HomPoly<double> nodal(3);  // y^2 z = x^3 + x^2 z
    nodal.coeff(0, 2, 1) = 1.0;
    nodal.coeff(3, 0, 0) = -1.0;
    nodal.coeff(2, 0, 1) = -1.0;
    EXPECT_EQ(classify<double>(nodal), CubicClass::nodal);

    HomPoly<double> cusp(3);  // y^2 z = x^3
    cusp.coeff(0, 2, 1) = 1.0;
    cusp.coeff(3, 0, 0) = -1.0;
    EXPECT_EQ(classify<double>(cusp), CubicClass::nodal);

    HomPoly<double> triangle(3);
    triangle.coeff(1, 1, 1) = 1.0;
    EXPECT_EQ(classify<double>(triangle), CubicClass::reducible);

    HomPoly<double> conic(2);
    conic.coeff(1, 0, 1) = 1.0;
    conic.coeff(0, 2, 0) = -1.0;
    const auto line = HomPoly<double>::linear({1.0, 2.0, -0.5});
    EXPECT_EQ(classify<double>(conic * line), CubicClass::reducible);
}

TEST(Cubic, CollinearPointsSumToZero) {
    const auto c = make_cubic<double>(random_cubic(2));
    ASSERT_TRUE(c.flex_origin.has_value());
    const ProjVec<double>& o = *c.flex_origin;
    EXPECT_LT(c.poly.relative_value(o.coords), 1e-10);
    Rng rng(3);
    for (int t = 0; t < 5; ++t) {
        const auto pts = line_section(c.poly, rng);
        ASSERT_EQ(pts.size(), 3u);
        EXPECT_TRUE(same(add<double>(c, add<double>(c, pts[0], pts[1]), pts[2]), o));
    }
}

TEST(Cubic, GroupAxioms) {
    const auto c = make_cubic<double>(random_cubic(4));
    const ProjVec<double>& o = *c.flex_origin;
    Rng rng(5);
    const auto p = point_on(c.poly, rng), q = point_on(c.poly, rng), r = point_on(c.poly, rng);
    EXPECT_TRUE(same(add<double>(c, p, o), p));
    EXPECT_TRUE(same(add<double>(c, p, neg<double>(c, p)), o));
    EXPECT_TRUE(same(add<double>(c, p, q), add<double>(c, q, p)));
    EXPECT_TRUE(same(add<double>(c, add<double>(c, p, q), r), add<double>(c, p, add<double>(c, q, r)), 1e-7));
    EXPECT_TRUE(same(sub<double>(c, add<double>(c, p, q), q), p, 1e-7));
}

TEST(Cubic, TwoTorsionPoints) {
    const auto c = make_cubic<double>(random_cubic(6));
    const ProjVec<double>& o = *c.flex_origin;
    const auto t = two_torsion<double>(c);
    ASSERT_EQ(t.size(), 3u);
    for (const auto& x : t) {
        EXPECT_FALSE(same(x, o, 1e-4));
        EXPECT_TRUE(same(add<double>(c, x, x), o));
    }
    EXPECT_TRUE(same(add<double>(c, t[0], t[1]), t[2]));
}

TEST(Cubic, ChordMapIsConstantOnTranslationOrbits) {
    const auto c = make_cubic<double>(random_cubic(7));
    const auto beta = two_torsion<double>(c)[1];
    Rng rng(8);
    const auto p = point_on(c.poly, rng);
    const auto pb = add<double>(c, p, beta);
    const auto l = chord_map<double>(c, beta, p);
    EXPECT_LT(incidence<double>(l, p), 1e-10);
    EXPECT_LT(incidence<double>(l, pb), 1e-10);
    EXPECT_TRUE(same(chord_map<double>(c, beta, pb), l));
}

TEST(Cubic, BetaOfTranslatedPairs) {
    const auto c = make_cubic<double>(random_cubic(9));
    const auto torsion = two_torsion<double>(c);
    Rng rng(10);
    std::vector<PointPair<double>> pairs;
    for (int i = 0; i < 6; ++i) {
        const auto p = point_on(c.poly, rng);
        pairs.emplace_back(p, add<double>(c, p, torsion[2]));
    }
    const auto b = beta_of_pairs<double>(c, pairs);
    EXPECT_TRUE(same(b.beta, torsion[2]));
    EXPECT_LT(b.spread, 1e-8);

    pairs[3].second = point_on(c.poly, rng);
    try {
        beta_of_pairs<double>(c, pairs);
        FAIL() << "expected InconsistentPairing";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InconsistentPairing);
    }
}

TEST(Cubic, ConicDeterminant) {
    HomPoly<double> smooth(2);
    smooth.coeff(1, 0, 1) = 1.0;
    smooth.coeff(0, 2, 0) = -1.0;
    EXPECT_GT(conic_gram_det<double>(smooth), 1e-3);
    const auto pair = HomPoly<double>::linear({1.0, 0.0, 0.0}) * HomPoly<double>::linear({0.0, 1.0, 2.0});
    EXPECT_LT(conic_gram_det<double>(pair), 1e-15);
}

TEST(Cubic, GroupLawInQuad) {
    const auto c = make_cubic<Quad>(random_cubic(2).cast<Quad>());
    ASSERT_TRUE(c.flex_origin.has_value());
    for (const auto& t : two_torsion<Quad>(c))
        EXPECT_LT(to_double(proj_distance<Quad>(add<Quad>(c, t, t), *c.flex_origin)), 1e-20);
}
