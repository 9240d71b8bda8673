#include <gtest/gtest.h>

#include "bitan/core/transform.hpp"
#include "bitan/solver/bitangents.hpp"
#include "support.hpp"

using namespace bitan;
using cd = std::complex<double>;

namespace {

// x^4 + y^4 + z^4: twelve hyperflex lines u = zeta v (zeta^4 = -1) for each
// pair of variables, and sixteen lines x + a y + b z with a^4 = b^4 = 1.
std::vector<ProjVec<double>> fermat_lines() {
    std::vector<ProjVec<double>> out;
    for (int k = 0; k < 4; ++k) {
        const cd zeta = std::polar(1.0, M_PI / 4 + k * M_PI / 2);
        out.emplace_back(1.0, -zeta, 0.0, Role::line);
        out.emplace_back(1.0, 0.0, -zeta, Role::line);
        out.emplace_back(0.0, 1.0, -zeta, Role::line);
    }
    const std::array<cd, 4> mu{1.0, -1.0, cd(0, 1), cd(0, -1)};
    for (const auto& a : mu)
        for (const auto& b : mu) out.emplace_back(1.0, a, b, Role::line);
    return out;
}

void expect_same_set(const std::vector<ProjVec<double>>& got, const std::vector<ProjVec<double>>& want, double tol) {
    ASSERT_EQ(got.size(), want.size());
    std::vector<bool> used(want.size(), false);
    for (const auto& g : got) {
        const auto [i, d] = fixtures::nearest(want, g);
        EXPECT_LT(d, tol);
        EXPECT_FALSE(used[i]);
        used[i] = true;
    }
}

}  // namespace

TEST(Bitangents, FermatMatchesExplicitLines) {
    const auto bs = bitangents<double>(fixtures::fermat());
    ASSERT_EQ(bs.lines.size(), 28u);
    expect_same_set(bs.line_vectors(), fermat_lines(), 1e-9);
    int hyperflex = 0;
    for (const auto& b : bs.lines) {
        EXPECT_LT(b.certificate, 1e-8);
        if (proj_distance<double>(b.contact[0], b.contact[1]) < 1e-6) ++hyperflex;
    }
    EXPECT_EQ(hyperflex, 12);
}

TEST(Bitangents, KleinHasTwentyEight) {
    const auto q = fixtures::klein();
    const auto bs = bitangents<double>(q);
    ASSERT_EQ(bs.lines.size(), 28u);
    for (const auto& b : bs.lines) {
        EXPECT_LT(b.certificate, 1e-8);
        for (const auto& c : b.contact) {
            EXPECT_LT(q.relative_value(c.coords), 1e-9);
            EXPECT_LT(incidence<double>(b.line, c), 1e-9);
        }
    }
}

TEST(Bitangents, RandomQuarticsAreCertifiedAndSorted) {
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto q = fixtures::random_quartic(seed);
        const auto bs = bitangents<double>(q);
        ASSERT_EQ(bs.lines.size(), 28u) << seed;
        for (std::size_t i = 0; i < 28; ++i) {
            EXPECT_LT(bs.lines[i].certificate, 1e-8);
            if (i > 0) {
                EXPECT_TRUE(lex_less<double>(bs.lines[i - 1].line, bs.lines[i].line));
            }
        }
    }
}

TEST(Bitangents, ThreeHundredFifteenSyzygeticTetrads) {
    // Four bitangents are syzygetic iff their eight contacts lie on a conic;
    // each tuple holds 15 pairs of pairs and every tetrad lies in 3 tuples.
    const auto bs = bitangents<double>(fixtures::random_quartic(5));
    int syz = 0;
    for (std::size_t a = 0; a < 28; ++a)
        for (std::size_t b = a + 1; b < 28; ++b)
            for (std::size_t c = b + 1; c < 28; ++c)
                for (std::size_t d = c + 1; d < 28; ++d)
                    syz += syzygetic_test<double>(std::array<Bitangent<double>, 4>{bs.lines[a], bs.lines[b], bs.lines[c], bs.lines[d]}) ? 1 : 0;
    EXPECT_EQ(syz, 63 * 15 / 3);
}

TEST(Bitangents, CommuteWithProjectiveMaps) {
    Rng rng(77);
    const auto q = fixtures::random_quartic(8);
    const auto t = random_projective_map<double>(rng);
    const auto bs = bitangents<double>(q);
    const auto bt = bitangents<double>(t(q));
    std::vector<ProjVec<double>> moved;
    for (const auto& l : bs.line_vectors()) moved.push_back(normalize<double>(t(l), 0.0));
    expect_same_set(bt.line_vectors(), moved, 1e-6);
}

TEST(Bitangents, NodalQuarticIsNotSmooth) {
    HomPoly<double> q(4);
    q.coeff(2, 1, 1) = 1.0;
    q.coeff(0, 4, 0) = 1.0;
    q.coeff(0, 0, 4) = 1.0;
    EXPECT_FALSE(is_smooth<double>(q));
    try {
        bitangents<double>(q);
        FAIL() << "expected NotSmooth";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotSmooth);
    }
}

TEST(Bitangents, SquareCertificateRejectsNonSquares) {
    BinaryQuartic<double> b;
    b.c = {1.0, 0.0, 0.0, 0.0, 1.0};
    EXPECT_FALSE(square_certificate<double>(b).has_value());
    b.c = {1.0, 2.0, 3.0, 2.0, 1.0};  // (s^2 + s + 1)^2
    const auto cert = square_certificate<double>(b);
    ASSERT_TRUE(cert.has_value());
    EXPECT_LT(cert->residual, 1e-14);
}

TEST(Bitangents, ExtendedPrecisionAgrees) {
    const auto q = fixtures::random_quartic(2);
    const auto bd = bitangents<double>(q);
    const auto bq = bitangents<double>(q, Precision{PrecisionMode::extended, {}});
    EXPECT_EQ(bq.provenance.precision, "quad");
    std::vector<ProjVec<double>> lines;
    for (const auto& b : bq.lines) lines.push_back(normalize<double>(b.line, 0.0));
    expect_same_set(bd.line_vectors(), lines, 1e-12);
}
