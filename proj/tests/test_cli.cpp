#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "bitan/cli/commands.hpp"
#include "bitan/core/transform.hpp"
#include "support.hpp"

using namespace bitan;
using io::json;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("bitan_cli_" + std::to_string(::getpid()) + "_" +
                                            ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string write(const std::string& name, const std::string& text) {
        const auto p = (dir_ / name).string();
        std::ofstream(p) << text;
        return p;
    }
    std::string write_json(const std::string& name, const json& j) { return write(name, j.dump()); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
    std::ostringstream out_, err_;
    cli::Flags flags_;
};

}  // namespace

TEST_F(Cli, QuarticRoundTripIsBitExact) {
    const auto q = cli::generate(cli::Family::random, 42);
    const auto back = io::quartic_from(json::parse(io::quartic_json(q).dump()));
    for (std::size_t m = 0; m < 15; ++m) EXPECT_EQ(back.coeffs()[m], q.coeffs()[m]);
}

TEST_F(Cli, GenIsDeterministic) {
    std::ostringstream a, b;
    EXPECT_EQ(cli::cmd_gen(cli::Family::random, 7, 0.0, flags_, a, err_), cli::ok);
    EXPECT_EQ(cli::cmd_gen(cli::Family::random, 7, 0.0, flags_, b, err_), cli::ok);
    EXPECT_EQ(a.str(), b.str());
    std::ostringstream c;
    cli::cmd_gen(cli::Family::random, 8, 0.0, flags_, c, err_);
    EXPECT_NE(a.str(), c.str());
}

TEST_F(Cli, BitangentsThenReconstruct) {
    const auto q = cli::generate(cli::Family::random, 5);
    const auto qf = write_json("q.json", io::quartic_json(q));
    flags_.output = path("lines.json");
    ASSERT_EQ(cli::cmd_bitangents(qf, flags_, out_, err_), cli::ok) << err_.str();
    const auto lines = io::read_json(flags_.output);
    EXPECT_EQ(lines["lines"].size(), 28u);
    EXPECT_EQ(lines["certificates"].size(), 28u);
    flags_.output = path("report.json");
    ASSERT_EQ(cli::cmd_reconstruct(path("lines.json"), qf, false, flags_, out_, err_), cli::ok) << err_.str();
    const auto rep = io::read_json(flags_.output);
    EXPECT_TRUE(rep["passed"].get<bool>());
    EXPECT_LT(rep["comparison"].get<double>(), 1e-10);
    EXPECT_EQ(rep["structure"]["tuples"].size(), 63u);
    EXPECT_EQ(rep["aronhold"].size(), 7u);
}

TEST_F(Cli, MalformedJsonIsASchemaError) {
    EXPECT_EQ(cli::cmd_bitangents(write("bad.json", "{\"degree\": 4,"), flags_, out_, err_), cli::schema);
    EXPECT_EQ(cli::cmd_bitangents(path("missing.json"), flags_, out_, err_), cli::schema);
    json j = io::quartic_json(fixtures::fermat());
    j["order"] = "lex";
    EXPECT_EQ(cli::cmd_bitangents(write_json("order.json", j), flags_, out_, err_), cli::schema);
}

TEST_F(Cli, SingularQuarticExitsTwo) {
    HomPoly<double> q(4);
    q.coeff(2, 1, 1) = q.coeff(0, 4, 0) = q.coeff(0, 0, 4) = 1.0;
    EXPECT_EQ(cli::cmd_bitangents(write_json("node.json", io::quartic_json(q)), flags_, out_, err_), cli::not_smooth);
}

TEST_F(Cli, WrongLineCountIsASchemaError) {
    const auto lines = bitangents<double>(fixtures::fermat()).line_vectors();
    const auto j = io::lines_json<double>(std::vector<ProjVec<double>>(lines.begin(), lines.begin() + 27));
    EXPECT_EQ(cli::cmd_reconstruct(write_json("27.json", j), "", false, flags_, out_, err_), cli::schema);
    auto dup = io::lines_json<double>(lines);
    dup["lines"][3] = dup["lines"][4];
    EXPECT_EQ(cli::cmd_reconstruct(write_json("dup.json", dup), "", false, flags_, out_, err_), cli::schema);
}

TEST_F(Cli, TriangleOfDualPointsIsDegenerate) {
    // Twelve dual points on three lines, four per line, lie on a reducible
    // cubic; with sixteen general points there is no tuple structure.
    Rng rng(3);
    const std::array<Vec3<double>, 3> sides{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {1.0, 1.0, 1.0}}};
    std::vector<ProjVec<double>> lines;
    for (const auto& s : sides)
        for (int k = 0; k < 4; ++k) {
            const Vec3<double> other{rng.complex_box(), rng.complex_box(), rng.complex_box()};
            lines.emplace_back(cross<double>(s, other), Role::line);
        }
    for (int k = 0; k < 16; ++k) lines.push_back(fixtures::random_vec(rng, Role::line));
    EXPECT_EQ(cli::cmd_reconstruct(write_json("tri.json", io::lines_json<double>(lines)), "", false, flags_, out_, err_), cli::degenerate)
        << err_.str();
}

TEST_F(Cli, CompleteNine) {
    const auto q = cli::generate(cli::Family::random, 9);
    std::vector<ProjVec<double>> pts;
    for (const auto& l : bitangents<double>(q).line_vectors()) pts.push_back(l.as(Role::point));
    const auto tuples = detect_tuples<double>(pts);
    const auto& t = tuples[0];
    const auto& pr = *t.pairs;
    // Keep pairs 0..3 whole and the first members of pairs 4 and 5.
    std::vector<ProjVec<double>> nine;
    for (std::size_t p = 0; p < 4; ++p) {
        nine.push_back(pts[static_cast<std::size_t>(pr[p].first)]);
        nine.push_back(pts[static_cast<std::size_t>(pr[p].second)]);
    }
    nine.push_back(pts[static_cast<std::size_t>(pr[4].first)]);
    json j = io::lines_json<double>(nine);
    j["marked_pair"] = {0, 1};
    flags_.output = path("twelve.json");
    ASSERT_EQ(cli::cmd_complete9(write_json("nine.json", j), flags_, out_, err_), cli::ok) << err_.str();
    const auto res = io::read_json(flags_.output);
    EXPECT_EQ(res["lines"].size(), 12u);
    EXPECT_TRUE(res["conic_used"].get<bool>());

    j["marked_pair"] = {0, 2};
    EXPECT_EQ(cli::cmd_complete9(write_json("false.json", j), flags_, out_, err_), cli::bad_pairing);
    j["marked_pair"] = {0, 9};
    EXPECT_EQ(cli::cmd_complete9(write_json("range.json", j), flags_, out_, err_), cli::schema);
    j = io::lines_json<double>(std::vector<ProjVec<double>>(nine.begin(), nine.begin() + 8));
    j["marked_pair"] = {0, 1};
    EXPECT_EQ(cli::cmd_complete9(write_json("eight.json", j), flags_, out_, err_), cli::schema);
}

TEST_F(Cli, Selftest) {
    EXPECT_EQ(cli::cmd_selftest(out_), cli::ok);
    EXPECT_NE(out_.str().find("tuples=63"), std::string::npos);
}

TEST_F(Cli, RoundtripFamilies) {
    EXPECT_EQ(cli::cmd_roundtrip(cli::Family::klein, 0, 0.0, flags_, out_, err_), cli::ok) << err_.str();
    EXPECT_EQ(cli::cmd_roundtrip(cli::Family::random, 2, 1e-3, flags_, out_, err_), cli::ok) << err_.str();
}

TEST_F(Cli, ErrorKindsMapToExitCodes) {
    EXPECT_EQ(cli::exit_code(ErrorKind::Schema), 1);
    EXPECT_EQ(cli::exit_code(ErrorKind::NotSmooth), 2);
    EXPECT_EQ(cli::exit_code(ErrorKind::CountMismatch), 3);
    EXPECT_EQ(cli::exit_code(ErrorKind::DegenerateConfiguration), 4);
    EXPECT_EQ(cli::exit_code(ErrorKind::InconsistentPairing), 6);
    EXPECT_EQ(cli::exit_code(ErrorKind::TupleCountMismatch), 7);
    EXPECT_EQ(cli::exit_code(ErrorKind::NoConvergence), 8);
}

TEST(Generated, ProjectiveImagesStaySmooth) {
    // One of these images has partial derivatives whose resultant is about
    // 1e-15 in the first scan chart; it must still be judged smooth.
    Rng rng(0x65717569ULL);
    for (int trial = 0; trial < 10; ++trial) {
        const auto q = cli::generate(cli::Family::random, rng.index(20) + 1);
        const auto t = random_projective_map<double>(rng);
        EXPECT_TRUE(is_smooth<double>(t(q))) << trial;
    }
}
