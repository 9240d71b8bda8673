// Acceptance run over the corpus: Fermat, Klein and 20 seeded random
// quartics. Prints one PASS/FAIL line per criterion; exits 1 if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "bitan/cli/commands.hpp"
#include "bitan/core/transform.hpp"
#include "support.hpp"

using namespace bitan;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Entry {
    std::string name;
    HomPoly<double> q;
    BitangentSet<double> bs;
    std::vector<ProjVec<double>> lines;
    std::vector<ProjVec<double>> points;
    std::optional<LevelStructure<double>> structure;
    double solve_s = 0.0, detect_s = 0.0;
};

struct Verdict {
    bool pass = true;
    std::ostringstream note;
    void fail(const std::string& why) {
        if (pass) note << why;
        pass = false;
    }
};

void report(int n, Verdict& v, const std::string& summary) {
    std::cout << "criterion " << n << ": " << (v.pass ? "PASS" : "FAIL") << "  " << summary;
    if (!v.pass) std::cout << " (" << v.note.str() << ")";
    std::cout << std::endl;
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::InvalidArgument;
}

bool same_sets(const std::vector<ProjVec<double>>& a, const std::vector<ProjVec<double>>& b, double tol) {
    if (a.size() != b.size()) return false;
    std::vector<bool> used(b.size(), false);
    for (const auto& x : a) {
        const auto [i, d] = fixtures::nearest(b, x);
        if (!(d < tol) || used[i]) return false;
        used[i] = true;
    }
    return true;
}

}  // namespace

int main() {
    std::vector<Entry> corpus;
    corpus.push_back({"fermat", cli::generate(cli::Family::fermat, 0), {}, {}, {}, {}, 0, 0});
    corpus.push_back({"klein", cli::generate(cli::Family::klein, 0), {}, {}, {}, {}, 0, 0});
    for (std::uint64_t s = 1; s <= 20; ++s) corpus.push_back({"random-" + std::to_string(s), cli::generate(cli::Family::random, s), {}, {}, {}, {}, 0, 0});
    bool all = true;

    {  // 1: theta model identities
        Verdict v;
        const auto t0 = Clock::now();
        const auto rep = theta::selftest();
        const auto c = rep.constants;
        const double dt = seconds_since(t0);
        for (const auto& ch : rep.checks)
            if (!ch.passed) v.fail(ch.name);
        if (c.odd != 28 || c.even != 36 || c.two_torsion != 63 || c.tuple_size != 12) v.fail("counts");
        if (c.syz_intersection != 4 || c.azy_intersection % 3 != 0) v.fail("intersections");
        if (c.aronhold != 288 || c.sp6_order != 1451520) v.fail("aronhold or group order");
        if (!(dt < 1.0)) v.fail("took " + std::to_string(dt) + " s");
        std::ostringstream s;
        s << rep.checks.size() << " identities, azygetic intersection " << c.azy_intersection << ", " << dt << " s";
        report(1, v, s.str());
        all = all && v.pass;
    }

    {  // 2: 28 certified bitangents in under 5 s
        Verdict v;
        double worst_cert = 0.0, worst_t = 0.0;
        for (auto& e : corpus) {
            const auto t0 = Clock::now();
            try {
                e.bs = bitangents<double>(e.q);
            } catch (const Error& err) {
                v.fail(e.name + ": " + err.what());
                continue;
            }
            e.solve_s = seconds_since(t0);
            e.lines = e.bs.line_vectors();
            for (const auto& l : e.lines) e.points.push_back(l.as(Role::point));
            worst_t = std::max(worst_t, e.solve_s);
            if (e.lines.size() != 28) v.fail(e.name + ": " + std::to_string(e.lines.size()) + " lines");
            for (const auto& b : e.bs.lines) worst_cert = std::max(worst_cert, b.certificate);
            if (!(e.solve_s < 5.0)) v.fail(e.name + " slow");
        }
        if (!(worst_cert < 1e-8)) v.fail("certificate " + std::to_string(worst_cert));
        std::ostringstream s;
        s << corpus.size() << " quartics, worst certificate " << worst_cert << ", slowest " << worst_t << " s";
        report(2, v, s.str());
        all = all && v.pass;
    }

    {  // 3: 63 tuples and an explicit isomorphism onto the model
        Verdict v;
        double worst_t = 0.0;
        for (auto& e : corpus) {
            const auto t0 = Clock::now();
            try {
                auto tuples = detect_tuples<double>(e.points);
                if (tuples.size() != 63) v.fail(e.name + ": tuple count");
                e.structure = build_structure<double>(e.points, std::move(tuples));
            } catch (const Error& err) {
                v.fail(e.name + ": " + err.what());
            }
            e.detect_s = seconds_since(t0);
            worst_t = std::max(worst_t, e.detect_s);
            if (!(e.detect_s < 180.0)) v.fail(e.name + " slow");
        }
        std::ostringstream s;
        s << "slowest " << worst_t << " s";
        report(3, v, s.str());
        all = all && v.pass;
    }

    {  // 4: beta classes and chord-image conics on every tuple
        Verdict v;
        int checked = 0, singular = 0;
        double spread = 0.0, conic = 0.0, gram = 1.0;
        std::ostringstream per;
        for (const auto& e : corpus) {
            if (!e.structure) continue;
            int bad = 0;
            for (std::size_t u = 0; u < e.structure->tuples.size(); ++u) {
                try {
                    const auto r = extract_pairing<double>(*e.structure, u);
                    if (!r.geometric) {
                        ++bad;
                        continue;
                    }
                    ++checked;
                    spread = std::max({spread, r.beta.spread, r.beta.order2_residual});
                    conic = std::max(conic, r.conic.residual);
                    gram = std::min(gram, r.conic.gram_det);
                } catch (const Error& err) {
                    v.fail(e.name + ": " + err.what());
                }
            }
            if (bad) per << " " << e.name << "=" << bad;
            singular += bad;
        }
        if (singular) v.fail(std::to_string(singular) + " tuples have a singular cubic and no group law:" + per.str());
        if (!(spread < 1e-6)) v.fail("beta spread " + std::to_string(spread));
        if (!(conic < 1e-8)) v.fail("conic residual " + std::to_string(conic));
        if (!(gram > 1e-8)) v.fail("degenerate conic");
        std::ostringstream s;
        s << checked << " smooth tuples, worst beta spread " << spread << ", worst conic residual " << conic << ", smallest conic det " << gram;
        report(4, v, s.str());
        all = all && v.pass;
    }

    {  // 5: nine-point completion
        Verdict v;
        Rng rng(0x6e696e65ULL);
        int ok = 0, trials = 0, conic_trials = 0;
        while (trials < 50) {
            const auto& e = corpus[rng.index(corpus.size())];
            if (!e.structure) break;
            const auto& t = e.structure->tuples[rng.index(63)];
            if (t.cubic.classification != CubicClass::smooth) continue;
            ++trials;
            std::array<int, 12> order{};
            for (std::size_t p = 0; p < 6; ++p) {
                order[2 * p] = (*t.pairs)[p].first;
                order[2 * p + 1] = (*t.pairs)[p].second;
            }
            for (std::size_t i = 11; i > 0; --i) std::swap(order[i], order[rng.index(i + 1)]);
            std::array<ProjVec<double>, 9> nine;
            for (std::size_t i = 0; i < 9; ++i) nine[i] = e.points[static_cast<std::size_t>(order[i])];
            auto partner = [&](int pt) {
                for (const auto& [a, b] : *t.pairs)
                    if (a == pt) return b;
                    else if (b == pt) return a;
                return -1;
            };
            std::array<int, 2> marked{-1, -1};
            for (int i = 0; i < 9 && marked[0] < 0; ++i)
                for (int j = i + 1; j < 9; ++j)
                    if (partner(order[static_cast<std::size_t>(i)]) == order[static_cast<std::size_t>(j)]) {
                        marked = {i, j};
                        break;
                    }
            try {
                const auto c = complete_from_nine<double>(nine, marked);
                conic_trials += c.used_conic ? 1 : 0;
                // Map every completed index to a corpus point, then compare pairings.
                std::array<int, 12> global{};
                for (std::size_t i = 0; i < 9; ++i) global[i] = order[i];
                bool match = true;
                for (std::size_t k = 0; k < 3; ++k) {
                    const auto [i, d] = fixtures::nearest(e.points, c.recovered[k]);
                    global[9 + k] = static_cast<int>(i);
                    match = match && d < 1e-6 && std::find(order.begin() + 9, order.end(), static_cast<int>(i)) != order.end();
                }
                for (const auto& [a, b] : c.pairs)
                    match = match && partner(global[static_cast<std::size_t>(a)]) == global[static_cast<std::size_t>(b)];
                ok += match ? 1 : 0;
            } catch (const Error& err) {
                v.fail(e.name + ": " + err.what());
            }
        }
        if (ok != 50) v.fail(std::to_string(ok) + " of 50 matched");
        std::ostringstream s;
        s << ok << "/" << trials << " trials matched, " << conic_trials << " needed the conic";
        report(5, v, s.str());
        all = all && v.pass;
    }

    {  // 6: round trip
        Verdict v;
        double worst = 0.0, worst_t = 0.0;
        for (const auto& e : corpus) {
            const auto t0 = Clock::now();
            try {
                const auto r = reconstruct<double>(e.lines, {}, &e.q);
                worst = std::max(worst, *r.comparison);
                if (!(*r.comparison < 1e-6)) v.fail(e.name + " differs");
            } catch (const Error& err) {
                v.fail(e.name + ": " + err.what());
            }
            const double dt = seconds_since(t0) + e.solve_s;
            worst_t = std::max(worst_t, dt);
            if (!(dt < 300.0)) v.fail(e.name + " slow");
        }
        std::ostringstream s;
        s << "worst coefficient error " << worst << ", slowest " << worst_t << " s";
        report(6, v, s.str());
        all = all && v.pass;
    }

    {  // 7: negative controls
        Verdict v;
        int hit = 0;
        Rng rng(0x6e6567ULL);
        std::vector<ProjVec<double>> random_lines;
        for (int i = 0; i < 28; ++i) random_lines.push_back(fixtures::random_vec(rng, Role::line));
        hit += kind_of([&] { detect_tuples<double>(random_lines); }) == ErrorKind::TupleCountMismatch ? 1 : 0;

        const auto& e = corpus[2];
        auto tuples = e.structure->tuples;
        auto& t = tuples[5];
        int in = 0;
        while (t.contains(in)) ++in;
        t.mask = (t.mask & ~(1u << t.members[0])) | (1u << in);
        t.members[0] = in;
        std::sort(t.members.begin(), t.members.end());
        hit += kind_of([&] { build_structure<double>(e.points, tuples); }) == ErrorKind::InconsistentStructure ? 1 : 0;

        const auto& tp = *e.structure->tuples[0].pairs;
        std::array<ProjVec<double>, 9> nine;
        for (std::size_t i = 0; i < 9; ++i)
            nine[i] = e.points[static_cast<std::size_t>(i % 2 ? tp[i / 2].second : tp[i / 2].first)];
        hit += kind_of([&] { complete_from_nine<double>(nine, {0, 2}); }) == ErrorKind::InconsistentPairing ? 1 : 0;

        HomPoly<double> node(4);
        node.coeff(2, 1, 1) = node.coeff(0, 4, 0) = node.coeff(0, 0, 4) = 1.0;
        hit += kind_of([&] { bitangents<double>(node); }) == ErrorKind::NotSmooth ? 1 : 0;
        v.pass = hit == 4;
        if (!v.pass) v.note << hit << " of 4";
        report(7, v, std::to_string(hit) + "/4 controls detected");
        all = all && v.pass;
    }

    {  // 8: equivariance
        Verdict v;
        Rng rng(0x65717569ULL);
        int ok = 0;
        double worst = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            const auto& e = corpus[2 + rng.index(20)];
            const auto t = random_projective_map<double>(rng);
            try {
                const auto moved_q = t(e.q);
                const auto moved_lines = bitangents<double>(moved_q).line_vectors();
                std::vector<ProjVec<double>> mapped;
                for (const auto& l : e.lines) mapped.push_back(t(l));
                const bool sets = same_sets(moved_lines, mapped, 1e-6);
                const auto r0 = reconstruct<double>(e.lines);
                const auto r1 = reconstruct<double>(moved_lines);
                const double d = compare_proportional<double>(r1.refined_quartic, t(r0.refined_quartic));
                worst = std::max(worst, d);
                if (sets && d < 1e-6) ++ok;
            } catch (const Error& err) {
                v.fail(e.name + ": " + err.what());
            }
        }
        if (ok != 10) v.fail(std::to_string(ok) + " of 10");
        std::ostringstream s;
        s << ok << "/10 trials, worst reconstructed difference " << worst;
        report(8, v, s.str());
        all = all && v.pass;
    }
    return all ? 0 : 1;
}
