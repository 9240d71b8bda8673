#pragma once

#include <iostream>
#include <optional>
#include <string>

#include "bitan/cli/io.hpp"
#include "bitan/reconstruct/reconstruct.hpp"
#include "bitan/solver/bitangents.hpp"
#include "bitan/theta/theta_f2.hpp"

namespace bitan::cli {

/// Process exit codes.
enum Exit : int {
    ok = 0,
    schema = 1,
    not_smooth = 2,
    count_mismatch = 3,
    degenerate = 4,
    selftest_failed = 5,
    bad_pairing = 6,
    bad_structure = 7,
    no_convergence = 8,
    check_failed = 9,
};

inline int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::Schema:
        case ErrorKind::InvalidArgument:
        case ErrorKind::ZeroVector: return schema;
        case ErrorKind::NotSmooth: return not_smooth;
        case ErrorKind::CountMismatch: return count_mismatch;
        case ErrorKind::DegenerateConfiguration: return degenerate;
        case ErrorKind::InconsistentPairing: return bad_pairing;
        case ErrorKind::TupleCountMismatch:
        case ErrorKind::ExcessIncidence:
        case ErrorKind::InconsistentStructure:
        case ErrorKind::PairingAmbiguous: return bad_structure;
        default: return no_convergence;
    }
}

struct Flags {
    Tolerances tol{};
    unsigned threads = 1;
    std::string output;  ///< empty: standard output
};

/// Runs a command body, mapping library errors to exit codes.
template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return schema;
    }
}

enum class Family { fermat, klein, random };

/// Classical quartics, or a seeded random quartic with coefficients in the
/// complex unit box, redrawn until smooth. `perturb` adds seeded noise of
/// that relative size to every coefficient.
inline HomPoly<double> generate(Family family, std::uint64_t seed, double perturb = 0.0, double tol_geo = 1e-8) {
    HomPoly<double> q(4);
    switch (family) {
        case Family::fermat:
            q.coeff(4, 0, 0) = q.coeff(0, 4, 0) = q.coeff(0, 0, 4) = 1.0;
            break;
        case Family::klein:
            q.coeff(3, 1, 0) = q.coeff(0, 3, 1) = q.coeff(1, 0, 3) = 1.0;
            break;
        case Family::random: {
            Rng rng(seed);
            do {
                for (auto& c : q.coeffs()) c = rng.complex<double>();
            } while (!is_smooth<double>(q, tol_geo));
            break;
        }
    }
    if (perturb > 0.0) {
        Rng rng(seed ^ 0x70657274ULL);
        const double scale = perturb * q.max_abs();
        for (auto& c : q.coeffs()) c += scale * rng.complex<double>();
    }
    return q;
}

inline int cmd_bitangents(const std::string& input, const Flags& f, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto q = io::quartic_from(io::read_json(input));
        const auto bs = bitangents<double>(q, f.tol);
        io::write_json(io::bitangents_json<double>(bs), f.output, out);
        return int(ok);
    });
}

template <class Real>
int reconstruct_as(const std::vector<ProjVec<double>>& lines, const std::optional<HomPoly<double>>& reference, const Flags& f,
                   std::ostream& out) {
    std::vector<ProjVec<Real>> ls;
    for (const auto& l : lines) ls.push_back(l.template cast<Real>());
    std::optional<HomPoly<Real>> ref;
    if (reference) ref = reference->template cast<Real>();
    ReconstructOptions opt;
    opt.tol = f.tol;
    opt.threads = f.threads;
    const auto r = reconstruct<Real>(ls, opt, ref ? &*ref : nullptr);
    auto j = io::report_json<Real>(r);
    j["precision"] = ScalarTraits<Real>::name;
    bool pass = std::all_of(r.residuals.begin(), r.residuals.end(), [&](double x) { return x < f.tol.sq; });
    if (r.comparison) pass = pass && *r.comparison < 1e-6;
    j["passed"] = pass;
    io::write_json(j, f.output, out);
    return pass ? int(ok) : int(check_failed);
}

inline int cmd_reconstruct(const std::string& input, const std::string& reference, bool extended, const Flags& f, std::ostream& out,
                           std::ostream& err) {
    return guarded(err, [&] {
        const auto lines = io::lines_from(io::read_json(input), 28, f.tol);
        std::optional<HomPoly<double>> ref;
        if (!reference.empty()) ref = io::quartic_from(io::read_json(reference));
        return extended ? reconstruct_as<Quad>(lines, ref, f, out) : reconstruct_as<double>(lines, ref, f, out);
    });
}

inline int cmd_selftest(std::ostream& out) {
    const auto rep = theta::selftest();
    const auto& c = rep.constants;
    out << "odd=" << c.odd << " even=" << c.even << " tuples=" << c.two_torsion << " tuple_size=" << c.tuple_size
        << " syzygetic_intersection=" << c.syz_intersection << " azygetic_intersection=" << c.azy_intersection
        << " aronhold=" << c.aronhold << " order=" << c.sp6_order << '\n';
    for (const auto& ch : rep.checks) out << (ch.passed ? "ok   " : "FAIL ") << ch.name << (ch.detail.empty() ? "" : ": " + ch.detail) << '\n';
    return rep.passed() ? int(ok) : int(selftest_failed);
}

inline int cmd_complete9(const std::string& input, const Flags& f, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto nine = io::nine_from(io::read_json(input), f.tol);
        const auto c = complete_from_nine<double>(nine.lines, nine.marked, f.tol);
        std::vector<ProjVec<double>> all(nine.lines.begin(), nine.lines.end());
        for (const auto& p : c.recovered) all.push_back(p.as(Role::line));
        auto j = io::lines_json<double>(all);
        j["pairs"] = io::partition_json(c.pairs);
        j["recovered"] = {9, 10, 11};
        j["conic_used"] = c.used_conic;
        io::write_json(j, f.output, out);
        return int(ok);
    });
}

inline int cmd_gen(Family family, std::uint64_t seed, double perturb, const Flags& f, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        io::write_json(io::quartic_json(generate(family, seed, perturb, f.tol.geo)), f.output, out);
        return int(ok);
    });
}

/// gen, bitangents, reconstruct and compare in one process.
inline int cmd_roundtrip(Family family, std::uint64_t seed, double perturb, const Flags& f, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto q = generate(family, seed, perturb, f.tol.geo);
        const auto bs = bitangents<double>(q, f.tol);
        return reconstruct_as<double>(bs.line_vectors(), q, f, out);
    });
}

}  // namespace bitan::cli
