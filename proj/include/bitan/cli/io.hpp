#pragma once

#include <array>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bitan/core/error.hpp"
#include "bitan/core/hompoly.hpp"
#include "bitan/core/projvec.hpp"
#include "bitan/reconstruct/reconstruct.hpp"
#include "bitan/solver/bitangents.hpp"

namespace bitan::io {

using json = nlohmann::json;

inline constexpr const char* quartic_order = "grlex-x4-first";

[[noreturn]] inline void schema(const std::string& why) { throw Error(ErrorKind::Schema, why); }

inline json complex_json(std::complex<double> c) { return json::array({c.real(), c.imag()}); }

inline std::complex<double> complex_from(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) schema("complex number must be [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

template <class Real>
json vec_json(const ProjVec<Real>& v) {
    json out = json::array();
    for (const auto& c : v.coords) out.push_back(complex_json(to_cdouble(c)));
    return out;
}

inline ProjVec<double> vec_from(const json& j, Role role) {
    if (!j.is_array() || j.size() != 3) schema("projective vector must be three complex numbers");
    return {complex_from(j[0]), complex_from(j[1]), complex_from(j[2]), role};
}

template <class Real>
json poly_json(const HomPoly<Real>& q) {
    json out = {{"degree", q.degree()}, {"coeffs", json::array()}};
    for (const auto& c : q.coeffs()) out["coeffs"].push_back(complex_json(to_cdouble(c)));
    if (q.degree() == 4) out["order"] = quartic_order;
    return out;
}

inline json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) schema("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        schema(std::string("malformed JSON: ") + e.what());
    }
}

inline void write_json(const json& j, const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
        fallback << j.dump(2) << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) schema("cannot write " + path);
    out << j.dump(2) << '\n';
}

inline HomPoly<double> quartic_from(const json& j) {
    if (!j.is_object()) schema("quartic file must be an object");
    if (!j.contains("degree") || j["degree"] != 4) schema("quartic file needs degree 4");
    if (!j.contains("order") || j["order"] != quartic_order) schema(std::string("quartic order must be ") + quartic_order);
    if (!j.contains("coeffs") || !j["coeffs"].is_array() || j["coeffs"].size() != 15) schema("quartic needs 15 complex coefficients");
    std::vector<std::complex<double>> c;
    for (const auto& x : j["coeffs"]) c.push_back(complex_from(x));
    HomPoly<double> q(4, std::move(c));
    if (q.is_zero()) schema("quartic is identically zero");
    return q;
}

inline json quartic_json(const HomPoly<double>& q) { return poly_json<double>(q); }

/// Lines of a line-set file; `expected` < 0 accepts any count.
inline std::vector<ProjVec<double>> lines_from(const json& j, int expected, const Tolerances& tol) {
    if (!j.is_object() || !j.contains("lines") || !j["lines"].is_array()) schema("line-set file needs a lines array");
    std::vector<ProjVec<double>> out;
    for (const auto& l : j["lines"]) {
        try {
            out.push_back(normalize<double>(vec_from(l, Role::line), tol.geo));
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::Schema) throw;
            schema("a line is the zero vector");
        }
    }
    if (expected >= 0 && static_cast<int>(out.size()) != expected)
        schema("expected " + std::to_string(expected) + " lines, got " + std::to_string(out.size()));
    for (std::size_t a = 0; a < out.size(); ++a)
        for (std::size_t b = a + 1; b < out.size(); ++b)
            if (proj_distance<double>(out[a], out[b]) < tol.dup) schema("lines " + std::to_string(a) + " and " + std::to_string(b) + " coincide");
    return out;
}

template <class Real>
json lines_json(const std::vector<ProjVec<Real>>& lines) {
    json out = {{"lines", json::array()}, {"normalized", true}};
    for (const auto& l : lines) out["lines"].push_back(vec_json<Real>(normalize<Real>(l, 0.0)));
    return out;
}

template <class Real>
json bitangents_json(const BitangentSet<Real>& bs) {
    json out = lines_json<Real>(bs.line_vectors());
    out["certificates"] = json::array();
    out["contacts"] = json::array();
    for (const auto& b : bs.lines) {
        out["certificates"].push_back(b.certificate);
        out["contacts"].push_back(json::array({vec_json<Real>(b.contact[0]), vec_json<Real>(b.contact[1])}));
    }
    out["precision"] = bs.provenance.precision;
    out["paths"] = bs.provenance.paths;
    out["failed_paths"] = bs.provenance.failed_paths;
    return out;
}

inline json partition_json(const Partition& p) {
    json out = json::array();
    for (const auto& [a, b] : p) out.push_back(json::array({a, b}));
    return out;
}

template <class Real>
json report_json(const ReconstructionReport<Real>& r) {
    json out;
    out["input_lines"] = lines_json<Real>(r.input_lines)["lines"];
    json tuples = json::array();
    for (std::size_t u = 0; u < r.structure.tuples.size(); ++u) {
        const auto& t = r.structure.tuples[u];
        json jt = {{"members", t.members},
                   {"class", theta::to_string(r.structure.tuple_class[u])},
                   {"cubic", to_string(t.cubic.classification)},
                   {"residual", t.residual},
                   {"pairs", partition_json(*t.pairs)},
                   {"pairs_from_statistic", r.pairings[u].from_statistic}};
        if (r.pairings[u].geometric) {
            jt["beta_spread"] = r.pairings[u].beta.spread;
            jt["conic_residual"] = r.pairings[u].conic.residual;
        }
        tuples.push_back(jt);
    }
    json labels = json::array();
    for (const auto& l : r.structure.labeling) labels.push_back(theta::to_string(l));
    out["structure"] = {{"tuples", tuples}, {"labeling", labels}, {"pairing_matrix", r.structure.pairing_matrix}};
    out["detection"] = {{"fits", r.detect_stats.fits},
                        {"smooth_tuples", 63 - r.detect_stats.singular_tuples},
                        {"singular_tuples", r.detect_stats.singular_tuples},
                        {"derived_tuples", r.detect_stats.derived}};
    if (r.configuration) {
        const auto& c = *r.configuration;
        out["configuration"] = {{"tuple", c.tuple},
                                {"cubic", poly_json<Real>(c.cubic.poly)},
                                {"beta", vec_json<Real>(c.beta)},
                                {"image_cubic", poly_json<Real>(c.image_cubic)},
                                {"image_residual", c.image_residual},
                                {"conic", poly_json<Real>(c.conic.conic)},
                                {"conic_residual", c.conic.residual}};
    } else {
        out["configuration"] = nullptr;
    }
    out["aronhold"] = r.aronhold;
    out["seed_quartic"] = poly_json<Real>(r.seed_quartic);
    out["refined_quartic"] = poly_json<Real>(r.refined_quartic);
    out["seed_residuals"] = r.seed_residuals;
    out["residuals"] = r.residuals;
    out["refine_iterations"] = r.refine_iterations;
    out["comparison"] = r.comparison ? json(*r.comparison) : json(nullptr);
    return out;
}

struct NineFile {
    std::array<ProjVec<double>, 9> lines{};
    std::array<int, 2> marked{};
};

inline NineFile nine_from(const json& j, const Tolerances& tol) {
    const auto lines = lines_from(j, 9, tol);
    if (!j.contains("marked_pair") || !j["marked_pair"].is_array() || j["marked_pair"].size() != 2) schema("marked_pair must be two indices");
    NineFile out;
    std::copy(lines.begin(), lines.end(), out.lines.begin());
    for (std::size_t k = 0; k < 2; ++k) {
        if (!j["marked_pair"][k].is_number_integer()) schema("marked_pair entries must be integers");
        out.marked[k] = j["marked_pair"][k].get<int>();
        if (out.marked[k] < 0 || out.marked[k] > 8) schema("marked_pair index out of range");
    }
    if (out.marked[0] == out.marked[1]) schema("marked_pair indices must differ");
    return out;
}

}  // namespace bitan::io
