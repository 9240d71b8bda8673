#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "bitan/core/error.hpp"

// Exact model of the level-2 combinatorics of a plane quartic: theta
// characteristics are vectors (eps | del) in F2^3 x F2^3 with parity
// eps.del, and two-torsion classes are nonzero vectors of the same space.
// Everything here is computed by exhaustive enumeration.
namespace bitan::theta {

/// 6-bit vector: high three bits eps, low three bits del.
struct ThetaLabel {
    std::uint8_t bits = 0;

    constexpr std::uint8_t eps() const { return static_cast<std::uint8_t>(bits >> 3); }
    constexpr std::uint8_t del() const { return static_cast<std::uint8_t>(bits & 7u); }

    friend constexpr bool operator==(ThetaLabel, ThetaLabel) = default;
    friend constexpr auto operator<=>(ThetaLabel, ThetaLabel) = default;
};

struct TwoTorsion {
    std::uint8_t bits = 0;

    constexpr std::uint8_t eps() const { return static_cast<std::uint8_t>(bits >> 3); }
    constexpr std::uint8_t del() const { return static_cast<std::uint8_t>(bits & 7u); }

    friend constexpr bool operator==(TwoTorsion, TwoTorsion) = default;
    friend constexpr auto operator<=>(TwoTorsion, TwoTorsion) = default;
};

constexpr ThetaLabel make_label(unsigned eps, unsigned del) {
    return ThetaLabel{static_cast<std::uint8_t>(((eps & 7u) << 3) | (del & 7u))};
}

constexpr TwoTorsion make_torsion(unsigned eps, unsigned del) {
    return TwoTorsion{static_cast<std::uint8_t>(((eps & 7u) << 3) | (del & 7u))};
}

constexpr int parity_bits(std::uint8_t v) {
    return std::popcount(static_cast<unsigned>((v >> 3) & (v & 7u))) & 1;
}

constexpr int parity(ThetaLabel t) { return parity_bits(t.bits); }
constexpr int parity(TwoTorsion g) { return parity_bits(g.bits); }
constexpr bool is_odd(ThetaLabel t) { return parity(t) == 1; }

constexpr int weil_bits(std::uint8_t u, std::uint8_t v) {
    const unsigned ue = (u >> 3) & 7u, ud = u & 7u, ve = (v >> 3) & 7u, vd = v & 7u;
    return (std::popcount(ue & vd) + std::popcount(ud & ve)) & 1;
}

/// Weil pairing <u,v> = u.eps v.del + u.del v.eps mod 2.
constexpr int weil(TwoTorsion u, TwoTorsion v) { return weil_bits(u.bits, v.bits); }

constexpr ThetaLabel operator+(ThetaLabel t, TwoTorsion g) {
    return ThetaLabel{static_cast<std::uint8_t>(t.bits ^ g.bits)};
}

/// The difference of two characteristics is a two-torsion class.
constexpr TwoTorsion difference(ThetaLabel a, ThetaLabel b) {
    return TwoTorsion{static_cast<std::uint8_t>(a.bits ^ b.bits)};
}

inline std::string to_string(ThetaLabel t) {
    std::string s;
    for (int b = 2; b >= 0; --b) s += ((t.eps() >> b) & 1u) ? '1' : '0';
    s += '|';
    for (int b = 2; b >= 0; --b) s += ((t.del() >> b) & 1u) ? '1' : '0';
    return s;
}

inline std::string to_string(TwoTorsion g) { return to_string(ThetaLabel{g.bits}); }

/// The 28 odd labels in increasing bit order.
inline const std::vector<ThetaLabel>& odd_labels() {
    static const std::vector<ThetaLabel> labels = [] {
        std::vector<ThetaLabel> out;
        for (unsigned v = 0; v < 64; ++v)
            if (parity_bits(static_cast<std::uint8_t>(v)) == 1) out.push_back(ThetaLabel{static_cast<std::uint8_t>(v)});
        return out;
    }();
    return labels;
}

/// The 63 nonzero classes in increasing bit order.
inline const std::vector<TwoTorsion>& two_torsion_classes() {
    static const std::vector<TwoTorsion> classes = [] {
        std::vector<TwoTorsion> out;
        for (unsigned v = 1; v < 64; ++v) out.push_back(TwoTorsion{static_cast<std::uint8_t>(v)});
        return out;
    }();
    return classes;
}

/// Bit v is set iff label v belongs to the set.
using LabelSet = std::uint64_t;

constexpr LabelSet bit_of(ThetaLabel t) { return LabelSet{1} << t.bits; }

struct Tuple12 {
    TwoTorsion gamma;
    std::array<ThetaLabel, 12> members{};
    std::array<std::pair<ThetaLabel, ThetaLabel>, 6> pairs{};

    LabelSet as_set() const {
        LabelSet s = 0;
        for (auto m : members) s |= bit_of(m);
        return s;
    }

    bool contains(ThetaLabel t) const { return (as_set() & bit_of(t)) != 0; }
};

/// theta(gamma): the odd labels whose translate by gamma is odd, paired by
/// translation. Checked against the equivalent description
/// { odd t : <t, gamma> = parity(gamma) }.
inline Tuple12 tuple12(TwoTorsion gamma) {
    if (gamma.bits == 0 || gamma.bits > 63) throw Error(ErrorKind::InvalidArgument, "gamma must be a nonzero 6-bit class");
    Tuple12 t;
    t.gamma = gamma;
    std::size_t n = 0, np = 0;
    for (const ThetaLabel th : odd_labels()) {
        const bool by_translate = is_odd(th + gamma);
        const bool by_pairing = weil_bits(th.bits, gamma.bits) == parity(gamma);
        if (by_translate != by_pairing) throw Error(ErrorKind::InconsistentStructure, "tuple characterizations disagree");
        if (!by_translate) continue;
        if (n == 12) throw Error(ErrorKind::InconsistentStructure, "tuple has more than 12 members");
        t.members[n++] = th;
        const ThetaLabel partner = th + gamma;
        if (th < partner) t.pairs[np++] = {th, partner};
    }
    if (n != 12 || np != 6) throw Error(ErrorKind::InconsistentStructure, "tuple does not have 12 members in 6 pairs");
    return t;
}

inline const std::vector<Tuple12>& all_tuples() {
    static const std::vector<Tuple12> tuples = [] {
        std::vector<Tuple12> out;
        for (const TwoTorsion g : two_torsion_classes()) out.push_back(tuple12(g));
        return out;
    }();
    return tuples;
}

inline const Tuple12& tuple_of(TwoTorsion g) { return all_tuples()[static_cast<std::size_t>(g.bits - 1)]; }

inline int intersection_size(TwoTorsion g1, TwoTorsion g2) {
    if (g1 == g2) throw Error(ErrorKind::InvalidArgument, "intersection_size needs distinct classes");
    return std::popcount(tuple_of(g1).as_set() & tuple_of(g2).as_set());
}

/// Intersection size of two azygetic tuples, fixed by enumeration (the
/// value is the same for every azygetic pair; see the self test).
inline int azygetic_intersection() {
    static const int value = [] {
        for (const TwoTorsion g : two_torsion_classes())
            if (weil(make_torsion(4, 0), g) == 1) return intersection_size(make_torsion(4, 0), g);
        return -1;
    }();
    return value;
}

struct OrbitReport {
    std::array<int, 3> sizes{};          ///< {0}, (alpha^perp/alpha)\{0}, rest
    bool pair_map_bijective = false;     ///< {q_i,q_j} -> q_i - q_j hits the 15-element orbit bijectively
    bool pairing_one_on_overlap = false; ///< <q_i-q_j, q_k-q_l> = 1 iff the index pairs share one index
    bool pairing_one_on_disjoint = false;
};

/// Orbit sizes of the stabilizer of alpha on Jac[2]/alpha, plus the check
/// that differences of the six classes of theta(alpha)/alpha realize the
/// middle orbit with the Weil pairing given by index overlap.
inline OrbitReport orbit_sizes(TwoTorsion alpha) {
    if (alpha.bits == 0) throw Error(ErrorKind::InvalidArgument, "alpha must be nonzero");
    OrbitReport rep;
    auto coset_rep = [&](unsigned v) { return std::min(v, v ^ alpha.bits); };
    std::vector<unsigned> seen;
    for (unsigned v = 0; v < 64; ++v) {
        const unsigned r = coset_rep(v);
        if (std::find(seen.begin(), seen.end(), r) != seen.end()) continue;
        seen.push_back(r);
        if (r == 0) rep.sizes[0]++;
        else if (weil_bits(static_cast<std::uint8_t>(r), alpha.bits) == 0) rep.sizes[1]++;
        else rep.sizes[2]++;
    }

    const Tuple12& t = tuple_of(alpha);
    std::array<unsigned, 6> q{};
    for (std::size_t i = 0; i < 6; ++i) q[i] = t.pairs[i].first.bits;
    std::vector<unsigned> images;
    std::vector<std::pair<int, int>> index_pairs;
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) {
            images.push_back(coset_rep(q[static_cast<std::size_t>(i)] ^ q[static_cast<std::size_t>(j)]));
            index_pairs.emplace_back(i, j);
        }
    std::vector<unsigned> sorted = images;
    std::sort(sorted.begin(), sorted.end());
    const bool distinct = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
    bool in_orbit = true;
    for (unsigned v : images) in_orbit = in_orbit && v != 0 && weil_bits(static_cast<std::uint8_t>(v), alpha.bits) == 0;
    rep.pair_map_bijective = distinct && in_orbit && images.size() == 15 && rep.sizes[1] == 15;

    bool overlap_rule = true, disjoint_rule = true;
    for (std::size_t a = 0; a < images.size(); ++a)
        for (std::size_t b = a + 1; b < images.size(); ++b) {
            const auto [i, j] = index_pairs[a];
            const auto [k, l] = index_pairs[b];
            const bool share = i == k || i == l || j == k || j == l;
            const int w = weil_bits(static_cast<std::uint8_t>(images[a]), static_cast<std::uint8_t>(images[b]));
            overlap_rule = overlap_rule && (w == (share ? 1 : 0));
            disjoint_rule = disjoint_rule && (w == (share ? 0 : 1));
        }
    rep.pairing_one_on_overlap = overlap_rule;
    rep.pairing_one_on_disjoint = disjoint_rule;
    return rep;
}

/// Number of syzygetic partners gamma' of t.gamma (gamma' != 0, gamma)
/// whose tuple contains both a and b.
inline int pair_statistic(const Tuple12& t, ThetaLabel a, ThetaLabel b) {
    if (a == b || !t.contains(a) || !t.contains(b))
        throw Error(ErrorKind::InvalidArgument, "pair_statistic needs two distinct members of the tuple");
    int count = 0;
    for (const TwoTorsion g : two_torsion_classes()) {
        if (g == t.gamma || weil(g, t.gamma) != 0) continue;
        const LabelSet s = tuple_of(g).as_set();
        if ((s & bit_of(a)) && (s & bit_of(b))) ++count;
    }
    return count;
}

struct PairThreshold {
    int v_pair = -1;     ///< statistic on every true pair
    int v_nonpair = -1;  ///< statistic on every non-pair inside a tuple
};

/// Enumerates the statistic over all tuples; throws if either class is not
/// constant or the two values collide.
inline PairThreshold pair_threshold() {
    static const PairThreshold value = [] {
        PairThreshold th;
        for (const Tuple12& t : all_tuples())
            for (std::size_t i = 0; i < 12; ++i)
                for (std::size_t j = i + 1; j < 12; ++j) {
                    const ThetaLabel a = t.members[i], b = t.members[j];
                    const int s = pair_statistic(t, a, b);
                    int& slot = (a + t.gamma == b) ? th.v_pair : th.v_nonpair;
                    if (slot < 0) slot = s;
                    else if (slot != s) throw Error(ErrorKind::InconsistentStructure, "pair statistic is not constant");
                }
        if (th.v_pair == th.v_nonpair) throw Error(ErrorKind::InconsistentStructure, "pair statistic does not separate");
        return th;
    }();
    return value;
}

/// A triple of odd labels is azygetic iff its vector sum is even.
constexpr bool azygetic_triple(ThetaLabel a, ThetaLabel b, ThetaLabel c) {
    return parity_bits(static_cast<std::uint8_t>(a.bits ^ b.bits ^ c.bits)) == 0;
}

template <class Range>
bool is_aronhold(const Range& seven) {
    const std::size_t n = std::size(seven);
    if (n != 7) return false;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k)
                if (!azygetic_triple(seven[i], seven[j], seven[k])) return false;
    return true;
}

/// All 7-sets of odd labels with every triple azygetic, in lexicographic
/// order of their sorted members.
inline const std::vector<std::array<ThetaLabel, 7>>& aronhold_sets() {
    static const std::vector<std::array<ThetaLabel, 7>> sets = [] {
        std::vector<std::array<ThetaLabel, 7>> out;
        const auto& odd = odd_labels();
        std::array<ThetaLabel, 7> cur{};
        auto rec = [&](auto&& self, std::size_t start, std::size_t depth) -> void {
            if (depth == 7) {
                out.push_back(cur);
                return;
            }
            for (std::size_t i = start; i < odd.size(); ++i) {
                bool ok = true;
                for (std::size_t a = 0; a < depth && ok; ++a)
                    for (std::size_t b = a + 1; b < depth && ok; ++b) ok = azygetic_triple(cur[a], cur[b], odd[i]);
                if (!ok) continue;
                cur[depth] = odd[i];
                self(self, i + 1, depth + 1);
            }
        };
        rec(rec, 0, 0);
        return out;
    }();
    return sets;
}

/// Number of tuples containing a given odd label; throws unless constant.
inline int tuples_per_label() {
    static const int value = [] {
        int common = -1;
        for (const ThetaLabel a : odd_labels()) {
            int n = 0;
            for (const Tuple12& t : all_tuples()) n += t.contains(a) ? 1 : 0;
            if (common >= 0 && n != common) throw Error(ErrorKind::InconsistentStructure, "label multiplicity is not constant");
            common = n;
        }
        return common;
    }();
    return value;
}

/// Number of tuples containing a given pair of odd labels; throws unless constant.
inline int tuples_per_pair() {
    static const int value = [] {
        int common = -1;
        const auto& odd = odd_labels();
        for (std::size_t i = 0; i < odd.size(); ++i)
            for (std::size_t j = i + 1; j < odd.size(); ++j) {
                const LabelSet both = bit_of(odd[i]) | bit_of(odd[j]);
                int n = 0;
                for (const Tuple12& t : all_tuples()) n += (t.as_set() & both) == both ? 1 : 0;
                if (common >= 0 && n != common) throw Error(ErrorKind::InconsistentStructure, "pair multiplicity is not constant");
                common = n;
            }
        return common;
    }();
    return value;
}

struct ModelConstants {
    int odd = 0;
    int even = 0;
    int two_torsion = 0;
    int tuple_size = 0;
    long sp6_order = 0;
    int aronhold = 0;
    int syz_intersection = 0;
    int azy_intersection = 0;
};

/// |Sp6(F2)| from the standard order formula 2^9 (2^2-1)(2^4-1)(2^6-1).
constexpr long sp6_order_formula() { return 512L * 3L * 15L * 63L; }

inline ModelConstants model_constants() {
    ModelConstants c;
    c.odd = static_cast<int>(odd_labels().size());
    c.even = 64 - c.odd;
    c.two_torsion = static_cast<int>(two_torsion_classes().size());
    c.tuple_size = static_cast<int>(tuple12(make_torsion(1, 0)).members.size());
    c.sp6_order = sp6_order_formula();
    c.aronhold = static_cast<int>(aronhold_sets().size());
    c.syz_intersection = -1;
    for (const TwoTorsion g : two_torsion_classes())
        if (g != make_torsion(4, 0) && weil(make_torsion(4, 0), g) == 0) {
            c.syz_intersection = intersection_size(make_torsion(4, 0), g);
            break;
        }
    c.azy_intersection = azygetic_intersection();
    return c;
}

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct SelfTestReport {
    ModelConstants constants;
    std::vector<Check> checks;

    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
    }
};

/// Runs every law of the model exhaustively.
inline SelfTestReport selftest() {
    SelfTestReport rep;
    rep.constants = model_constants();
    const auto& c = rep.constants;
    auto add = [&](std::string name, bool ok, std::string detail = {}) {
        rep.checks.push_back({std::move(name), ok, std::move(detail)});
    };

    add("odd labels = 28, even = 36", c.odd == 28 && c.even == 36,
        std::to_string(c.odd) + " odd, " + std::to_string(c.even) + " even");
    add("two-torsion classes = 63", c.two_torsion == 63, std::to_string(c.two_torsion));

    bool weil_ok = true;
    for (unsigned u = 0; u < 64; ++u) {
        weil_ok = weil_ok && weil_bits(static_cast<std::uint8_t>(u), static_cast<std::uint8_t>(u)) == 0;
        for (unsigned v = 0; v < 64; ++v)
            for (unsigned w = 0; w < 64; ++w)
                weil_ok = weil_ok && weil_bits(static_cast<std::uint8_t>(u), static_cast<std::uint8_t>(v ^ w)) ==
                                         (weil_bits(static_cast<std::uint8_t>(u), static_cast<std::uint8_t>(v)) ^
                                          weil_bits(static_cast<std::uint8_t>(u), static_cast<std::uint8_t>(w)));
    }
    add("Weil pairing bilinear and alternating", weil_ok);

    bool quad_ok = true;
    for (unsigned u = 0; u < 64; ++u)
        for (unsigned v = 0; v < 64; ++v)
            quad_ok = quad_ok && parity_bits(static_cast<std::uint8_t>(u ^ v)) ==
                                     (parity_bits(static_cast<std::uint8_t>(u)) ^ parity_bits(static_cast<std::uint8_t>(v)) ^
                                      weil_bits(static_cast<std::uint8_t>(u), static_cast<std::uint8_t>(v)));
    add("parity is a quadratic form with polar Weil pairing", quad_ok);

    bool tuples_ok = true;
    std::vector<int> pair_hits(64 * 64, 0);
    for (const Tuple12& t : all_tuples()) {
        tuples_ok = tuples_ok && t.members.size() == 12;
        for (const auto& [a, b] : t.pairs) tuples_ok = tuples_ok && (a + t.gamma) == b;
        for (std::size_t i = 0; i < 12; ++i)
            for (std::size_t j = i + 1; j < 12; ++j) {
                if (difference(t.members[i], t.members[j]) == t.gamma) ++pair_hits[t.members[i].bits * 64 + t.members[j].bits];
            }
    }
    int covered = 0;
    bool each_once = true;
    const auto& odd = odd_labels();
    for (std::size_t i = 0; i < odd.size(); ++i)
        for (std::size_t j = i + 1; j < odd.size(); ++j) {
            const int h = pair_hits[odd[i].bits * 64 + odd[j].bits];
            covered += h;
            each_once = each_once && h == 1;
        }
    add("63 tuples of 12 in 6 pairs; fiber size (28*27/2)/63 = 6", tuples_ok && 28 * 27 / 2 / 63 == 6);
    add("every odd pair is a pair of exactly one tuple (378 = 63*6)", each_once && covered == 378 && 63 * 6 == 378,
        std::to_string(covered) + " pairs covered");

    bool member_count_ok = true;
    for (const ThetaLabel th : odd) {
        int n = 0;
        for (const Tuple12& t : all_tuples()) n += t.contains(th) ? 1 : 0;
        member_count_ok = member_count_ok && n == 27;
    }
    add("every odd label lies in 27 tuples", member_count_ok);

    bool orbit_ok = true, overlap = true, disjoint = true;
    for (const TwoTorsion a : two_torsion_classes()) {
        const OrbitReport r = orbit_sizes(a);
        orbit_ok = orbit_ok && r.sizes == std::array<int, 3>{1, 15, 16} && r.pair_map_bijective;
        overlap = overlap && r.pairing_one_on_overlap;
        disjoint = disjoint && r.pairing_one_on_disjoint;
    }
    add("orbit sizes (1,15,16) and 6*5/2 = 15 pair map bijective", orbit_ok && 6 * 5 / 2 == 15);
    add("pulled-back Weil pairing is 1 exactly on overlapping index pairs", overlap && !disjoint,
        overlap ? "orientation: 1 on overlap" : (disjoint ? "orientation: 1 on disjoint" : "neither"));

    bool syz_ok = true, azy_const = true, translate_ok = true;
    int azy_value = -1;
    for (const TwoTorsion g1 : two_torsion_classes())
        for (const TwoTorsion g2 : two_torsion_classes()) {
            if (g1 == g2) continue;
            const int s = intersection_size(g1, g2);
            if (weil(g1, g2) == 0) {
                syz_ok = syz_ok && s == 4;
                const LabelSet inter = tuple_of(g1).as_set() & tuple_of(g2).as_set();
                const ThetaLabel base{static_cast<std::uint8_t>(std::countr_zero(inter))};
                const LabelSet coset = bit_of(base) | bit_of(base + g1) | bit_of(base + g2) |
                                       bit_of(base + TwoTorsion{static_cast<std::uint8_t>(g1.bits ^ g2.bits)});
                translate_ok = translate_ok && coset == inter;
            } else {
                if (azy_value < 0) azy_value = s;
                azy_const = azy_const && s == azy_value;
            }
        }
    add("syzygetic intersections have size 4", syz_ok && c.syz_intersection == 4);
    add("syzygetic intersections are translates of {0, g1, g2, g1+g2}", translate_ok);
    add("azygetic intersection size is constant and divisible by 3", azy_const && azy_value % 3 == 0 && azy_value == c.azy_intersection,
        "value " + std::to_string(azy_value));

    bool row_ok = true, double_count_ok = true;
    for (const TwoTorsion g1 : two_torsion_classes()) {
        int zeros = 0, ones = 0, sum = 0;
        for (const TwoTorsion g2 : two_torsion_classes()) {
            if (g1 == g2) continue;
            (weil(g1, g2) == 0 ? zeros : ones)++;
            sum += intersection_size(g1, g2);
        }
        row_ok = row_ok && zeros == 30 && ones == 32;
        double_count_ok = double_count_ok && sum == 30 * 4 + 32 * azy_value && sum == 12 * 26;
    }
    add("each class has 30 syzygetic and 32 azygetic partners", row_ok);
    add("sum of intersection sizes = 30*4 + 32*azygetic = 12*26", double_count_ok);

    const PairThreshold th = pair_threshold();
    add("pair statistic separates pairs from non-pairs", th.v_pair != th.v_nonpair,
        "v_pair " + std::to_string(th.v_pair) + ", v_nonpair " + std::to_string(th.v_nonpair));

    bool aron_ok = true;
    for (const auto& s : aronhold_sets()) aron_ok = aron_ok && is_aronhold(s);
    add("Aronhold sets: 288, every triple azygetic", c.aronhold == 288 && aron_ok, std::to_string(c.aronhold));
    add("Sp6(2) order 1451520 = 63*30*12*8^2 = 288*7!",
        c.sp6_order == 1451520L && 63L * 30 * 12 * 64 == c.sp6_order && static_cast<long>(c.aronhold) * 5040L == c.sp6_order);
    return rep;
}

}  // namespace bitan::theta
