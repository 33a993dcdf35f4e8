#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "subiso/combinatorics.hpp"
#include "subiso/errors.hpp"
#include "subiso/formula.hpp"
#include "subiso/graph.hpp"
#include "subiso/grouping.hpp"
#include "subiso/solve.hpp"

// SAT -> SI-Col(3, k).
//
// Both pattern and host share one vertex layout for a given k:
//   [0, 2^k)                 blue vertices (pattern: one per group;
//                            host: copies of valuation strings)
//   [2^k, 2^k + R)           red path, R = 8*C(k,3); red position p (distance p
//                            from the green vertex) has id 2^k + p - 1
//   2^k + R                  the green vertex, pendant to red position 1
//
// Valuation strings are k-bit integers; bit j is the value of the colour-j
// variable. Red labels (i1 < i2 < i3, b1 b2 b3) are ordered by the triple
// lexicographically, then by the bits read as the binary number b1 b2 b3.

namespace subiso {

struct red_vertex_label {
    std::array<std::size_t, 3> index{};
    std::array<bool, 3> bit{};

    friend bool operator==(const red_vertex_label&, const red_vertex_label&) = default;
};

inline std::size_t red_vertex_count(std::size_t k) {
    return 8 * std::size_t(binomial(k, 3));
}

/// 2^k + 8*C(k,3) + 1.
inline std::size_t sat_instance_vertex_count(std::size_t k) {
    return (std::size_t(1) << k) + red_vertex_count(k) + 1;
}

namespace detail {

/// Lexicographic rank of i1 < i2 < i3 among 3-subsets of [k].
inline std::size_t triple_rank(std::size_t i1, std::size_t i2, std::size_t i3, std::size_t k) {
    std::size_t rank = 0;
    for (std::size_t a = 0; a < i1; ++a) {
        rank += (k - 1 - a) * (k - 2 - a) / 2;
    }
    for (std::size_t b = i1 + 1; b < i2; ++b) {
        rank += k - 1 - b;
    }
    return rank + (i3 - i2 - 1);
}

} // namespace detail

/// Distance from the green vertex, in [1, 8*C(k,3)].
inline std::size_t red_vertex_position(const red_vertex_label& label, std::size_t k) {
    const auto& i = label.index;
    if (!(i[0] < i[1] && i[1] < i[2] && i[2] < k)) {
        throw contract_error("red_vertex_position: indices must satisfy i1 < i2 < i3 < k");
    }
    const std::size_t bits = (std::size_t(label.bit[0]) << 2) | (std::size_t(label.bit[1]) << 1) |
                             std::size_t(label.bit[2]);
    return 1 + 8 * detail::triple_rank(i[0], i[1], i[2], k) + bits;
}

/// Inverse of red_vertex_position.
inline red_vertex_label red_vertex_label_at(std::size_t position, std::size_t k) {
    if (position == 0 || position > red_vertex_count(k)) {
        throw contract_error("red_vertex_label_at: position out of range");
    }
    std::size_t rank = (position - 1) / 8;
    const std::size_t bits = (position - 1) % 8;
    red_vertex_label label;
    label.bit = {bool(bits & 4), bool(bits & 2), bool(bits & 1)};
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            const std::size_t span = k - 1 - b;
            if (rank < span) {
                label.index = {a, b, b + 1 + rank};
                return label;
            }
            rank -= span;
        }
    }
    throw contract_error("red_vertex_label_at: unreachable");
}

/// Vertex ids of the shared layout.
struct sat_layout {
    std::size_t k = 0;

    explicit sat_layout(std::size_t k_) : k(k_) {
        if (k < 3 || k > max_packing_k) {
            throw contract_error("sat_layout: k must lie in [3, " + std::to_string(max_packing_k) + "]");
        }
    }

    std::size_t blue_count() const { return std::size_t(1) << k; }
    std::size_t red_count() const { return red_vertex_count(k); }
    std::size_t vertex_count() const { return blue_count() + red_count() + 1; }
    vertex_id red(std::size_t position) const { return vertex_id(blue_count() + position - 1); }
    vertex_id green() const { return vertex_id(blue_count() + red_count()); }
    bool is_blue(vertex_id v) const { return v < blue_count(); }
    bool is_red(vertex_id v) const { return v >= blue_count() && v < green(); }
    std::size_t red_position(vertex_id v) const { return v - blue_count() + 1; }
};

/// The red label of a clause: its variables' colours in increasing order with
/// the unique valuation that falsifies it.
inline red_vertex_label falsifying_label(const clause& c, const variable_coloring& col) {
    if (c.size() != 3) {
        throw contract_error("falsifying_label: clause must have exactly three literals");
    }
    std::array<std::pair<color, bool>, 3> items;
    for (std::size_t j = 0; j < 3; ++j) {
        items[j] = {col.color_of[c[j].var], !c[j].positive};
    }
    std::sort(items.begin(), items.end());
    red_vertex_label label;
    for (std::size_t j = 0; j < 3; ++j) {
        label.index[j] = items[j].first;
        label.bit[j] = items[j].second;
    }
    return label;
}

namespace detail {

inline void add_assignment_gadget(graph_builder& b, const sat_layout& layout) {
    for (std::size_t p = 1; p <= layout.red_count(); ++p) {
        b.set_color(layout.red(p), colors::red);
        if (p > 1) {
            b.add_edge(layout.red(p - 1), layout.red(p), 0);
        }
    }
    b.set_color(layout.green(), colors::green);
    b.add_edge(layout.green(), layout.red(1), 0);
}

inline void check_reduction_inputs(const cnf_formula& f, const variable_coloring& col,
                                   const clause_packing& pack, std::size_t k) {
    if (col.k != k) {
        throw contract_error("sat2si: colouring has k = " + std::to_string(col.k) + ", expected " +
                             std::to_string(k));
    }
    if (pack.group_count != (std::size_t(1) << k)) {
        throw contract_error("sat2si: packing must have 2^k groups");
    }
    for (std::size_t i = 0; i < f.clause_count(); ++i) {
        const auto& c = f[i];
        if (c.size() != 3 || c[0].var == c[1].var || c[0].var == c[2].var || c[1].var == c[2].var) {
            throw contract_error("sat2si: clause " + std::to_string(i) +
                                 " must hold exactly three distinct variables");
        }
    }
    if (!is_proper(f, col)) {
        throw contract_error("sat2si: colouring is not proper");
    }
    if (!is_valid_packing(f, col, pack)) {
        throw contract_error("sat2si: packing is not valid");
    }
}

} // namespace detail

/// The pattern graph: one blue vertex per group, the assignment gadget, a
/// colour-l(x) edge between the groups of any two clauses sharing variable x,
/// and a colour-0 edge from each clause's group to its falsifying red label.
/// Identical for every host of the family.
inline colored_multigraph build_pattern(const cnf_formula& f, const variable_coloring& col,
                                        const clause_packing& pack, std::size_t k) {
    detail::check_reduction_inputs(f, col, pack, k);
    const sat_layout layout(k);
    graph_builder b(layout.vertex_count(), 3, k);
    for (vertex_id v = 0; v < layout.blue_count(); ++v) {
        b.set_color(v, colors::blue);
    }
    detail::add_assignment_gadget(b, layout);

    std::vector<std::vector<std::size_t>> clauses_of(f.var_count());
    for (std::size_t i = 0; i < f.clause_count(); ++i) {
        for (const auto& lit : f[i]) {
            clauses_of[lit.var].push_back(i);
        }
    }
    for (variable x = 0; x < f.var_count(); ++x) {
        const auto& cs = clauses_of[x];
        for (std::size_t a = 0; a < cs.size(); ++a) {
            for (std::size_t c = a + 1; c < cs.size(); ++c) {
                b.add_edge(vertex_id(pack.group_of[cs[a]]), vertex_id(pack.group_of[cs[c]]),
                           col.color_of[x]);
            }
        }
    }
    for (std::size_t i = 0; i < f.clause_count(); ++i) {
        const auto label = falsifying_label(f[i], col);
        b.add_edge(vertex_id(pack.group_of[i]), layout.red(red_vertex_position(label, k)), 0);
    }
    return std::move(b).build();
}

/// Weak composition of 2^k into 2^k parts: s[i] host copies of valuation string i.
using preimage_sequence = std::vector<std::uint64_t>;

/// Host graph H_s evaluated on demand. Blue vertices u, v (u != v) are joined in
/// colour j iff their strings agree at bit j; blue u and red (i, b) are joined
/// in colour 0 unless u matches b at all of i1, i2, i3; the gadget is as in the
/// pattern.
class sat_host_view {
public:
    sat_host_view(std::size_t k, const preimage_sequence& s) : layout_(k) {
        if (s.size() != layout_.blue_count()) {
            throw contract_error("sat_host: sequence must have 2^k entries");
        }
        std::uint64_t sum = 0;
        for (auto x : s) {
            sum += x;
        }
        if (sum != layout_.blue_count()) {
            throw contract_error("sat_host: sequence sums to " + std::to_string(sum) + ", expected 2^k = " +
                                 std::to_string(layout_.blue_count()));
        }
        strings_.reserve(layout_.blue_count());
        for (std::size_t i = 0; i < s.size(); ++i) {
            strings_.insert(strings_.end(), s[i], std::uint32_t(i));
        }
        labels_.reserve(layout_.red_count());
        for (std::size_t p = 1; p <= layout_.red_count(); ++p) {
            labels_.push_back(red_vertex_label_at(p, k));
        }
    }

    const sat_layout& layout() const noexcept { return layout_; }
    std::size_t vertex_count() const { return layout_.vertex_count(); }
    std::size_t color_count() const { return 3; }
    std::size_t edge_color_count() const { return layout_.k; }

    /// Valuation string carried by a blue host vertex.
    std::uint32_t string_of(vertex_id blue) const { return strings_[blue]; }
    const std::vector<std::uint32_t>& strings() const noexcept { return strings_; }

    color vertex_color(vertex_id v) const {
        if (layout_.is_blue(v)) {
            return colors::blue;
        }
        return layout_.is_red(v) ? colors::red : colors::green;
    }

    color_mask edge_mask(vertex_id u, vertex_id v) const {
        if (u == v) {
            return 0;
        }
        if (u > v) {
            std::swap(u, v);
        }
        const color_mask all = (color_mask(1) << layout_.k) - 1;
        if (layout_.is_blue(v)) {
            return ~(color_mask(strings_[u]) ^ color_mask(strings_[v])) & all;
        }
        if (layout_.is_blue(u) && layout_.is_red(v)) {
            const auto& label = labels_[layout_.red_position(v) - 1];
            const auto str = strings_[u];
            for (std::size_t j = 0; j < 3; ++j) {
                if (bool((str >> label.index[j]) & 1) != label.bit[j]) {
                    return 1;
                }
            }
            return 0;
        }
        if (layout_.is_red(u) && layout_.is_red(v)) {
            return v == u + 1 ? 1 : 0;
        }
        if (layout_.is_red(u) && v == layout_.green()) {
            return u == layout_.red(1) ? 1 : 0;
        }
        return 0;
    }

private:
    sat_layout layout_;
    std::vector<std::uint32_t> strings_;
    std::vector<red_vertex_label> labels_;
};

/// Materialized H_s.
inline colored_multigraph build_host(std::size_t k, const preimage_sequence& s) {
    const sat_host_view view(k, s);
    const auto& layout = view.layout();
    graph_builder b(layout.vertex_count(), 3, k);
    for (vertex_id v = 0; v < layout.blue_count(); ++v) {
        b.set_color(v, colors::blue);
    }
    detail::add_assignment_gadget(b, layout);
    for (vertex_id u = 0; u < layout.blue_count(); ++u) {
        for (vertex_id v = u + 1; v < layout.green(); ++v) {
            b.add_edges(u, v, view.edge_mask(u, v));
        }
    }
    return std::move(b).build();
}

inline big_count sequence_count(std::size_t k) {
    const std::uint64_t n = std::uint64_t(1) << k;
    return composition_count(n, n);
}

inline constexpr std::uint64_t default_enumeration_cap = 1'000'000;

/// All preimage sequences for k in lexicographic order; refuses up front when
/// their number C(2^{k+1}-1, 2^k-1) exceeds `cap` unless forced.
inline composition_stream enumerate_sequences(std::size_t k, const big_count& cap = default_enumeration_cap,
                                              bool force = false) {
    if (k >= 63) {
        throw contract_error("enumerate_sequences: k too large");
    }
    const std::uint64_t n = std::uint64_t(1) << k;
    return composition_stream::capped(n, std::size_t(n), cap, force);
}

struct sat_witness {
    preimage_sequence sequence;
    embedding map;
    /// Valuation string assigned to each group.
    std::vector<std::uint32_t> group_strings;
};

/// From a satisfying assignment: each group's valuation string (its variables'
/// values by colour; a colour absent from the group takes the value of the
/// lowest-indexed variable of that colour, or 0 if the colour is unused), the
/// preimage sizes of those strings, and the embedding sending groups in index
/// order to host copies in id order and the gadget to itself.
inline sat_witness witness_sequence_and_embedding(const cnf_formula& f, const variable_coloring& col,
                                                  const clause_packing& pack, std::size_t k,
                                                  const assignment& a) {
    detail::check_reduction_inputs(f, col, pack, k);
    if (!a.satisfies(f)) {
        throw contract_error("witness: assignment does not satisfy the formula");
    }
    const sat_layout layout(k);
    const std::size_t groups = layout.blue_count();

    std::vector<std::optional<bool>> default_bit(k);
    for (variable x = 0; x < f.var_count(); ++x) {
        auto& slot = default_bit[col.color_of[x]];
        if (!slot) {
            slot = a.values[x];
        }
    }
    std::vector<std::uint32_t> strings(groups, 0);
    std::vector<color_mask> seen(groups, 0);
    for (std::size_t i = 0; i < f.clause_count(); ++i) {
        const auto g = pack.group_of[i];
        for (const auto& lit : f[i]) {
            const auto c = col.color_of[lit.var];
            seen[g] |= color_mask(1) << c;
            if (a.values[lit.var]) {
                strings[g] |= std::uint32_t(1) << c;
            }
        }
    }
    for (std::size_t g = 0; g < groups; ++g) {
        for (std::size_t c = 0; c < k; ++c) {
            if (!((seen[g] >> c) & 1) && default_bit[c].value_or(false)) {
                strings[g] |= std::uint32_t(1) << c;
            }
        }
    }

    preimage_sequence s(groups, 0);
    for (auto str : strings) {
        ++s[str];
    }
    std::vector<vertex_id> next_copy(groups, 0);
    for (std::size_t i = 0, first = 0; i < groups; first += s[i], ++i) {
        next_copy[i] = vertex_id(first);
    }
    embedding e{std::vector<vertex_id>(layout.vertex_count())};
    for (std::size_t g = 0; g < groups; ++g) {
        e.map[g] = next_copy[strings[g]]++;
    }
    for (vertex_id v = vertex_id(groups); v < layout.vertex_count(); ++v) {
        e.map[v] = v;
    }
    return {std::move(s), std::move(e), std::move(strings)};
}

/// Reads an assignment back from an embedding of the pattern into H_s: each
/// variable takes bit l(x) of the string at the image of the group of the
/// first clause containing it. Variables in no clause are false. The
/// embedding is verified first.
inline assignment decode_assignment(const embedding& e, const cnf_formula& f, const variable_coloring& col,
                                    const clause_packing& pack, std::size_t k, const preimage_sequence& s) {
    const auto pattern = build_pattern(f, col, pack, k);
    const sat_host_view host(k, s);
    const auto report = verify_embedding(pattern, host, e);
    if (!report.ok()) {
        throw contract_error("decode_assignment: not an embedding: " + report.violations.front());
    }
    assignment a{std::vector<bool>(f.var_count(), false)};
    std::vector<bool> done(f.var_count(), false);
    for (std::size_t i = 0; i < f.clause_count(); ++i) {
        const auto image = e.map[pack.group_of[i]];
        for (const auto& lit : f[i]) {
            if (!done[lit.var]) {
                done[lit.var] = true;
                a.values[lit.var] = (host.string_of(image) >> col.color_of[lit.var]) & 1;
            }
        }
    }
    if (!a.satisfies(f)) {
        throw std::logic_error("decode_assignment: decoded assignment does not satisfy the formula");
    }
    return a;
}

} // namespace subiso
