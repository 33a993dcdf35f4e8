#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "subiso/errors.hpp"
#include "subiso/formula.hpp"
#include "subiso/graph.hpp"

namespace subiso {

/// Colour per variable such that no clause holds two variables of one colour.
struct variable_coloring {
    std::size_t k = 0;
    std::vector<color> color_of;

    friend bool operator==(const variable_coloring&, const variable_coloring&) = default;
};

/// Group per clause; clauses sharing a group have pairwise disjoint colour sets.
struct clause_packing {
    std::size_t group_count = 0;
    std::vector<std::size_t> group_of;

    friend bool operator==(const clause_packing&, const clause_packing&) = default;
};

/// Variables as vertices, adjacent iff they share a clause.
inline colored_multigraph conflict_graph(const cnf_formula& f) {
    graph_builder b(f.var_count(), 1, 1);
    for (const auto& c : f.clauses()) {
        for (std::size_t i = 0; i < c.size(); ++i) {
            for (std::size_t j = i + 1; j < c.size(); ++j) {
                if (c[i].var != c[j].var) {
                    b.add_edge(c[i].var, c[j].var, 0);
                }
            }
        }
    }
    return std::move(b).build();
}

inline std::size_t max_degree(const colored_multigraph& g) {
    std::size_t best = 0;
    for (vertex_id v = 0; v < g.vertex_count(); ++v) {
        best = std::max(best, g.degree(v));
    }
    return best;
}

/// True iff no clause of `f` holds two distinct variables of the same colour.
inline bool is_proper(const cnf_formula& f, const variable_coloring& col) {
    if (col.color_of.size() != f.var_count()) {
        return false;
    }
    for (const auto& c : f.clauses()) {
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (col.color_of[c[i].var] >= col.k) {
                return false;
            }
            for (std::size_t j = i + 1; j < c.size(); ++j) {
                if (c[i].var != c[j].var && col.color_of[c[i].var] == col.color_of[c[j].var]) {
                    return false;
                }
            }
        }
    }
    return true;
}

/// Greedy colouring of the conflict graph: variables in index order, each
/// taking the lowest colour unused by its already-coloured neighbours.
inline variable_coloring greedy_color(const cnf_formula& f, std::size_t k) {
    const auto g = conflict_graph(f);
    variable_coloring col{k, std::vector<color>(f.var_count(), 0)};
    std::vector<bool> taken;
    for (vertex_id v = 0; v < g.vertex_count(); ++v) {
        taken.assign(g.degree(v) + 1, false);
        for (const auto& nb : g.neighbors(v)) {
            if (nb.vertex < v && col.color_of[nb.vertex] < taken.size()) {
                taken[col.color_of[nb.vertex]] = true;
            }
        }
        const auto free = std::size_t(std::find(taken.begin(), taken.end(), false) - taken.begin());
        if (free >= k) {
            throw construction_error("greedy_color: variable " + std::to_string(v + 1) + " (degree " +
                                     std::to_string(g.degree(v)) + ") needs more than " +
                                     std::to_string(k) + " colours");
        }
        col.color_of[v] = color(free);
    }
    return col;
}

/// Largest colour-class size allowed after balancing: ceil(n / (k - 9)).
inline std::size_t balanced_class_bound(std::size_t k, std::size_t n) {
    if (k <= 9) {
        throw contract_error("balanced_class_bound: k must exceed 9");
    }
    return (n + (k - 9) - 1) / (k - 9);
}

/// Splits oversized classes of a proper colouring with at most nine colours:
/// while some class exceeds ceil(n/(k-9)) variables, its lowest-indexed
/// ceil(n/(k-9)) members move to a fresh colour. Sub-classes of an independent
/// class stay independent, so properness is kept.
inline variable_coloring balance_coloring(const variable_coloring& col, std::size_t k, std::size_t n) {
    const std::size_t bound = balanced_class_bound(k, n);
    variable_coloring out{k, col.color_of};
    std::size_t used = 0;
    for (auto c : out.color_of) {
        if (c >= 9) {
            throw contract_error("balance_coloring: input must use at most 9 colours");
        }
        used = std::max<std::size_t>(used, c + 1);
    }
    for (;;) {
        std::vector<std::size_t> sizes(used, 0);
        for (auto c : out.color_of) {
            ++sizes[c];
        }
        const auto big = std::find_if(sizes.begin(), sizes.end(), [&](std::size_t s) { return s > bound; });
        if (big == sizes.end()) {
            break;
        }
        const color from = color(big - sizes.begin());
        if (used >= k) {
            throw construction_error("balance_coloring: ran out of colours (k = " + std::to_string(k) + ")");
        }
        const color fresh = color(used++);
        std::size_t moved = 0;
        for (auto& c : out.color_of) {
            if (c == from && moved < bound) {
                c = fresh;
                ++moved;
            }
        }
    }
    return out;
}

/// k = ceil(log2 n - log2 log2 n) + 9, defined for n >= 16.
inline std::size_t compute_k(std::size_t n) {
    if (n < 16) {
        throw contract_error("compute_k: requires n >= 16 variables, got " + std::to_string(n));
    }
    const long double lg = std::log2(static_cast<long double>(n));
    const long double x = lg - std::log2(lg);
    const long double nearest = std::round(x);
    const long double ceiling = std::fabs(x - nearest) < 1e-12L ? nearest : std::ceil(x);
    return std::size_t(ceiling) + 9;
}

inline constexpr std::size_t max_packing_k = 30;

/// Bitmask of the colours of a clause's variables.
inline color_mask clause_color_mask(const clause& c, const variable_coloring& col) {
    color_mask m = 0;
    for (const auto& lit : c) {
        m |= color_mask(1) << col.color_of[lit.var];
    }
    return m;
}

/// Greedy packing: clauses in index order, each into the lowest-indexed group
/// whose colour set is disjoint from the clause's.
inline clause_packing pack_clauses(const cnf_formula& f, const variable_coloring& col, std::size_t k) {
    if (col.k != k) {
        throw contract_error("pack_clauses: colouring uses k = " + std::to_string(col.k) + ", packing asked for " +
                             std::to_string(k));
    }
    if (k > max_packing_k || k >= max_edge_colors) {
        throw contract_error("pack_clauses: k = " + std::to_string(k) + " is too large");
    }
    if (!is_proper(f, col)) {
        throw contract_error("pack_clauses: colouring is not proper for the formula");
    }
    const std::size_t groups = std::size_t(1) << k;
    std::vector<color_mask> used(groups, 0);
    clause_packing pack{groups, std::vector<std::size_t>(f.clause_count(), 0)};
    for (std::size_t i = 0; i < f.clause_count(); ++i) {
        const auto m = clause_color_mask(f[i], col);
        std::size_t g = 0;
        while (g < groups && (used[g] & m) != 0) {
            ++g;
        }
        if (g == groups) {
            throw construction_error("pack_clauses: no feasible group for clause " + std::to_string(i) +
                                     " among " + std::to_string(groups));
        }
        used[g] |= m;
        pack.group_of[i] = g;
    }
    return pack;
}

/// Within each group, clause colour sets are pairwise disjoint.
inline bool is_valid_packing(const cnf_formula& f, const variable_coloring& col, const clause_packing& pack) {
    if (pack.group_of.size() != f.clause_count()) {
        return false;
    }
    std::vector<color_mask> used(pack.group_count, 0);
    for (std::size_t i = 0; i < f.clause_count(); ++i) {
        const auto g = pack.group_of[i];
        if (g >= pack.group_count) {
            return false;
        }
        const auto m = clause_color_mask(f[i], col);
        if ((used[g] & m) != 0) {
            return false;
        }
        used[g] |= m;
    }
    return true;
}

struct grouping {
    std::size_t k = 0;
    variable_coloring coloring;
    clause_packing packing;
};

/// Auto regime: (3,4)-form input with n >= 16, k = compute_k(n), greedy
/// 9-colouring balanced to k colours, then greedy packing into 2^k groups.
inline grouping auto_grouping(const cnf_formula& f) {
    if (!validate_34(f).empty()) {
        throw contract_error("auto_grouping: formula is not in (3,4)-form");
    }
    const std::size_t n = f.var_count();
    const std::size_t k = compute_k(n);
    auto col = balance_coloring(greedy_color(f, 9), k, n);
    auto pack = pack_clauses(f, col, k);
    return {k, std::move(col), std::move(pack)};
}

/// Test regime: caller-chosen k, greedy colouring with k colours.
inline grouping test_grouping(const cnf_formula& f, std::size_t k) {
    auto col = greedy_color(f, k);
    auto pack = pack_clauses(f, col, k);
    return {k, std::move(col), std::move(pack)};
}

inline void write_coloring(std::ostream& out, const variable_coloring& col) {
    for (std::size_t v = 0; v < col.color_of.size(); ++v) {
        out << "var " << v << " color " << col.color_of[v] << '\n';
    }
}

inline void write_packing(std::ostream& out, const clause_packing& pack) {
    for (std::size_t i = 0; i < pack.group_of.size(); ++i) {
        out << "clause " << i << " group " << pack.group_of[i] << '\n';
    }
}

} // namespace subiso
