#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "subiso/errors.hpp"
#include "subiso/graph.hpp"

namespace subiso {

/// t' = 2 * ceil(sqrt(t)).
inline std::size_t gadget_width(std::size_t t) {
    if (t == 0) {
        throw contract_error("gadget_width: t must be >= 1");
    }
    std::size_t r = 0;
    while (r * r < t) {
        ++r;
    }
    return 2 * r;
}

/// Edge colour x -> (i, j), 1 <= i < j <= t', colours in order taking pairs in
/// lexicographic order.
inline std::vector<std::pair<std::size_t, std::size_t>> pair_code(std::size_t t) {
    const std::size_t width = gadget_width(t);
    std::vector<std::pair<std::size_t, std::size_t>> code;
    code.reserve(t);
    for (std::size_t i = 1; i <= width && code.size() < t; ++i) {
        for (std::size_t j = i + 1; j <= width && code.size() < t; ++j) {
            code.emplace_back(i, j);
        }
    }
    return code;
}

namespace detail {

inline void require_equal_sizes(const si_instance& inst, const char* who) {
    if (inst.pattern.vertex_count() != inst.host.vertex_count()) {
        throw contract_error(std::string(who) + ": pattern and host must have the same number of vertices (" +
                             std::to_string(inst.pattern.vertex_count()) + " vs " +
                             std::to_string(inst.host.vertex_count()) + ")");
    }
}

// Vertex u becomes ids u*(t'+2) + 0 (centre) and u*(t'+2) + i for u'_i.
inline colored_multigraph remove_edge_colors(const colored_multigraph& g, std::size_t width,
                                             const std::vector<std::pair<std::size_t, std::size_t>>& code) {
    const std::size_t block = width + 2;
    const color yellow = color(g.color_count());
    graph_builder b(g.vertex_count() * block, g.color_count() + 1, 1);
    for (vertex_id u = 0; u < g.vertex_count(); ++u) {
        const auto base = vertex_id(u * block);
        b.set_color(base, g.vertex_color(u));
        for (std::size_t i = 1; i <= width + 1; ++i) {
            b.set_color(vertex_id(base + i), yellow);
            if (i <= width) {
                b.add_edge(base, vertex_id(base + i), 0);
            }
            if (i > 1) {
                b.add_edge(vertex_id(base + i - 1), vertex_id(base + i), 0);
            }
        }
    }
    for (const auto& e : g.edges()) {
        const auto [i, j] = code[e.c];
        const auto bu = vertex_id(e.u * block), bv = vertex_id(e.v * block);
        b.add_edge(vertex_id(bu + i), vertex_id(bv + j), 0);
        b.add_edge(vertex_id(bu + j), vertex_id(bv + i), 0);
    }
    return std::move(b).build();
}

// Originals keep their ids; leaves follow in vertex order.
inline colored_multigraph remove_vertex_colors(const colored_multigraph& g) {
    std::size_t n = g.vertex_count();
    for (vertex_id v = 0; v < g.vertex_count(); ++v) {
        n += g.vertex_color(v) + 2;
    }
    graph_builder b(n, 1, g.edge_color_count());
    for (const auto& e : g.edges()) {
        b.add_edge(e.u, e.v, e.c);
    }
    auto next = vertex_id(g.vertex_count());
    for (vertex_id v = 0; v < g.vertex_count(); ++v) {
        for (std::size_t l = 0; l < g.vertex_color(v) + 2; ++l) {
            b.add_edge(v, next++, 0);
        }
    }
    return std::move(b).build();
}

} // namespace detail

/// Pattern = one edge, host = two isolated vertices; always NO.
inline si_instance canonical_no_instance(std::size_t edge_colors = 1) {
    graph_builder p(2, 1, edge_colors);
    p.add_edge(0, 1, 0);
    return si_instance(std::move(p).build(), graph_builder(2, 1, edge_colors).build());
}

/// Replaces t edge colours by one: each vertex gets a centre (its own colour)
/// and a yellow path of t'+1 vertices, yellow being the fresh colour index c.
/// An edge of colour x with code (i, j) becomes the crossing pair
/// (u'_i, v'_j), (u'_j, v'_i).
inline si_instance remove_edge_colors(const si_instance& inst) {
    detail::require_equal_sizes(inst, "remove_edge_colors");
    const std::size_t t = inst.pattern.edge_color_count();
    const std::size_t width = gadget_width(t);
    const auto code = pair_code(t);
    return si_instance(detail::remove_edge_colors(inst.pattern, width, code),
                       detail::remove_edge_colors(inst.host, width, code));
}

/// Replaces c vertex colours by one: a vertex of colour code i gains i+2
/// pendant leaves on edges of colour 0. Returns the canonical NO instance when
/// the colour histograms of pattern and host differ.
inline si_instance remove_vertex_colors(const si_instance& inst) {
    detail::require_equal_sizes(inst, "remove_vertex_colors");
    if (color_histograms(inst.pattern) != color_histograms(inst.host)) {
        return canonical_no_instance(inst.pattern.edge_color_count());
    }
    return si_instance(detail::remove_vertex_colors(inst.pattern), detail::remove_vertex_colors(inst.host));
}

/// Plain SI instance (c = 1, t = 1).
inline si_instance decolor_pipeline(const si_instance& inst) {
    return remove_vertex_colors(remove_edge_colors(inst));
}

} // namespace subiso
