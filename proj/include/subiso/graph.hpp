#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "subiso/errors.hpp"

namespace subiso {

using vertex_id = std::uint32_t;
using color = std::uint32_t;
/// Set of edge colours on one vertex pair; bit x set iff an edge of colour x exists.
using color_mask = std::uint64_t;

inline constexpr std::size_t max_edge_colors = 64;

/// Fixed numeric codes for the named vertex colours.
namespace colors {
inline constexpr color red = 0;
inline constexpr color green = 1;
inline constexpr color blue = 2;
inline constexpr color yellow = 3;
} // namespace colors

struct colored_edge {
    vertex_id u = 0;
    vertex_id v = 0;
    color c = 0;

    friend bool operator==(const colored_edge&, const colored_edge&) = default;
    friend auto operator<=>(const colored_edge&, const colored_edge&) = default;
};

struct adjacent_entry {
    vertex_id vertex;
    color_mask mask;

    friend bool operator==(const adjacent_entry&, const adjacent_entry&) = default;
};

/// Undirected multigraph with coloured vertices and coloured edges. Parallel
/// edges between a pair must carry distinct colours; no self-loops. Immutable
/// once built: construct through graph_builder or build_graph.
class colored_multigraph {
public:
    colored_multigraph() = default;

    std::size_t vertex_count() const noexcept { return vertex_colors_.size(); }
    /// c: vertex colours are in [0, c).
    std::size_t color_count() const noexcept { return color_count_; }
    /// t: edge colours are in [0, t).
    std::size_t edge_color_count() const noexcept { return edge_color_count_; }

    color vertex_color(vertex_id v) const { return vertex_colors_[v]; }
    const std::vector<color>& vertex_colors() const noexcept { return vertex_colors_; }

    /// Neighbours sorted by id, each with the colour set of the connecting edges.
    std::span<const adjacent_entry> neighbors(vertex_id v) const { return adjacency_[v]; }
    std::size_t degree(vertex_id v) const { return adjacency_[v].size(); }

    color_mask edge_mask(vertex_id u, vertex_id v) const {
        const auto& row = adjacency_[u];
        auto it = std::lower_bound(row.begin(), row.end(), v,
                                   [](const adjacent_entry& e, vertex_id x) { return e.vertex < x; });
        return it != row.end() && it->vertex == v ? it->mask : 0;
    }
    bool has_edge(vertex_id u, vertex_id v, color c) const { return (edge_mask(u, v) >> c) & 1; }

    /// Number of coloured edges (a pair joined in two colours counts twice).
    std::size_t edge_count() const {
        std::size_t twice = 0;
        for (const auto& row : adjacency_) {
            for (const auto& e : row) {
                twice += std::size_t(std::popcount(e.mask));
            }
        }
        return twice / 2;
    }

    /// All edges with u < v, sorted by (u, v, colour).
    std::vector<colored_edge> edges() const {
        std::vector<colored_edge> out;
        for (vertex_id u = 0; u < vertex_count(); ++u) {
            for (const auto& e : adjacency_[u]) {
                if (e.vertex <= u) {
                    continue;
                }
                for (color_mask m = e.mask; m != 0; m &= m - 1) {
                    out.push_back({u, e.vertex, color(std::countr_zero(m))});
                }
            }
        }
        return out;
    }

    friend bool operator==(const colored_multigraph&, const colored_multigraph&) = default;

private:
    friend class graph_builder;

    std::size_t color_count_ = 1;
    std::size_t edge_color_count_ = 1;
    std::vector<color> vertex_colors_;
    std::vector<std::vector<adjacent_entry>> adjacency_;
};

/// Accumulates vertices and edges, validating colours and endpoints as they arrive.
class graph_builder {
public:
    graph_builder(std::size_t vertex_count, std::size_t color_count, std::size_t edge_color_count)
        : colors_(vertex_count, 0), adjacency_(vertex_count), c_(color_count), t_(edge_color_count) {
        if (color_count == 0 || edge_color_count == 0) {
            throw contract_error("graph: colour counts must be >= 1");
        }
        if (edge_color_count > max_edge_colors) {
            throw contract_error("graph: at most " + std::to_string(max_edge_colors) +
                                 " edge colours are supported");
        }
        if (vertex_count > std::numeric_limits<vertex_id>::max()) {
            throw contract_error("graph: too many vertices");
        }
    }

    std::size_t vertex_count() const noexcept { return colors_.size(); }

    graph_builder& set_color(vertex_id v, color c) {
        check_vertex(v);
        if (c >= c_) {
            throw contract_error("graph: vertex colour " + std::to_string(c) + " outside [0," +
                                 std::to_string(c_) + ")");
        }
        colors_[v] = c;
        return *this;
    }

    graph_builder& add_edge(vertex_id u, vertex_id v, color c) {
        if (c >= t_) {
            throw contract_error("graph: edge colour " + std::to_string(c) + " outside [0," +
                                 std::to_string(t_) + ")");
        }
        return add_edges(u, v, color_mask(1) << c);
    }

    /// Adds one edge per colour in `mask`.
    graph_builder& add_edges(vertex_id u, vertex_id v, color_mask mask) {
        check_vertex(u);
        check_vertex(v);
        if (u == v) {
            throw contract_error("graph: self-loop at vertex " + std::to_string(u));
        }
        if (t_ < max_edge_colors && (mask >> t_) != 0) {
            throw contract_error("graph: edge colour outside [0," + std::to_string(t_) + ")");
        }
        if (mask == 0) {
            return *this;
        }
        adjacency_[u].push_back({v, mask});
        adjacency_[v].push_back({u, mask});
        return *this;
    }

    colored_multigraph build() && {
        colored_multigraph g;
        g.color_count_ = c_;
        g.edge_color_count_ = t_;
        g.vertex_colors_ = std::move(colors_);
        for (auto& row : adjacency_) {
            std::sort(row.begin(), row.end(),
                      [](const adjacent_entry& a, const adjacent_entry& b) { return a.vertex < b.vertex; });
            std::size_t w = 0;
            for (std::size_t r = 0; r < row.size(); ++r) {
                if (w > 0 && row[w - 1].vertex == row[r].vertex) {
                    row[w - 1].mask |= row[r].mask;
                } else {
                    row[w++] = row[r];
                }
            }
            row.resize(w);
            row.shrink_to_fit();
        }
        g.adjacency_ = std::move(adjacency_);
        return g;
    }

private:
    void check_vertex(vertex_id v) const {
        if (v >= colors_.size()) {
            throw contract_error("graph: vertex " + std::to_string(v) + " out of range");
        }
    }

    std::vector<color> colors_;
    std::vector<std::vector<adjacent_entry>> adjacency_;
    std::size_t c_;
    std::size_t t_;
};

/// Canonical graph from explicit parts; repeated edges collapse to one.
inline colored_multigraph build_graph(std::size_t n, std::span<const color> vertex_colors,
                                      std::span<const colored_edge> edges, std::size_t c = 1,
                                      std::size_t t = 1) {
    if (vertex_colors.size() != n) {
        throw contract_error("build_graph: expected " + std::to_string(n) + " vertex colours");
    }
    graph_builder b(n, c, t);
    for (vertex_id v = 0; v < n; ++v) {
        b.set_color(v, vertex_colors[v]);
    }
    for (const auto& e : edges) {
        b.add_edge(e.u, e.v, e.c);
    }
    return std::move(b).build();
}

/// Uncoloured (c = t = 1) graph on n vertices.
inline colored_multigraph build_plain_graph(std::size_t n,
                                            std::span<const std::pair<vertex_id, vertex_id>> edges) {
    graph_builder b(n, 1, 1);
    for (const auto& [u, v] : edges) {
        b.add_edge(u, v, 0);
    }
    return std::move(b).build();
}

/// Vertex count per colour.
inline std::vector<std::size_t> color_histograms(const colored_multigraph& g) {
    std::vector<std::size_t> counts(g.color_count(), 0);
    for (auto c : g.vertex_colors()) {
        ++counts[c];
    }
    return counts;
}

/// A colored subgraph-isomorphism instance: embed `pattern` into `host`.
struct si_instance {
    colored_multigraph pattern;
    colored_multigraph host;

    si_instance() = default;
    si_instance(colored_multigraph p, colored_multigraph h) : pattern(std::move(p)), host(std::move(h)) {
        if (pattern.color_count() != host.color_count() ||
            pattern.edge_color_count() != host.edge_color_count()) {
            throw contract_error("si_instance: pattern and host disagree on colour counts");
        }
    }

    friend bool operator==(const si_instance&, const si_instance&) = default;
};

/// Pattern vertex -> host vertex.
struct embedding {
    std::vector<vertex_id> map;

    friend bool operator==(const embedding&, const embedding&) = default;
};

// ---------------------------------------------------------------------------
// CGF text format
//
//   g <n_vertices> <n_edges> <c> <t>
//   v <id> <vcolor>          one per vertex
//   e <u> <v> <ecolor>       one per coloured edge, u < v
//   # comment
//
// An SI instance file holds two CGF blocks, pattern first, separated by "---".

namespace detail {

inline std::vector<std::string> cgf_tokens(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) {
        out.push_back(tok);
    }
    return out;
}

inline std::uint64_t cgf_number(const std::string& tok, std::size_t line) {
    if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
        throw parse_error(line, "expected a non-negative integer, got '" + tok + "'");
    }
    try {
        return std::stoull(tok);
    } catch (const std::exception&) {
        throw parse_error(line, "number out of range: '" + tok + "'");
    }
}

/// Parses one CGF block; stops at "---" or end of input. `line_no` is shared
/// so errors in the second block of an instance file report absolute lines.
inline std::optional<colored_multigraph> parse_cgf_block(std::istream& in, std::size_t& line_no) {
    std::string line;
    std::optional<graph_builder> builder;
    std::uint64_t declared_edges = 0;
    std::uint64_t seen_edges = 0;
    std::vector<bool> seen_vertex;
    std::size_t vertices_seen = 0;
    bool any = false;

    while (std::getline(in, line)) {
        ++line_no;
        const auto toks = cgf_tokens(line);
        if (toks.empty() || toks[0][0] == '#') {
            continue;
        }
        if (toks[0] == "---") {
            if (!any) {
                throw parse_error(line_no, "separator before any graph");
            }
            break;
        }
        any = true;
        try {
            if (toks[0] == "g") {
                if (builder) {
                    throw parse_error(line_no, "duplicate 'g' header");
                }
                if (toks.size() != 5) {
                    throw parse_error(line_no, "malformed header, expected 'g <n> <m> <c> <t>'");
                }
                const auto n = cgf_number(toks[1], line_no);
                declared_edges = cgf_number(toks[2], line_no);
                const auto c = cgf_number(toks[3], line_no);
                const auto t = cgf_number(toks[4], line_no);
                builder.emplace(n, c, t);
                seen_vertex.assign(n, false);
            } else if (toks[0] == "v") {
                if (!builder) {
                    throw parse_error(line_no, "vertex line before 'g' header");
                }
                if (toks.size() != 3) {
                    throw parse_error(line_no, "malformed vertex line, expected 'v <id> <color>'");
                }
                const auto v = cgf_number(toks[1], line_no);
                const auto c = cgf_number(toks[2], line_no);
                if (v >= seen_vertex.size()) {
                    throw parse_error(line_no, "vertex " + toks[1] + " out of range");
                }
                if (seen_vertex[v]) {
                    throw parse_error(line_no, "vertex " + toks[1] + " declared twice");
                }
                seen_vertex[v] = true;
                ++vertices_seen;
                builder->set_color(vertex_id(v), color(c));
            } else if (toks[0] == "e") {
                if (!builder) {
                    throw parse_error(line_no, "edge line before 'g' header");
                }
                if (toks.size() != 4) {
                    throw parse_error(line_no, "malformed edge line, expected 'e <u> <v> <color>'");
                }
                const auto u = cgf_number(toks[1], line_no);
                const auto v = cgf_number(toks[2], line_no);
                const auto c = cgf_number(toks[3], line_no);
                if (u >= seen_vertex.size() || v >= seen_vertex.size()) {
                    throw parse_error(line_no, "edge endpoint out of range");
                }
                if (u == v) {
                    throw parse_error(line_no, "self-loop at vertex " + toks[1]);
                }
                if (u > v) {
                    throw parse_error(line_no, "edge endpoints must satisfy u < v");
                }
                builder->add_edge(vertex_id(u), vertex_id(v), color(c));
                ++seen_edges;
            } else {
                throw parse_error(line_no, "unknown record '" + toks[0] + "'");
            }
        } catch (const contract_error& e) {
            throw parse_error(line_no, e.what());
        }
    }
    if (!any) {
        return std::nullopt;
    }
    if (!builder) {
        throw parse_error(line_no, "missing 'g' header");
    }
    if (vertices_seen != seen_vertex.size()) {
        throw parse_error(line_no, "declared " + std::to_string(seen_vertex.size()) + " vertices, found " +
                                       std::to_string(vertices_seen) + " vertex lines");
    }
    if (seen_edges != declared_edges) {
        throw parse_error(line_no, "declared " + std::to_string(declared_edges) + " edges, found " +
                                       std::to_string(seen_edges));
    }
    auto g = std::move(*builder).build();
    if (g.edge_count() != seen_edges) {
        throw parse_error(line_no, "duplicate edge lines");
    }
    return g;
}

} // namespace detail

inline colored_multigraph parse_cgf(std::istream& in) {
    std::size_t line_no = 0;
    auto g = detail::parse_cgf_block(in, line_no);
    if (!g) {
        throw parse_error(line_no, "empty input, expected a 'g' header");
    }
    std::string rest;
    while (std::getline(in, rest)) {
        ++line_no;
        const auto toks = detail::cgf_tokens(rest);
        if (!toks.empty() && toks[0][0] != '#') {
            throw parse_error(line_no, "unexpected content after graph");
        }
    }
    return std::move(*g);
}

inline colored_multigraph parse_cgf(const std::string& text) {
    std::istringstream in(text);
    return parse_cgf(in);
}

inline void write_cgf(std::ostream& out, const colored_multigraph& g) {
    const auto edges = g.edges();
    out << "g " << g.vertex_count() << ' ' << edges.size() << ' ' << g.color_count() << ' '
        << g.edge_color_count() << '\n';
    for (vertex_id v = 0; v < g.vertex_count(); ++v) {
        out << "v " << v << ' ' << g.vertex_color(v) << '\n';
    }
    for (const auto& e : edges) {
        out << "e " << e.u << ' ' << e.v << ' ' << e.c << '\n';
    }
}

inline std::string write_cgf(const colored_multigraph& g) {
    std::ostringstream out;
    write_cgf(out, g);
    return out.str();
}

inline si_instance parse_instance(std::istream& in) {
    std::size_t line_no = 0;
    auto pattern = detail::parse_cgf_block(in, line_no);
    if (!pattern) {
        throw parse_error(line_no, "missing pattern graph");
    }
    auto host = detail::parse_cgf_block(in, line_no);
    if (!host) {
        throw parse_error(line_no, "missing host graph after '---'");
    }
    try {
        return si_instance(std::move(*pattern), std::move(*host));
    } catch (const contract_error& e) {
        throw parse_error(line_no, e.what());
    }
}

inline si_instance parse_instance(const std::string& text) {
    std::istringstream in(text);
    return parse_instance(in);
}

inline void write_instance(std::ostream& out, const si_instance& inst) {
    write_cgf(out, inst.pattern);
    out << "---\n";
    write_cgf(out, inst.host);
}

inline std::string write_instance(const si_instance& inst) {
    std::ostringstream out;
    write_instance(out, inst);
    return out.str();
}

/// Embedding text: "map <pattern-id> <host-id>" lines covering every pattern vertex.
inline embedding parse_embedding(std::istream& in, std::size_t pattern_vertices) {
    constexpr auto unset = std::numeric_limits<vertex_id>::max();
    embedding e{std::vector<vertex_id>(pattern_vertices, unset)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto toks = detail::cgf_tokens(line);
        if (toks.empty() || toks[0][0] == '#') {
            continue;
        }
        if (toks.size() != 3 || toks[0] != "map") {
            throw parse_error(line_no, "expected 'map <pattern-id> <host-id>'");
        }
        const auto p = detail::cgf_number(toks[1], line_no);
        const auto h = detail::cgf_number(toks[2], line_no);
        if (p >= pattern_vertices) {
            throw parse_error(line_no, "pattern vertex " + toks[1] + " out of range");
        }
        if (h >= unset) {
            throw parse_error(line_no, "host vertex " + toks[2] + " out of range");
        }
        if (e.map[p] != unset) {
            throw parse_error(line_no, "pattern vertex " + toks[1] + " mapped twice");
        }
        e.map[p] = vertex_id(h);
    }
    for (std::size_t p = 0; p < pattern_vertices; ++p) {
        if (e.map[p] == unset) {
            throw parse_error(line_no, "pattern vertex " + std::to_string(p) + " is not mapped");
        }
    }
    return e;
}

inline void write_embedding(std::ostream& out, const embedding& e) {
    for (std::size_t p = 0; p < e.map.size(); ++p) {
        out << "map " << p << ' ' << e.map[p] << '\n';
    }
}

} // namespace subiso
