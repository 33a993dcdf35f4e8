#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "subiso/combinatorics.hpp"
#include "subiso/errors.hpp"
#include "subiso/graph.hpp"

namespace subiso {

inline constexpr std::uint64_t default_composition_cap = 1'000'000;
inline constexpr std::uint64_t default_hom_budget = 100'000'000;

/// Weak compositions of `total` into `parts`, lexicographic, refused when more
/// than `cap` unless forced.
inline composition_stream enumerate_compositions(std::uint64_t total, std::size_t parts,
                                                 const big_count& cap = default_composition_cap,
                                                 bool force = false) {
    return composition_stream::capped(total, parts, cap, force);
}

namespace detail {

inline void require_plain(const colored_multigraph& g, const char* who) {
    if (g.color_count() != 1 || g.edge_color_count() != 1) {
        throw contract_error(std::string(who) + ": graphs must be uncoloured (c = t = 1)");
    }
}

} // namespace detail

/// Vertex v of H becomes a[v] copies (ids in vertex order); copies of u and v
/// are adjacent iff uv is an edge, copies of one vertex form an independent set.
inline colored_multigraph replicate_host(const colored_multigraph& h, const std::vector<std::uint64_t>& a) {
    detail::require_plain(h, "replicate_host");
    if (a.size() != h.vertex_count()) {
        throw contract_error("replicate_host: need one multiplicity per host vertex");
    }
    std::vector<vertex_id> first(a.size() + 1, 0);
    for (std::size_t v = 0; v < a.size(); ++v) {
        first[v + 1] = vertex_id(first[v] + a[v]);
    }
    graph_builder b(first.back(), 1, 1);
    for (const auto& e : h.edges()) {
        for (auto x = first[e.u]; x < first[e.u + 1]; ++x) {
            for (auto y = first[e.v]; y < first[e.v + 1]; ++y) {
                b.add_edge(x, y, 0);
            }
        }
    }
    return std::move(b).build();
}

/// One SI instance (G, H_a) per composition a of |V(G)| into |V(H)| parts.
class hom_si_stream {
public:
    hom_si_stream(colored_multigraph g, colored_multigraph h, const big_count& cap = default_composition_cap,
                  bool force = false)
        : g_(std::move(g)), h_(std::move(h)) {
        detail::require_plain(g_, "hom_to_si");
        detail::require_plain(h_, "hom_to_si");
        if (h_.vertex_count() > 0) {
            compositions_.emplace(enumerate_compositions(g_.vertex_count(), h_.vertex_count(), cap, force));
        } else {
            // No parts: the only composition exists when G is empty too.
            empty_pending_ = g_.vertex_count() == 0;
        }
    }

    /// Next multiplicity vector, or nullopt.
    std::optional<std::vector<std::uint64_t>> next_composition() {
        if (compositions_) {
            return compositions_->next();
        }
        if (empty_pending_) {
            empty_pending_ = false;
            return std::vector<std::uint64_t>{};
        }
        return std::nullopt;
    }

    std::optional<si_instance> next() {
        auto a = next_composition();
        if (!a) {
            return std::nullopt;
        }
        return si_instance(g_, replicate_host(h_, *a));
    }

    const colored_multigraph& pattern() const noexcept { return g_; }
    const colored_multigraph& target() const noexcept { return h_; }

private:
    colored_multigraph g_;
    colored_multigraph h_;
    std::optional<composition_stream> compositions_;
    bool empty_pending_ = false;
};

inline hom_si_stream hom_to_si(const colored_multigraph& g, const colored_multigraph& h,
                               const big_count& cap = default_composition_cap, bool force = false) {
    return hom_si_stream(g, h, cap, force);
}

/// Tries every map V(G) -> V(H); refused when |V(H)|^|V(G)| exceeds `budget`.
inline bool hom_oracle(const colored_multigraph& g, const colored_multigraph& h,
                       std::uint64_t budget = default_hom_budget) {
    detail::require_plain(g, "hom_oracle");
    detail::require_plain(h, "hom_oracle");
    const std::size_t n = g.vertex_count(), m = h.vertex_count();
    if (n == 0) {
        return true;
    }
    if (m == 0) {
        return false;
    }
    big_count total = 1;
    for (std::size_t i = 0; i < n; ++i) {
        total *= m;
    }
    if (total > budget) {
        throw refusal_error("hom_oracle: " + std::to_string(m) + "^" + std::to_string(n) + " = " + format_count(total) +
                            " maps exceed the budget of " + std::to_string(budget));
    }
    const auto edges = g.edges();
    std::vector<vertex_id> f(n, 0);
    for (;;) {
        bool ok = true;
        for (const auto& e : edges) {
            if (!h.has_edge(f[e.u], f[e.v], 0)) {
                ok = false;
                break;
            }
        }
        if (ok) {
            return true;
        }
        std::size_t i = 0;
        while (i < n && ++f[i] == m) {
            f[i++] = 0;
        }
        if (i == n) {
            return false;
        }
    }
}

} // namespace subiso
