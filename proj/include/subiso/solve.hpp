#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <concepts>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "subiso/errors.hpp"
#include "subiso/graph.hpp"

namespace subiso {

/// Anything that answers vertex colours and pairwise edge-colour masks.
template <class G>
concept colored_graph_view = requires(const G& g, vertex_id u, vertex_id v) {
    { g.vertex_count() } -> std::convertible_to<std::size_t>;
    { g.vertex_color(u) } -> std::convertible_to<color>;
    { g.edge_mask(u, v) } -> std::convertible_to<color_mask>;
};

struct verification_report {
    std::vector<std::string> violations;

    bool ok() const noexcept { return violations.empty(); }
};

/// Checks that `e` is injective, colour-preserving, and sends every coloured
/// pattern edge to a host edge of the same colour. Lists every violation.
template <colored_graph_view Host>
verification_report verify_embedding(const colored_multigraph& pattern, const Host& host, const embedding& e) {
    verification_report report;
    auto& out = report.violations;
    if (e.map.size() != pattern.vertex_count()) {
        out.push_back("map covers " + std::to_string(e.map.size()) + " vertices, pattern has " +
                      std::to_string(pattern.vertex_count()));
        return report;
    }
    const std::size_t nh = host.vertex_count();
    bool in_range = true;
    for (vertex_id p = 0; p < e.map.size(); ++p) {
        if (e.map[p] >= nh) {
            out.push_back("pattern vertex " + std::to_string(p) + " maps to " + std::to_string(e.map[p]) +
                          ", outside the host");
            in_range = false;
        }
    }
    if (!in_range) {
        return report;
    }
    std::vector<vertex_id> sorted_images(e.map);
    std::vector<std::pair<vertex_id, vertex_id>> by_image;
    by_image.reserve(e.map.size());
    for (vertex_id p = 0; p < e.map.size(); ++p) {
        by_image.emplace_back(e.map[p], p);
    }
    std::sort(by_image.begin(), by_image.end());
    for (std::size_t i = 1; i < by_image.size(); ++i) {
        if (by_image[i].first == by_image[i - 1].first) {
            out.push_back("pattern vertices " + std::to_string(by_image[i - 1].second) + " and " +
                          std::to_string(by_image[i].second) + " both map to " + std::to_string(by_image[i].first));
        }
    }
    for (vertex_id p = 0; p < e.map.size(); ++p) {
        const auto hc = host.vertex_color(e.map[p]);
        if (hc != pattern.vertex_color(p)) {
            out.push_back("pattern vertex " + std::to_string(p) + " has colour " +
                          std::to_string(pattern.vertex_color(p)) + " but host vertex " +
                          std::to_string(e.map[p]) + " has colour " + std::to_string(hc));
        }
    }
    for (vertex_id u = 0; u < pattern.vertex_count(); ++u) {
        for (const auto& nb : pattern.neighbors(u)) {
            if (nb.vertex < u) {
                continue;
            }
            const color_mask missing = nb.mask & ~color_mask(host.edge_mask(e.map[u], e.map[nb.vertex]));
            for (color_mask m = missing; m != 0; m &= m - 1) {
                out.push_back("edge (" + std::to_string(u) + "," + std::to_string(nb.vertex) + ") colour " +
                              std::to_string(std::countr_zero(m)) + " is missing between host vertices " +
                              std::to_string(e.map[u]) + " and " + std::to_string(e.map[nb.vertex]));
            }
        }
    }
    return report;
}

enum class verdict { yes, no, inconclusive };

inline const char* to_string(verdict s) {
    switch (s) {
    case verdict::yes:
        return "YES";
    case verdict::no:
        return "NO";
    case verdict::inconclusive:
        return "INCONCLUSIVE";
    }
    return "?";
}

inline constexpr std::uint64_t default_node_budget = 100'000'000;

struct si_result {
    verdict status = verdict::no;
    std::optional<embedding> witness;
    /// Search nodes (tentative assignments) visited.
    std::uint64_t nodes = 0;
};

namespace detail {

// Backtracking over bitset domains. Assigning p -> h removes h from every
// other domain and intersects each pattern neighbour's domain with the host
// neighbourhood of h in every colour of the connecting edge. A bipartite
// matching from unassigned pattern vertices into their domains is kept up to
// date; when no augmenting path exists the branch has no injective completion.
class si_search {
public:
    si_search(const colored_multigraph& pattern, const colored_multigraph& host, std::uint64_t budget)
        : p_(pattern), h_(host), budget_(budget), np_(pattern.vertex_count()), nh_(host.vertex_count()),
          words_((nh_ + 63) / 64) {}

    si_result run() {
        si_result result;
        if (np_ == 0) {
            result.status = verdict::yes;
            result.witness = embedding{};
            return result;
        }
        if (np_ > nh_) {
            return result;
        }
        const auto hp = color_histograms(p_);
        const auto hh = color_histograms(h_);
        for (std::size_t c = 0; c < hp.size(); ++c) {
            if (hp[c] > hh[c]) {
                return result;
            }
        }
        const std::size_t t = p_.edge_color_count();
        const double bytes = double(t) * double(nh_) * double(words_) * 8.0;
        if (bytes > 4e9) {
            throw refusal_error("solver: host neighbourhood tables would need " +
                                std::to_string(std::uint64_t(bytes / 1e6)) + " MB");
        }
        build_tables();
        if (!initial_domains() || !initial_matching()) {
            result.nodes = nodes_;
            return result;
        }
        assigned_.assign(np_, false);
        image_.assign(np_, 0);
        const bool found = search(0);
        result.nodes = nodes_;
        if (found) {
            result.status = verdict::yes;
            result.witness = embedding{image_};
        } else {
            result.status = out_of_budget_ ? verdict::inconclusive : verdict::no;
        }
        return result;
    }

private:
    static constexpr std::uint32_t unmatched = 0xffffffffu;

    std::uint64_t* domain(std::size_t p) { return &domains_[p * words_]; }
    const std::uint64_t* neighborhood(std::size_t c, vertex_id h) const {
        return &nbr_[(c * nh_ + h) * words_];
    }
    bool in_domain(std::size_t p, vertex_id h) const {
        return (domains_[p * words_ + h / 64] >> (h % 64)) & 1;
    }

    void build_tables() {
        const std::size_t t = h_.edge_color_count();
        nbr_.assign(t * nh_ * words_, 0);
        for (vertex_id h = 0; h < nh_; ++h) {
            for (const auto& nb : h_.neighbors(h)) {
                for (color_mask m = nb.mask; m != 0; m &= m - 1) {
                    const auto c = std::size_t(std::countr_zero(m));
                    nbr_[(c * nh_ + h) * words_ + nb.vertex / 64] |= std::uint64_t(1) << (nb.vertex % 64);
                }
            }
        }
    }

    static std::vector<std::size_t> color_degrees(const colored_multigraph& g, vertex_id v) {
        std::vector<std::size_t> d(g.edge_color_count(), 0);
        for (const auto& nb : g.neighbors(v)) {
            for (color_mask m = nb.mask; m != 0; m &= m - 1) {
                ++d[std::size_t(std::countr_zero(m))];
            }
        }
        return d;
    }

    static std::vector<std::size_t> neighbor_degrees(const colored_multigraph& g, vertex_id v) {
        std::vector<std::size_t> d;
        for (const auto& nb : g.neighbors(v)) {
            d.push_back(g.degree(nb.vertex));
        }
        std::sort(d.rbegin(), d.rend());
        return d;
    }

    bool initial_domains() {
        domains_.assign(np_ * words_, 0);
        sizes_.assign(np_, 0);
        std::vector<std::vector<std::size_t>> hdeg(nh_), hnd(nh_);
        for (vertex_id h = 0; h < nh_; ++h) {
            hdeg[h] = color_degrees(h_, h);
            hnd[h] = neighbor_degrees(h_, h);
        }
        for (vertex_id p = 0; p < np_; ++p) {
            const auto pdeg = color_degrees(p_, p);
            const auto pnd = neighbor_degrees(p_, p);
            for (vertex_id h = 0; h < nh_; ++h) {
                if (h_.vertex_color(h) != p_.vertex_color(p) || h_.degree(h) < p_.degree(p)) {
                    continue;
                }
                bool ok = true;
                for (std::size_t c = 0; ok && c < pdeg.size(); ++c) {
                    ok = pdeg[c] <= hdeg[h][c];
                }
                for (std::size_t i = 0; ok && i < pnd.size(); ++i) {
                    ok = pnd[i] <= hnd[h][i];
                }
                if (ok) {
                    domain(p)[h / 64] |= std::uint64_t(1) << (h % 64);
                    ++sizes_[p];
                }
            }
            if (sizes_[p] == 0) {
                return false;
            }
        }
        return true;
    }

    bool initial_matching() {
        match_.assign(np_, unmatched);
        owner_.assign(nh_, unmatched);
        assigned_.assign(np_, false);
        for (std::size_t p = 0; p < np_; ++p) {
            if (!augment_from(p)) {
                return false;
            }
        }
        return true;
    }

    bool augment_from(std::size_t p) {
        visited_.assign(words_, 0);
        return augment(p);
    }

    bool augment(std::size_t p) {
        const std::uint64_t* d = domain(p);
        for (std::size_t w = 0; w < words_; ++w) {
            std::uint64_t bits = d[w] & ~visited_[w];
            while (bits != 0) {
                const auto h = vertex_id(w * 64 + std::size_t(std::countr_zero(bits)));
                bits &= bits - 1;
                visited_[w] |= std::uint64_t(1) << (h % 64);
                const auto q = owner_[h];
                if (q == unmatched || (!assigned_[q] && augment(q))) {
                    match_[p] = std::uint32_t(h);
                    owner_[h] = std::uint32_t(p);
                    return true;
                }
            }
        }
        return false;
    }

    void set_word(std::size_t p, std::size_t w, std::uint64_t value) {
        auto& slot = domains_[p * words_ + w];
        if (slot == value) {
            return;
        }
        trail_.push_back({p * words_ + w, slot});
        sizes_[p] -= std::size_t(std::popcount(slot)) - std::size_t(std::popcount(value));
        slot = value;
    }

    void undo(std::size_t mark) {
        while (trail_.size() > mark) {
            const auto [index, old] = trail_.back();
            trail_.pop_back();
            const std::size_t p = index / words_;
            sizes_[p] += std::size_t(std::popcount(old)) - std::size_t(std::popcount(domains_[index]));
            domains_[index] = old;
        }
    }

    bool propagate(std::size_t p, vertex_id h) {
        const std::size_t hw = h / 64;
        const std::uint64_t hbit = std::uint64_t(1) << (h % 64);
        for (std::size_t q = 0; q < np_; ++q) {
            if (!assigned_[q] && (domains_[q * words_ + hw] & hbit)) {
                set_word(q, hw, domains_[q * words_ + hw] & ~hbit);
                if (sizes_[q] == 0) {
                    return false;
                }
            }
        }
        for (const auto& nb : p_.neighbors(vertex_id(p))) {
            const std::size_t q = nb.vertex;
            if (assigned_[q]) {
                continue;
            }
            for (std::size_t w = 0; w < words_; ++w) {
                std::uint64_t value = domains_[q * words_ + w];
                for (color_mask m = nb.mask; m != 0 && value != 0; m &= m - 1) {
                    value &= neighborhood(std::size_t(std::countr_zero(m)), h)[w];
                }
                set_word(q, w, value);
            }
            if (sizes_[q] == 0) {
                return false;
            }
        }
        return true;
    }

    // Brings the matching in line with the current domains; false when some
    // unassigned pattern vertex cannot be matched.
    bool repair_matching() {
        for (std::size_t q = 0; q < np_; ++q) {
            if (assigned_[q]) {
                continue;
            }
            const auto h = match_[q];
            if (h != unmatched && in_domain(q, vertex_id(h))) {
                continue;
            }
            if (h != unmatched && owner_[h] == q) {
                owner_[h] = unmatched;
            }
            match_[q] = unmatched;
            if (!augment_from(q)) {
                return false;
            }
        }
        return true;
    }

    std::size_t choose() const {
        std::size_t best = np_;
        for (std::size_t q = 0; q < np_; ++q) {
            if (assigned_[q]) {
                continue;
            }
            if (best == np_ || sizes_[q] < sizes_[best] ||
                (sizes_[q] == sizes_[best] && p_.degree(vertex_id(q)) > p_.degree(vertex_id(best)))) {
                best = q;
            }
        }
        return best;
    }

    bool search(std::size_t depth) {
        if (depth == np_) {
            return true;
        }
        const std::size_t p = choose();
        std::vector<vertex_id> candidates;
        candidates.reserve(sizes_[p]);
        for (std::size_t w = 0; w < words_; ++w) {
            for (std::uint64_t bits = domain(p)[w]; bits != 0; bits &= bits - 1) {
                candidates.push_back(vertex_id(w * 64 + std::size_t(std::countr_zero(bits))));
            }
        }
        for (const auto h : candidates) {
            if (nodes_ >= budget_) {
                out_of_budget_ = true;
                return false;
            }
            ++nodes_;
            const std::size_t mark = trail_.size();
            const auto old_match = match_[p];
            const auto old_owner = owner_[h];
            // p takes h; whoever held h in the matching must find another partner.
            if (old_match != unmatched && owner_[old_match] == p) {
                owner_[old_match] = unmatched;
            }
            if (old_owner != unmatched && old_owner != p) {
                match_[old_owner] = unmatched;
            }
            match_[p] = h;
            owner_[h] = std::uint32_t(p);
            assigned_[p] = true;
            image_[p] = h;
            if (propagate(p, h) && repair_matching() && search(depth + 1)) {
                return true;
            }
            assigned_[p] = false;
            undo(mark);
            if (out_of_budget_) {
                return false;
            }
        }
        return false;
    }

    const colored_multigraph& p_;
    const colored_multigraph& h_;
    std::uint64_t budget_;
    std::size_t np_, nh_, words_;
    std::vector<std::uint64_t> nbr_;
    std::vector<std::uint64_t> domains_;
    std::vector<std::size_t> sizes_;
    std::vector<std::pair<std::size_t, std::uint64_t>> trail_;
    std::vector<std::uint32_t> match_, owner_;
    std::vector<std::uint64_t> visited_;
    std::vector<bool> assigned_;
    std::vector<vertex_id> image_;
    std::uint64_t nodes_ = 0;
    bool out_of_budget_ = false;
};

} // namespace detail

/// Decides whether the pattern embeds into the host. Deterministic: the
/// pattern vertex with the smallest domain is branched on first (ties: higher
/// degree, then lower id) and host candidates are tried in increasing id.
inline si_result si_solve(const si_instance& inst, std::uint64_t node_budget = default_node_budget) {
    detail::si_search search(inst.pattern, inst.host, node_budget);
    return search.run();
}

inline si_result si_solve(const colored_multigraph& pattern, const colored_multigraph& host,
                          std::uint64_t node_budget = default_node_budget) {
    if (pattern.color_count() != host.color_count() || pattern.edge_color_count() != host.edge_color_count()) {
        throw contract_error("si_solve: pattern and host disagree on colour counts");
    }
    detail::si_search search(pattern, host, node_budget);
    return search.run();
}

struct family_options {
    std::uint64_t node_budget = default_node_budget;
    /// Worker threads; 1 runs in the calling thread.
    std::size_t threads = 1;
};

struct family_result {
    /// YES if any member embeds; otherwise INCONCLUSIVE if any member ran out
    /// of budget; otherwise NO.
    verdict status = verdict::no;
    std::optional<std::uint64_t> witness_index;
    std::optional<embedding> witness;
    std::uint64_t hosts_examined = 0;
    std::uint64_t inconclusive_hosts = 0;
};

/// OR over a stream of hosts for one pattern. `next_item` yields work items
/// (nullopt when exhausted) and `make_host` turns an item into a host graph.
/// The witness reported is the one of lowest stream index, independent of
/// thread count.
template <class Item>
family_result si_family_solve(const colored_multigraph& pattern,
                              const std::function<std::optional<Item>()>& next_item,
                              const std::function<colored_multigraph(const Item&)>& make_host,
                              const family_options& opt = {}) {
    family_result out;
    std::mutex lock;
    std::uint64_t next_index = 0;
    std::atomic<std::uint64_t> best{~std::uint64_t(0)};

    auto worker = [&] {
        for (;;) {
            std::optional<Item> item;
            std::uint64_t index = 0;
            {
                std::lock_guard guard(lock);
                if (next_index > best.load()) {
                    return;
                }
                item = next_item();
                if (!item) {
                    return;
                }
                index = next_index++;
            }
            const auto host = make_host(*item);
            const auto r = si_solve(pattern, host, opt.node_budget);
            std::lock_guard guard(lock);
            ++out.hosts_examined;
            if (r.status == verdict::inconclusive) {
                ++out.inconclusive_hosts;
            } else if (r.status == verdict::yes && index < best.load()) {
                best = index;
                out.witness_index = index;
                out.witness = r.witness;
            }
        }
    };

    if (opt.threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < opt.threads; ++i) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    if (out.witness) {
        out.status = verdict::yes;
    } else if (out.inconclusive_hosts > 0) {
        out.status = verdict::inconclusive;
    }
    return out;
}

} // namespace subiso
