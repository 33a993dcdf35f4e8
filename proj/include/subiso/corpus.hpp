#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "subiso/errors.hpp"
#include "subiso/formula.hpp"
#include "subiso/graph.hpp"
#include "subiso/grouping.hpp"

namespace subiso {

using corpus_rng = std::mt19937_64;

inline std::size_t uniform_below(corpus_rng& rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

/// m clauses over n >= 3 variables, each on three distinct variables with random signs.
inline cnf_formula random_3cnf(corpus_rng& rng, std::size_t n, std::size_t m) {
    if (n < 3) {
        throw contract_error("random_3cnf: need at least 3 variables");
    }
    std::vector<clause> clauses;
    for (std::size_t i = 0; i < m; ++i) {
        clause c;
        while (c.size() < 3) {
            const auto v = variable(uniform_below(rng, n));
            if (std::none_of(c.begin(), c.end(), [&](const literal& l) { return l.var == v; })) {
                c.push_back({v, bool(rng() & 1)});
            }
        }
        clauses.push_back(std::move(c));
    }
    return cnf_formula(n, std::move(clauses));
}

/// Random (3,4)-form formula with up to m clauses, satisfied by `planted`
/// when given: each clause draws three distinct variables that still have
/// spare occurrences, and its signs are redrawn until the planted assignment
/// satisfies it. Stops early when fewer than three variables have room.
inline cnf_formula random_34_formula(corpus_rng& rng, std::size_t n, std::size_t m,
                                     const assignment* planted = nullptr) {
    if (n < 3) {
        throw contract_error("random_34_formula: need at least 3 variables");
    }
    std::vector<std::size_t> used(n, 0);
    std::vector<clause> clauses;
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<variable> open;
        for (variable v = 0; v < n; ++v) {
            if (used[v] < max_occurrences_34) {
                open.push_back(v);
            }
        }
        if (open.size() < 3) {
            break;
        }
        std::shuffle(open.begin(), open.end(), rng);
        clause c;
        for (std::size_t j = 0; j < 3; ++j) {
            c.push_back({open[j], bool(rng() & 1)});
            ++used[open[j]];
        }
        if (planted) {
            while (!planted->satisfies(c)) {
                for (auto& lit : c) {
                    lit.positive = bool(rng() & 1);
                }
            }
        }
        clauses.push_back(std::move(c));
    }
    return cnf_formula(n, std::move(clauses));
}

inline assignment random_assignment(corpus_rng& rng, std::size_t n) {
    assignment a{std::vector<bool>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        a.values[i] = bool(rng() & 1);
    }
    return a;
}

/// All eight sign patterns over x1, x2, x3 (unsatisfiable). With
/// `drop < 8`, that clause is left out and the rest is satisfiable.
inline cnf_formula sign_pattern_formula(std::size_t drop = 8) {
    std::vector<clause> clauses;
    for (unsigned bits = 0; bits < 8; ++bits) {
        if (bits == drop) {
            continue;
        }
        clauses.push_back({{0, !(bits & 4)}, {1, !(bits & 2)}, {2, !(bits & 1)}});
    }
    return cnf_formula(3, std::move(clauses));
}

/// Erdős–Rényi style graph with random vertex and edge colours; each colour of
/// each pair is present independently with probability p.
inline colored_multigraph random_colored_graph(corpus_rng& rng, std::size_t n, double p, std::size_t c,
                                               std::size_t t) {
    std::bernoulli_distribution coin(p);
    graph_builder b(n, c, t);
    for (vertex_id v = 0; v < n; ++v) {
        b.set_color(v, color(uniform_below(rng, c)));
    }
    for (vertex_id u = 0; u < n; ++u) {
        for (vertex_id v = u + 1; v < n; ++v) {
            for (std::size_t x = 0; x < t; ++x) {
                if (coin(rng)) {
                    b.add_edge(u, v, color(x));
                }
            }
        }
    }
    return std::move(b).build();
}

inline colored_multigraph random_plain_graph(corpus_rng& rng, std::size_t n, double p) {
    return random_colored_graph(rng, n, p, 1, 1);
}

/// Equal-size colored SI instance on n vertices. Half of the time the pattern
/// is a relabelled host with some edges dropped (YES); otherwise it is a
/// random graph whose vertex colours are a shuffle of the host's, and one time
/// in five its colours are redrawn freely.
inline si_instance random_si_pair(corpus_rng& rng, std::size_t n, std::size_t c, std::size_t t) {
    auto host = random_colored_graph(rng, n, 0.5, c, t);
    graph_builder b(n, c, t);
    const auto kind = uniform_below(rng, 10);
    if (kind < 5) {
        std::vector<vertex_id> perm(n);
        for (vertex_id v = 0; v < n; ++v) {
            perm[v] = v;
        }
        std::shuffle(perm.begin(), perm.end(), rng);
        for (vertex_id v = 0; v < n; ++v) {
            b.set_color(perm[v], host.vertex_color(v));
        }
        std::bernoulli_distribution keep(0.7);
        for (const auto& e : host.edges()) {
            if (keep(rng)) {
                b.add_edge(perm[e.u], perm[e.v], e.c);
            }
        }
        return si_instance(std::move(b).build(), std::move(host));
    }
    auto pattern_colors = host.vertex_colors();
    std::shuffle(pattern_colors.begin(), pattern_colors.end(), rng);
    if (kind == 9) {
        for (auto& x : pattern_colors) {
            x = color(uniform_below(rng, c));
        }
    }
    const auto shape = random_colored_graph(rng, n, 0.3, c, t);
    for (vertex_id v = 0; v < n; ++v) {
        b.set_color(v, pattern_colors[v]);
    }
    for (const auto& e : shape.edges()) {
        b.add_edge(e.u, e.v, e.c);
    }
    return si_instance(std::move(b).build(), std::move(host));
}

inline const std::vector<std::string>& corpus_profiles() {
    static const std::vector<std::string> names{"tiny-sat", "unsat-k3",  "sat-k3",   "random-3cnf",
                                                "34-form",  "hom-pairs", "colored-si"};
    return names;
}

namespace detail {

inline std::filesystem::path write_text(const std::filesystem::path& dir, const std::string& name,
                                        const std::string& text) {
    const auto path = dir / name;
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
    return path;
}

inline std::string numbered(const std::string& stem, std::size_t i, const std::string& ext) {
    std::string digits = std::to_string(i);
    digits.insert(0, digits.size() < 3 ? 3 - digits.size() : 0, '0');
    return stem + "_" + digits + ext;
}

} // namespace detail

/// Writes one profile's files into `dir` and returns their paths. The same
/// seed and profile always give the same files.
inline std::vector<std::filesystem::path> gen_corpus(std::uint64_t seed, const std::string& profile,
                                                     const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    corpus_rng rng(seed);
    std::vector<std::filesystem::path> files;
    if (profile == "unsat-k3") {
        files.push_back(detail::write_text(dir, "sign_patterns.cnf", write_dimacs(sign_pattern_formula())));
    } else if (profile == "sat-k3") {
        for (std::size_t i = 0; i < 8; ++i) {
            files.push_back(detail::write_text(dir, detail::numbered("sign_patterns_minus", i, ".cnf"),
                                               write_dimacs(sign_pattern_formula(i))));
        }
    } else if (profile == "tiny-sat") {
        for (std::size_t i = 0; i < 10; ++i) {
            // Redrawn until it reduces at k = 3, so test mode can check it.
            cnf_formula f;
            for (;;) {
                const std::size_t n = 3 + uniform_below(rng, 4);
                const auto planted = random_assignment(rng, n);
                f = random_34_formula(rng, n, 1 + uniform_below(rng, 4), &planted);
                try {
                    (void)test_grouping(f, 3);
                    break;
                } catch (const construction_error&) {
                }
            }
            files.push_back(detail::write_text(dir, detail::numbered("tiny_sat", i, ".cnf"), write_dimacs(f)));
        }
    } else if (profile == "random-3cnf") {
        for (std::size_t i = 0; i < 100; ++i) {
            const std::size_t n = 3 + uniform_below(rng, 10);
            const std::size_t m = 1 + uniform_below(rng, 5 * n);
            files.push_back(detail::write_text(dir, detail::numbered("random_3cnf", i, ".cnf"),
                                               write_dimacs(random_3cnf(rng, n, m))));
        }
    } else if (profile == "34-form") {
        for (std::size_t i = 0; i < 20; ++i) {
            const std::size_t n = 16 + uniform_below(rng, 25);
            const auto planted = random_assignment(rng, n);
            const auto f = random_34_formula(rng, n, n, &planted);
            files.push_back(detail::write_text(dir, detail::numbered("form34", i, ".cnf"), write_dimacs(f)));
            std::ostringstream model;
            write_assignment(model, planted);
            files.push_back(detail::write_text(dir, detail::numbered("form34", i, ".sol"), model.str()));
        }
    } else if (profile == "hom-pairs") {
        for (std::size_t i = 0; i < 100; ++i) {
            const auto g = random_plain_graph(rng, 1 + uniform_below(rng, 5), 0.5);
            const auto h = random_plain_graph(rng, 1 + uniform_below(rng, 4), 0.6);
            files.push_back(detail::write_text(dir, detail::numbered("hom_pair", i, ".si"),
                                               write_instance(si_instance(g, h))));
        }
    } else if (profile == "colored-si") {
        for (std::size_t i = 0; i < 200; ++i) {
            const std::size_t n = 1 + uniform_below(rng, 8);
            const std::size_t c = 1 + uniform_below(rng, 3), t = 1 + uniform_below(rng, 4);
            files.push_back(detail::write_text(dir, detail::numbered("colored_si", i, ".si"),
                                               write_instance(random_si_pair(rng, n, c, t))));
        }
    } else {
        throw contract_error("gen_corpus: unknown profile '" + profile + "'");
    }
    return files;
}

} // namespace subiso
