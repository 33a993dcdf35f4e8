#include <gtest/gtest.h>

#include "oracles.hpp"
#include "subiso/corpus.hpp"
#include "subiso/sat2si.hpp"

using namespace subiso;

namespace {

struct reduced {
    cnf_formula f;
    grouping g;
};

reduced reduce_k3(const cnf_formula& f) { return {f, test_grouping(f, 3)}; }

// Labels in the documented order, listed by nested loops.
std::vector<red_vertex_label> labels_in_order(std::size_t k) {
    std::vector<red_vertex_label> out;
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            for (std::size_t c = b + 1; c < k; ++c) {
                for (unsigned bits = 0; bits < 8; ++bits) {
                    out.push_back({{a, b, c}, {bool(bits & 4), bool(bits & 2), bool(bits & 1)}});
                }
            }
        }
    }
    return out;
}

// Host edge rule restated directly over strings and labels.
color_mask expected_host_mask(std::size_t k, const std::vector<std::uint32_t>& strings, vertex_id u, vertex_id v) {
    const std::size_t blue = std::size_t(1) << k;
    const auto labels = labels_in_order(k);
    const std::size_t red = labels.size();
    const auto green = vertex_id(blue + red);
    if (u > v) {
        std::swap(u, v);
    }
    if (u == v) {
        return 0;
    }
    if (v < blue) {
        color_mask m = 0;
        for (std::size_t j = 0; j < k; ++j) {
            if (((strings[u] >> j) & 1) == ((strings[v] >> j) & 1)) {
                m |= color_mask(1) << j;
            }
        }
        return m;
    }
    if (u < blue && v < green) {
        const auto& lab = labels[v - blue];
        bool match = true;
        for (int j = 0; j < 3; ++j) {
            match = match && (bool((strings[u] >> lab.index[j]) & 1) == lab.bit[j]);
        }
        return match ? 0 : 1;
    }
    if (u >= blue && v < green) {
        return v == u + 1 ? 1 : 0;
    }
    if (u >= blue && v == green) {
        return u == blue ? 1 : 0;
    }
    return 0;
}

std::size_t count_embeddings(const colored_multigraph& g, const colored_multigraph& h) {
    const std::size_t n = g.vertex_count();
    std::vector<vertex_id> f(n);
    std::vector<bool> used(h.vertex_count(), false);
    std::size_t count = 0;
    auto place = [&](auto&& self, std::size_t u) -> void {
        if (u == n) {
            ++count;
            return;
        }
        for (vertex_id x = 0; x < h.vertex_count(); ++x) {
            if (used[x] || h.vertex_color(x) != g.vertex_color(vertex_id(u))) {
                continue;
            }
            bool ok = true;
            for (std::size_t w = 0; w < u && ok; ++w) {
                ok = (g.edge_mask(vertex_id(u), vertex_id(w)) & ~h.edge_mask(x, f[w])) == 0;
            }
            if (ok) {
                f[u] = x;
                used[x] = true;
                self(self, u + 1);
                used[x] = false;
            }
        }
    };
    place(place, 0);
    return count;
}

colored_multigraph gadget_only(std::size_t k) {
    const std::size_t red = red_vertex_count(k);
    graph_builder b(red + 1, 3, 1);
    for (vertex_id v = 0; v < red; ++v) {
        b.set_color(v, colors::red);
        if (v > 0) {
            b.add_edge(v - 1, v, 0);
        }
    }
    b.set_color(vertex_id(red), colors::green);
    b.add_edge(vertex_id(red), 0, 0);
    return std::move(b).build();
}

} // namespace

TEST(Sat2si, VertexCounts) {
    EXPECT_EQ(sat_instance_vertex_count(3), 17u);
    EXPECT_EQ(sat_instance_vertex_count(11), 3369u);
    const auto r = reduce_k3(sign_pattern_formula());
    const auto p = build_pattern(r.f, r.g.coloring, r.g.packing, 3);
    EXPECT_EQ(p.vertex_count(), 17u);
    EXPECT_EQ(color_histograms(p), (std::vector<std::size_t>{8, 1, 8}));
}

TEST(Sat2si, RedPositions) {
    EXPECT_EQ(red_vertex_position({{0, 1, 2}, {false, false, false}}, 3), 1u);
    EXPECT_EQ(red_vertex_position({{0, 1, 2}, {true, true, true}}, 3), 8u);
    EXPECT_EQ(red_vertex_position({{0, 1, 3}, {false, false, false}}, 4), 9u);
    EXPECT_THROW(red_vertex_position({{1, 0, 2}, {false, false, false}}, 3), contract_error);
    for (std::size_t k = 3; k <= 9; ++k) {
        const auto labels = labels_in_order(k);
        ASSERT_EQ(labels.size(), red_vertex_count(k));
        for (std::size_t i = 0; i < labels.size(); ++i) {
            ASSERT_EQ(red_vertex_position(labels[i], k), i + 1);
            ASSERT_EQ(red_vertex_label_at(i + 1, k), labels[i]);
        }
    }
}

TEST(Sat2si, FalsifyingLabel) {
    const variable_coloring col{3, {0, 1, 2}};
    const clause all_pos{{0, true}, {1, true}, {2, true}};
    EXPECT_EQ(falsifying_label(all_pos, col), (red_vertex_label{{0, 1, 2}, {false, false, false}}));
    const variable_coloring swapped{4, {3, 0, 1}};
    const clause mixed{{0, false}, {1, true}, {2, false}};
    EXPECT_EQ(falsifying_label(mixed, swapped), (red_vertex_label{{0, 1, 3}, {false, true, true}}));
}

TEST(Sat2si, PatternEdges) {
    // Two clauses sharing x0 (colour 0) land in different groups joined by colour 0.
    const cnf_formula f(5, {{{0, true}, {1, true}, {2, true}}, {{0, false}, {3, true}, {4, true}}});
    const variable_coloring col{3, {0, 1, 2, 1, 2}};
    const auto pack = pack_clauses(f, col, 3);
    const auto p = build_pattern(f, col, pack, 3);
    EXPECT_EQ(p.edge_mask(vertex_id(pack.group_of[0]), vertex_id(pack.group_of[1])), color_mask(1));
    const sat_layout layout(3);
    EXPECT_TRUE(p.has_edge(vertex_id(pack.group_of[0]), layout.red(1), 0));
    EXPECT_TRUE(p.has_edge(vertex_id(pack.group_of[1]), layout.red(5), 0));
    EXPECT_TRUE(p.has_edge(layout.green(), layout.red(1), 0));
    EXPECT_EQ(p.degree(layout.green()), 1u);
}

TEST(Sat2si, PatternIndependentOfSequence) {
    const auto r = reduce_k3(sign_pattern_formula(2));
    const auto a = write_cgf(build_pattern(r.f, r.g.coloring, r.g.packing, 3));
    const auto b = write_cgf(build_pattern(r.f, r.g.coloring, r.g.packing, 3));
    EXPECT_EQ(a, b);
}

TEST(Sat2si, HostExamples) {
    preimage_sequence s(8, 0);
    s[0] = 2;
    s[7] = 6;
    const auto h = build_host(3, s);
    EXPECT_EQ(h.vertex_count(), 17u);
    EXPECT_EQ(h.edge_mask(0, 1), color_mask(7));
    EXPECT_EQ(h.edge_mask(0, 2), color_mask(0));
    const sat_layout layout(3);
    EXPECT_FALSE(h.has_edge(0, layout.red(1), 0));
    EXPECT_TRUE(h.has_edge(0, layout.red(2), 0));
    EXPECT_THROW(build_host(3, preimage_sequence(8, 0)), contract_error);
}

TEST(Sat2si, HostMatchesRuleAndView) {
    corpus_rng rng(21);
    for (std::size_t k : {3, 4}) {
        for (int trial = 0; trial < 5; ++trial) {
            const std::size_t n = std::size_t(1) << k;
            preimage_sequence s(n, 0);
            for (std::size_t i = 0; i < n; ++i) {
                ++s[uniform_below(rng, n)];
            }
            std::vector<std::uint32_t> strings;
            for (std::size_t i = 0; i < n; ++i) {
                strings.insert(strings.end(), s[i], std::uint32_t(i));
            }
            const auto h = build_host(k, s);
            const sat_host_view view(k, s);
            for (vertex_id u = 0; u < h.vertex_count(); ++u) {
                for (vertex_id v = 0; v < h.vertex_count(); ++v) {
                    const auto want = expected_host_mask(k, strings, u, v);
                    ASSERT_EQ(h.edge_mask(u, v), want) << u << " " << v;
                    ASSERT_EQ(view.edge_mask(u, v), want);
                }
                ASSERT_EQ(view.vertex_color(u), h.vertex_color(u));
            }
        }
    }
}

TEST(Sat2si, GadgetRigidity) {
    for (std::size_t k : {3, 4}) {
        const auto g = gadget_only(k);
        EXPECT_EQ(count_embeddings(g, g), 1u) << k;
    }
}

TEST(Sat2si, SequenceEnumeration) {
    auto s1 = enumerate_sequences(1);
    EXPECT_EQ(s1.next(), (std::optional<std::vector<std::uint64_t>>{{0, 2}}));
    EXPECT_EQ(s1.next(), (std::optional<std::vector<std::uint64_t>>{{1, 1}}));
    EXPECT_EQ(s1.next(), (std::optional<std::vector<std::uint64_t>>{{2, 0}}));
    EXPECT_FALSE(s1.next().has_value());

    EXPECT_EQ(sequence_count(3), big_count(6435));
    auto s3 = enumerate_sequences(3);
    std::size_t count = 0;
    while (auto s = s3.next()) {
        std::uint64_t sum = 0;
        for (auto x : *s) {
            sum += x;
        }
        ASSERT_EQ(sum, 8u);
        ++count;
    }
    EXPECT_EQ(count, 6435u);

    try {
        enumerate_sequences(11);
        FAIL() << "expected refusal";
    } catch (const refusal_error& e) {
        EXPECT_NE(std::string(e.what()).find("C(4095,2047)"), std::string::npos) << e.what();
    }
}

TEST(Sat2si, WitnessAndDecodeOnSiblings) {
    for (std::size_t drop = 0; drop < 8; ++drop) {
        const auto r = reduce_k3(sign_pattern_formula(drop));
        const auto a = sat_oracle(r.f).witness.value();
        const auto w = witness_sequence_and_embedding(r.f, r.g.coloring, r.g.packing, 3, a);
        std::uint64_t sum = 0;
        for (auto x : w.sequence) {
            sum += x;
        }
        EXPECT_EQ(sum, 8u);
        const auto pattern = build_pattern(r.f, r.g.coloring, r.g.packing, 3);
        const auto host = build_host(3, w.sequence);
        EXPECT_TRUE(verify_embedding(pattern, host, w.map).ok());
        const auto decoded = decode_assignment(w.map, r.f, r.g.coloring, r.g.packing, 3, w.sequence);
        EXPECT_TRUE(decoded.satisfies(r.f));
        EXPECT_TRUE(oracle::naive_si(pattern, host));
    }
}

TEST(Sat2si, WitnessRejectsNonModel) {
    const auto r = reduce_k3(sign_pattern_formula(7));
    const assignment bad{{false, false, false}};
    EXPECT_THROW(witness_sequence_and_embedding(r.f, r.g.coloring, r.g.packing, 3, bad), contract_error);
}

TEST(Sat2si, SingleClauseAndUnusedVariable) {
    const cnf_formula f(4, {{{0, false}, {1, true}, {2, false}}});
    const auto g = test_grouping(f, 3);
    const assignment a{{false, false, true, true}};
    const auto w = witness_sequence_and_embedding(f, g.coloring, g.packing, 3, a);
    const auto pattern = build_pattern(f, g.coloring, g.packing, 3);
    EXPECT_TRUE(verify_embedding(pattern, sat_host_view(3, w.sequence), w.map).ok());
    const auto decoded = decode_assignment(w.map, f, g.coloring, g.packing, 3, w.sequence);
    EXPECT_TRUE(decoded.satisfies(f));
    EXPECT_FALSE(decoded.values[3]);
}

TEST(Sat2si, DecodeRejectsNonEmbedding) {
    const auto r = reduce_k3(sign_pattern_formula(0));
    const auto a = sat_oracle(r.f).witness.value();
    auto w = witness_sequence_and_embedding(r.f, r.g.coloring, r.g.packing, 3, a);
    std::swap(w.map.map[8], w.map.map[9]);
    EXPECT_THROW(decode_assignment(w.map, r.f, r.g.coloring, r.g.packing, 3, w.sequence), contract_error);
}

TEST(Sat2si, ColouringAndPackingChecked) {
    const auto f = sign_pattern_formula();
    const variable_coloring bad{3, {0, 0, 1}};
    EXPECT_THROW(build_pattern(f, bad, clause_packing{8, std::vector<std::size_t>(8, 0)}, 3), contract_error);
    const auto g = test_grouping(f, 3);
    EXPECT_THROW(build_pattern(f, g.coloring, clause_packing{8, std::vector<std::size_t>(8, 0)}, 3),
                 contract_error);
}

TEST(Sat2si, PlantedFormulasRoundTrip) {
    corpus_rng rng(33);
    for (int i = 0; i < 20; ++i) {
        const std::size_t n = 6 + uniform_below(rng, 10);
        const auto planted = random_assignment(rng, n);
        const auto f = random_34_formula(rng, n, n, &planted);
        const auto g = test_grouping(f, 9);
        const auto w = witness_sequence_and_embedding(f, g.coloring, g.packing, 9, planted);
        const auto pattern = build_pattern(f, g.coloring, g.packing, 9);
        ASSERT_TRUE(verify_embedding(pattern, sat_host_view(9, w.sequence), w.map).ok());
        EXPECT_TRUE(decode_assignment(w.map, f, g.coloring, g.packing, 9, w.sequence).satisfies(f));
    }
}
