#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"
#include "subiso/corpus.hpp"
#include "subiso/decolor.hpp"
#include "subiso/solve.hpp"

using namespace subiso;

namespace {

using code_list = std::vector<std::pair<std::size_t, std::size_t>>;

std::size_t colored_edge_total(const colored_multigraph& g) { return g.edges().size(); }

bool solver_yes(const si_instance& inst) {
    const auto r = si_solve(inst);
    EXPECT_NE(r.status, verdict::inconclusive);
    return r.status == verdict::yes;
}

} // namespace

TEST(PairCode, SmallValues) {
    EXPECT_EQ(gadget_width(1), 2u);
    EXPECT_EQ(gadget_width(4), 4u);
    EXPECT_EQ(gadget_width(5), 6u);
    EXPECT_EQ(gadget_width(9), 6u);
    EXPECT_EQ(gadget_width(10), 8u);
    EXPECT_EQ(pair_code(1), (code_list{{1, 2}}));
    EXPECT_EQ(pair_code(3), (code_list{{1, 2}, {1, 3}, {1, 4}}));
    EXPECT_EQ(pair_code(4), (code_list{{1, 2}, {1, 3}, {1, 4}, {2, 3}}));
    EXPECT_THROW(gadget_width(0), contract_error);
}

TEST(PairCode, InjectiveAndInRange) {
    for (std::size_t t = 1; t <= 64; ++t) {
        const auto code = pair_code(t);
        const auto w = gadget_width(t);
        ASSERT_EQ(code.size(), t);
        EXPECT_EQ(std::set<code_list::value_type>(code.begin(), code.end()).size(), t);
        for (auto [i, j] : code) {
            EXPECT_GE(i, 1u);
            EXPECT_LT(i, j);
            EXPECT_LE(j, w);
        }
    }
}

TEST(EdgeDecolor, SingleEdgeLayout) {
    // K2 with colour-2 edge among t = 3; t' = 4, blocks of 6, code (1, 4).
    const auto g = build_graph(2, std::vector<color>{0, 1}, std::vector<colored_edge>{{0, 1, 2}}, 2, 3);
    const auto out = remove_edge_colors(si_instance(g, g)).pattern;
    EXPECT_EQ(out.vertex_count(), 12u);
    EXPECT_EQ(out.color_count(), 3u);
    EXPECT_EQ(out.edge_color_count(), 1u);
    EXPECT_EQ(out.vertex_color(0), 0u);
    EXPECT_EQ(out.vertex_color(6), 1u);
    for (vertex_id i = 1; i <= 5; ++i) {
        EXPECT_EQ(out.vertex_color(i), 2u);
        EXPECT_EQ(out.vertex_color(6 + i), 2u);
    }
    // spokes to u'_1..u'_4, none to u'_5
    for (vertex_id i = 1; i <= 4; ++i) {
        EXPECT_TRUE(out.has_edge(0, i, 0));
    }
    EXPECT_FALSE(out.has_edge(0, 5, 0));
    for (vertex_id i = 2; i <= 5; ++i) {
        EXPECT_TRUE(out.has_edge(i - 1, i, 0));
    }
    EXPECT_TRUE(out.has_edge(1, 10, 0));
    EXPECT_TRUE(out.has_edge(4, 7, 0));
    EXPECT_EQ(out.edge_count(), 2u * 8u + 2u);
}

TEST(EdgeDecolor, SizeFactors) {
    corpus_rng rng(201);
    for (int i = 0; i < 60; ++i) {
        const std::size_t n = 1 + uniform_below(rng, 8), c = 1 + uniform_below(rng, 3),
                          t = 1 + uniform_below(rng, 4);
        const auto inst = random_si_pair(rng, n, c, t);
        const auto out = remove_edge_colors(inst);
        const auto w = gadget_width(t);
        for (const auto* pair : {&inst.pattern, &inst.host}) {
            const auto& src = *pair;
            const auto& dst = pair == &inst.pattern ? out.pattern : out.host;
            EXPECT_EQ(dst.vertex_count(), n * (w + 2));
            EXPECT_EQ(dst.color_count(), c + 1);
            EXPECT_EQ(dst.edge_count(), n * 2 * w + 2 * colored_edge_total(src));
            const auto hist = color_histograms(dst);
            EXPECT_EQ(hist[c], n * (w + 1));
        }
    }
}

TEST(VertexDecolor, LeafCounts) {
    const auto g = build_graph(3, std::vector<color>{1, 2, 0}, std::vector<colored_edge>{{0, 1, 0}}, 3, 1);
    const auto out = remove_vertex_colors(si_instance(g, g)).pattern;
    // green (1) gets 3 leaves, blue (2) gets 4, red (0) gets 2
    EXPECT_EQ(out.vertex_count(), 3u + 3u + 4u + 2u);
    EXPECT_EQ(out.color_count(), 1u);
    EXPECT_EQ(out.degree(0), 1u + 3u);
    EXPECT_EQ(out.degree(1), 1u + 4u);
    EXPECT_EQ(out.degree(2), 2u);
    for (vertex_id v = 3; v < out.vertex_count(); ++v) {
        EXPECT_EQ(out.degree(v), 1u);
    }
}

TEST(VertexDecolor, LeafCountsRandom) {
    corpus_rng rng(202);
    for (int i = 0; i < 60; ++i) {
        const std::size_t n = 1 + uniform_below(rng, 8), c = 1 + uniform_below(rng, 3),
                          t = 1 + uniform_below(rng, 4);
        auto inst = random_si_pair(rng, n, c, t);
        inst.pattern = build_graph(n, inst.host.vertex_colors(), inst.pattern.edges(), c, t);
        const auto out = remove_vertex_colors(inst);
        std::size_t expect = n;
        for (auto x : inst.host.vertex_colors()) {
            expect += x + 2;
        }
        EXPECT_EQ(out.pattern.vertex_count(), expect);
        EXPECT_EQ(out.host.vertex_count(), expect);
        EXPECT_EQ(out.pattern.edge_color_count(), t);
        std::vector<std::size_t> leaves(n, 0);
        for (vertex_id v = vertex_id(n); v < expect; ++v) {
            ASSERT_EQ(out.host.degree(v), 1u);
            const auto owner = out.host.neighbors(v).front().vertex;
            ASSERT_LT(owner, n);
            EXPECT_EQ(out.host.edge_mask(v, owner), color_mask(1));
            ++leaves[owner];
        }
        for (vertex_id v = 0; v < n; ++v) {
            EXPECT_EQ(leaves[v], inst.host.vertex_color(v) + 2u);
        }
    }
}

TEST(VertexDecolor, HistogramMismatchGivesCanonicalNo) {
    const auto p = build_graph(2, std::vector<color>{0, 0}, std::vector<colored_edge>{}, 2, 3);
    const auto h = build_graph(2, std::vector<color>{0, 1}, std::vector<colored_edge>{}, 2, 3);
    const auto out = remove_vertex_colors(si_instance(p, h));
    EXPECT_EQ(out, canonical_no_instance(3));
    EXPECT_EQ(out.pattern.edge_color_count(), 3u);
    EXPECT_FALSE(oracle::naive_si(out.pattern, out.host));
}

TEST(Decolor, RequiresEqualSizes) {
    const auto p = build_graph(1, std::vector<color>{0}, std::vector<colored_edge>{}, 1, 1);
    const auto h = build_graph(2, std::vector<color>{0, 0}, std::vector<colored_edge>{}, 1, 1);
    EXPECT_THROW(remove_edge_colors(si_instance(p, h)), contract_error);
    EXPECT_THROW(remove_vertex_colors(si_instance(p, h)), contract_error);
}

TEST(Decolor, PipelineIsPlain) {
    corpus_rng rng(203);
    const auto out = decolor_pipeline(random_si_pair(rng, 5, 3, 4));
    EXPECT_EQ(out.pattern.color_count(), 1u);
    EXPECT_EQ(out.pattern.edge_color_count(), 1u);
}

// Small instances: the naive oracle decides the edge-decoloured side too.
TEST(Decolor, EdgeStageVerdictMatchesNaive) {
    corpus_rng rng(204);
    for (int i = 0; i < 80; ++i) {
        const auto inst =
            random_si_pair(rng, 1 + uniform_below(rng, 4), 1 + uniform_below(rng, 3), 1 + uniform_below(rng, 4));
        const bool expect = oracle::naive_si(inst.pattern, inst.host);
        const auto e = remove_edge_colors(inst);
        EXPECT_EQ(oracle::naive_si(e.pattern, e.host), expect) << i;
    }
}

TEST(Decolor, VerdictInvariant) {
    corpus_rng rng(205);
    for (int i = 0; i < 80; ++i) {
        const auto inst =
            random_si_pair(rng, 1 + uniform_below(rng, 8), 1 + uniform_below(rng, 3), 1 + uniform_below(rng, 4));
        const bool expect = oracle::naive_si(inst.pattern, inst.host);
        EXPECT_EQ(solver_yes(remove_edge_colors(inst)), expect) << i;
        EXPECT_EQ(solver_yes(remove_vertex_colors(inst)), expect) << i;
        EXPECT_EQ(solver_yes(decolor_pipeline(inst)), expect) << i;
    }
}
