#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "subiso/corpus.hpp"
#include "subiso/formula.hpp"

using namespace subiso;

namespace {

cnf_formula formula_from(std::size_t n, std::initializer_list<std::initializer_list<int>> rows) {
    std::vector<clause> cs;
    for (const auto& row : rows) {
        clause c;
        for (int code : row) {
            c.push_back(literal::from_dimacs(code));
        }
        cs.push_back(c);
    }
    return cnf_formula(n, cs);
}

std::size_t parse_error_line(const std::string& text) {
    try {
        parse_dimacs(text);
    } catch (const parse_error& e) {
        return e.line();
    }
    return 0;
}

} // namespace

TEST(Dimacs, ParsesSingleClause) {
    const auto f = parse_dimacs("p cnf 3 1\n1 -2 3 0\n");
    ASSERT_EQ(f.var_count(), 3u);
    ASSERT_EQ(f.clause_count(), 1u);
    const clause expected{{0, true}, {1, false}, {2, true}};
    EXPECT_EQ(f[0], expected);
}

TEST(Dimacs, EmptyFormula) {
    const auto f = parse_dimacs("p cnf 0 0");
    EXPECT_EQ(f.var_count(), 0u);
    EXPECT_EQ(f.clause_count(), 0u);
    EXPECT_EQ(write_dimacs(f), "p cnf 0 0\n");
}

TEST(Dimacs, CommentsAndMultilineClauses) {
    const auto f = parse_dimacs("c hello\np cnf 4 2\n1 2\n 3 0 -4\nc mid\n 0\n");
    ASSERT_EQ(f.clause_count(), 2u);
    EXPECT_EQ(f[0].size(), 3u);
    EXPECT_EQ(f[1], (clause{{3, false}}));
}

TEST(Dimacs, ErrorsCarryLineNumbers) {
    EXPECT_THROW(parse_dimacs("p cnf 2 1\n1 3 0\n"), parse_error);
    EXPECT_EQ(parse_error_line("p cnf 2 1\n1 3 0\n"), 2u);
    EXPECT_EQ(parse_error_line("c x\np dnf 2 1\n1 0\n"), 2u);
    EXPECT_GT(parse_error_line("p cnf 2 2\n1 0\n"), 0u);
    EXPECT_GT(parse_error_line("p cnf 2 1\n1 2\n"), 0u);
    EXPECT_EQ(parse_error_line("1 2 0\n"), 1u);
}

TEST(Dimacs, RoundTripRandom) {
    corpus_rng rng(11);
    for (int i = 0; i < 50; ++i) {
        const auto f = random_3cnf(rng, 3 + i % 9, 1 + i);
        EXPECT_EQ(parse_dimacs(write_dimacs(f)), f);
    }
}

TEST(Assignment, ParseAndWrite) {
    std::istringstream in("v 1 -2 3\nv -4 0\n");
    const auto a = parse_assignment(in, 4);
    EXPECT_EQ(a.values, (std::vector<bool>{true, false, true, false}));
    std::ostringstream out;
    write_assignment(out, a);
    std::istringstream back(out.str());
    EXPECT_EQ(parse_assignment(back, 4), a);
}

TEST(SatOracle, SignPatterns) {
    EXPECT_FALSE(sat_oracle(sign_pattern_formula()).satisfiable);
    // Dropping (-x1 -x2 -x3) leaves all-true as the only model.
    const auto f = sign_pattern_formula(7);
    const auto r = sat_oracle(f);
    ASSERT_TRUE(r.satisfiable);
    EXPECT_EQ(r.witness->values, (std::vector<bool>{true, true, true}));
    for (std::size_t drop = 0; drop < 8; ++drop) {
        const auto s = sat_oracle(sign_pattern_formula(drop));
        ASSERT_TRUE(s.satisfiable);
        EXPECT_TRUE(s.witness->satisfies(sign_pattern_formula(drop)));
    }
}

TEST(SatOracle, EmptyFormulaAndRefusal) {
    EXPECT_TRUE(sat_oracle(cnf_formula(0, {})).satisfiable);
    EXPECT_THROW(sat_oracle(cnf_formula(25, {})), refusal_error);
    EXPECT_NO_THROW(sat_oracle(cnf_formula(25, {}), 25));
}

TEST(SatOracle, AgreesWithTruthTable) {
    corpus_rng rng(5);
    for (int i = 0; i < 200; ++i) {
        const auto f = random_3cnf(rng, 3 + i % 8, 1 + i % 40);
        const auto r = sat_oracle(f);
        EXPECT_EQ(r.satisfiable, oracle::truth_table_sat(f));
        if (r.witness) {
            EXPECT_TRUE(r.witness->satisfies(f));
        }
    }
}

TEST(Validate34, Reports) {
    EXPECT_TRUE(validate_34(formula_from(3, {{1, 2, 3}})).empty());
    const auto five = formula_from(11, {{1, 2, 3}, {1, 4, 5}, {1, 6, 7}, {1, 8, 9}, {1, 10, 11}});
    const auto issues = validate_34(five);
    ASSERT_EQ(issues.size(), 1u);
    EXPECT_EQ(issues[0].what, validation_issue::kind::too_many_occurrences);
    const auto narrow = validate_34(formula_from(2, {{1, 2}}));
    ASSERT_EQ(narrow.size(), 1u);
    EXPECT_EQ(narrow[0].what, validation_issue::kind::wrong_width);
    const auto dup = validate_34(formula_from(2, {{1, -1, 2}}));
    ASSERT_EQ(dup.size(), 1u);
    EXPECT_EQ(dup[0].what, validation_issue::kind::duplicate_variable);
}

// The padding gadget: satisfiable, its anchor false in every model, every
// variable within four occurrences and the anchor with two to spare.
TEST(Transform34, ForcingGadgetByExhaustion) {
    std::vector<clause> cs;
    for (const auto& row : detail::forcing_gadget) {
        clause c;
        for (int code : row) {
            c.push_back(literal::from_dimacs(code));
        }
        cs.push_back(c);
    }
    const cnf_formula g(detail::forcing_gadget_vars, cs);
    EXPECT_TRUE(validate_34(g).empty());
    EXPECT_EQ(g.occurrence_counts()[0], 4 - detail::forcing_gadget_spare);
    bool any = false;
    for (unsigned bits = 0; bits < (1u << detail::forcing_gadget_vars); ++bits) {
        assignment a{std::vector<bool>(detail::forcing_gadget_vars)};
        for (std::size_t v = 0; v < detail::forcing_gadget_vars; ++v) {
            a.values[v] = (bits >> v) & 1;
        }
        if (a.satisfies(g)) {
            any = true;
            EXPECT_FALSE(a.values[0]) << "model with anchor true: " << bits;
        }
    }
    EXPECT_TRUE(any);
    EXPECT_TRUE(assignment{std::vector<bool>(detail::forcing_gadget_vars, false)}.satisfies(g));
}

TEST(Transform34, IdempotentOnValidInput) {
    const auto f = formula_from(4, {{1, 2, 3}, {-1, 2, 4}});
    EXPECT_EQ(transform_to_34(f), f);
}

TEST(Transform34, TautologyDropped) {
    const auto f = formula_from(3, {{1, -1, 2}, {2, 3}});
    const auto g = transform_to_34(f);
    EXPECT_TRUE(validate_34(g).empty());
    EXPECT_EQ(oracle::cdcl(g).has_value(), oracle::truth_table_sat(f));
}

TEST(Transform34, EmptyClauseGivesUnsat) {
    const auto g = transform_to_34(cnf_formula(2, {clause{}, clause{{0, true}}}));
    EXPECT_TRUE(validate_34(g).empty());
    EXPECT_FALSE(oracle::cdcl(g).has_value());
}

TEST(Transform34, RejectsWideClauses) {
    EXPECT_THROW(transform_to_34(formula_from(4, {{1, 2, 3, 4}})), contract_error);
}

TEST(Transform34, RandomEquisatisfiable) {
    corpus_rng rng(3);
    for (int i = 0; i < 60; ++i) {
        const std::size_t n = 3 + i % 6;
        const auto f = random_3cnf(rng, n, 4 + i % 20);
        const auto norm = normalize_34(f);
        const auto& g = norm.formula;
        ASSERT_TRUE(validate_34(g).empty()) << write_dimacs(f);
        EXPECT_LE(g.clause_count(), transform_34_size_factor * f.clause_count());
        const bool in = oracle::truth_table_sat(f);
        const auto out = oracle::cdcl(g);
        ASSERT_EQ(out.has_value(), in) << write_dimacs(f);
        if (out) {
            EXPECT_TRUE(out->satisfies(g));
            EXPECT_TRUE(norm.project(*out, f.var_count()).satisfies(f));
        }
        const auto model = sat_oracle(f);
        if (model.witness) {
            EXPECT_TRUE(norm.lift(*model.witness).satisfies(g));
        }
    }
}

TEST(Transform34, MixedWidths) {
    const auto f = formula_from(3, {{1}, {-1, 2}, {-2, 3}, {1, 2, 3}, {-3, 1}, {1, -2}});
    const auto g = transform_to_34(f);
    EXPECT_TRUE(validate_34(g).empty());
    EXPECT_EQ(oracle::cdcl(g).has_value(), oracle::truth_table_sat(f));
}

// The CDCL oracle used above, checked against the truth table.
TEST(Oracles, CdclMatchesTruthTable) {
    corpus_rng rng(17);
    for (int i = 0; i < 300; ++i) {
        const auto f = random_3cnf(rng, 3 + i % 10, 1 + i % 60);
        const auto r = oracle::cdcl(f);
        ASSERT_EQ(r.has_value(), oracle::truth_table_sat(f)) << write_dimacs(f);
        if (r) {
            EXPECT_TRUE(r->satisfies(f));
        }
    }
}
