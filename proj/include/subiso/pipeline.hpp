#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "subiso/errors.hpp"
#include "subiso/formula.hpp"
#include "subiso/grouping.hpp"
#include "subiso/sat2si.hpp"
#include "subiso/solve.hpp"

namespace subiso {

enum class pipeline_mode { paper, test };

struct pipeline_options {
    pipeline_mode mode = pipeline_mode::test;
    /// Test mode only; defaults to 3.
    std::optional<std::size_t> k;
    big_count cap = default_enumeration_cap;
    bool force = false;
    std::uint64_t node_budget = default_node_budget;
    std::size_t threads = 1;
    std::size_t sat_var_limit = default_sat_var_limit;
    /// Satisfying assignment of the input formula, used when the SAT oracle
    /// cannot decide it.
    std::optional<assignment> witness;
};

struct pipeline_report {
    std::string mode;
    std::size_t input_vars = 0, input_clauses = 0;
    bool normalized = false;
    std::size_t vars = 0, clauses = 0;
    bool form_34 = false;

    std::size_t k = 0;
    std::size_t colors_used = 0;
    std::size_t largest_color_class = 0;
    std::size_t groups_used = 0;

    std::size_t pattern_vertices = 0, pattern_edges = 0;
    std::size_t host_vertices = 0;
    std::string sequence_count;

    /// "SAT", "UNSAT" or "UNKNOWN".
    std::string sat_verdict = "UNKNOWN";
    /// "YES", "NO", "INCONCLUSIVE" or "NOT-ENUMERATED".
    std::string si_verdict = "NOT-ENUMERATED";
    std::uint64_t hosts_examined = 0;
    std::optional<std::uint64_t> witness_sequence_index;
    std::optional<embedding> witness_embedding;
    std::optional<preimage_sequence> witness_sequence;
    bool witness_verified = false;
    bool decoded_satisfies = false;
    std::vector<std::string> notes;

    bool agreement = false;
    /// Set when a stage failed; names the stage.
    std::optional<std::string> failed_stage;
    std::string failure;
};

namespace detail {

inline bool exact_width_3(const cnf_formula& f) {
    for (const auto& c : f.clauses()) {
        if (c.size() != 3 || c[0].var == c[1].var || c[0].var == c[2].var || c[1].var == c[2].var) {
            return false;
        }
    }
    return true;
}

} // namespace detail

/// Runs the whole SAT -> colored SI chain on one formula and cross-checks it.
/// Test mode enumerates every host for a small k and compares the family
/// verdict with the SAT oracle. Paper mode uses k = compute_k(n), never
/// enumerates, and checks the satisfiable direction through the witness path.
inline pipeline_report verify_pipeline(const cnf_formula& input, const pipeline_options& opt = {}) {
    pipeline_report r;
    r.mode = opt.mode == pipeline_mode::paper ? "paper" : "test";
    r.input_vars = input.var_count();
    r.input_clauses = input.clause_count();
    std::string stage = "normalize";
    try {
        cnf_formula f = input;
        std::optional<normalization> norm;
        const bool needs_34 = opt.mode == pipeline_mode::paper ? !validate_34(input).empty() : !detail::exact_width_3(input);
        if (needs_34) {
            norm = normalize_34(input);
            f = norm->formula;
            r.normalized = true;
        }
        r.vars = f.var_count();
        r.clauses = f.clause_count();
        r.form_34 = validate_34(f).empty();
        if (opt.mode == pipeline_mode::paper && !r.form_34) {
            throw construction_error("normalized formula is not in (3,4)-form");
        }

        stage = "sat-oracle";
        std::optional<assignment> model;
        if (input.var_count() <= opt.sat_var_limit) {
            const auto sr = sat_oracle(input, opt.sat_var_limit);
            r.sat_verdict = sr.satisfiable ? "SAT" : "UNSAT";
            if (sr.witness) {
                model = *sr.witness;
            }
        } else if (opt.witness) {
            if (!opt.witness->satisfies(input)) {
                throw contract_error("supplied assignment does not satisfy the formula");
            }
            r.sat_verdict = "SAT";
            model = *opt.witness;
            r.notes.push_back("satisfiability taken from the supplied assignment");
        } else {
            r.notes.push_back("formula too large for the SAT oracle and no assignment supplied");
        }
        std::optional<assignment> f_model;
        if (model) {
            f_model = norm ? norm->lift(*model) : *model;
            if (!f_model->satisfies(f)) {
                throw construction_error("normalization lost satisfiability");
            }
        }

        stage = "grouping";
        grouping gr;
        if (opt.mode == pipeline_mode::paper) {
            gr = auto_grouping(f);
        } else {
            gr = test_grouping(f, opt.k.value_or(3));
        }
        r.k = gr.k;
        {
            std::vector<std::size_t> sizes(gr.k, 0);
            for (auto c : gr.coloring.color_of) {
                ++sizes[c];
            }
            for (auto s : sizes) {
                r.colors_used += s > 0;
                r.largest_color_class = std::max(r.largest_color_class, s);
            }
            std::vector<bool> used(gr.packing.group_count, false);
            for (auto g : gr.packing.group_of) {
                used[g] = true;
            }
            r.groups_used = std::size_t(std::count(used.begin(), used.end(), true));
        }

        stage = "reduce";
        const auto pattern = build_pattern(f, gr.coloring, gr.packing, gr.k);
        r.pattern_vertices = pattern.vertex_count();
        r.pattern_edges = pattern.edge_count();
        r.host_vertices = sat_instance_vertex_count(gr.k);
        r.sequence_count = format_count(sequence_count(gr.k));

        stage = "witness";
        if (f_model) {
            const auto w = witness_sequence_and_embedding(f, gr.coloring, gr.packing, gr.k, *f_model);
            const sat_host_view host(gr.k, w.sequence);
            const auto report = verify_embedding(pattern, host, w.map);
            r.witness_verified = report.ok();
            if (!report.ok()) {
                throw construction_error("witness embedding rejected: " + report.violations.front());
            }
            const auto decoded = decode_assignment(w.map, f, gr.coloring, gr.packing, gr.k, w.sequence);
            r.decoded_satisfies = decoded.satisfies(f);
            r.witness_embedding = w.map;
            r.witness_sequence = w.sequence;
        }

        stage = "si-family";
        if (opt.mode == pipeline_mode::test) {
            auto stream = enumerate_sequences(gr.k, opt.cap, opt.force);
            const std::function<std::optional<preimage_sequence>()> next = [&] { return stream.next(); };
            const std::function<colored_multigraph(const preimage_sequence&)> make =
                [&](const preimage_sequence& s) { return build_host(gr.k, s); };
            const auto fam = si_family_solve<preimage_sequence>(pattern, next, make,
                                                                {opt.node_budget, opt.threads});
            r.si_verdict = to_string(fam.status);
            r.hosts_examined = fam.hosts_examined;
            if (fam.witness) {
                // Re-derive the sequence of the winning host for verification.
                auto again = enumerate_sequences(gr.k, opt.cap, true);
                std::optional<preimage_sequence> s;
                for (std::uint64_t i = 0; i <= *fam.witness_index; ++i) {
                    s = again.next();
                }
                const sat_host_view host(gr.k, *s);
                if (!verify_embedding(pattern, host, *fam.witness).ok()) {
                    throw construction_error("solver embedding rejected by the verifier");
                }
                const auto decoded = decode_assignment(*fam.witness, f, gr.coloring, gr.packing, gr.k, *s);
                if (!decoded.satisfies(f)) {
                    throw construction_error("decoded assignment does not satisfy the formula");
                }
                r.witness_sequence_index = fam.witness_index;
                if (!r.witness_embedding) {
                    r.witness_embedding = fam.witness;
                    r.witness_sequence = s;
                }
            }
            r.agreement = (r.sat_verdict == "SAT" && r.si_verdict == "YES") ||
                          (r.sat_verdict == "UNSAT" && r.si_verdict == "NO");
        } else {
            try {
                (void)enumerate_sequences(gr.k, opt.cap, false);
                r.notes.push_back("paper mode does not enumerate the host family");
            } catch (const refusal_error& e) {
                r.notes.push_back(e.what());
            }
            if (r.sat_verdict == "SAT") {
                r.si_verdict = r.witness_verified ? "YES" : "NOT-ENUMERATED";
                r.agreement = r.witness_verified && r.decoded_satisfies;
            } else if (r.sat_verdict == "UNSAT") {
                r.notes.push_back("the NO side needs enumeration and is not checked in paper mode");
                r.agreement = true;
            } else {
                r.agreement = false;
            }
        }
    } catch (const std::exception& e) {
        r.failed_stage = stage;
        r.failure = e.what();
        r.agreement = false;
    }
    return r;
}

inline void write_report(std::ostream& out, const pipeline_report& r) {
    out << "mode: " << r.mode << '\n';
    out << "input: " << r.input_vars << " vars, " << r.input_clauses << " clauses\n";
    out << "normalized: " << (r.normalized ? "yes" : "no") << " (" << r.vars << " vars, " << r.clauses
        << " clauses, (3,4)-form " << (r.form_34 ? "yes" : "no") << ")\n";
    out << "k: " << r.k << ", colours used: " << r.colors_used << ", largest class: " << r.largest_color_class
        << ", groups used: " << r.groups_used << '\n';
    out << "pattern: " << r.pattern_vertices << " vertices, " << r.pattern_edges << " edges; host: "
        << r.host_vertices << " vertices; sequences: " << r.sequence_count << '\n';
    out << "sat: " << r.sat_verdict << '\n';
    out << "si: " << r.si_verdict << " (" << r.hosts_examined << " hosts examined)\n";
    if (r.witness_embedding) {
        out << "witness: verified " << (r.witness_verified ? "yes" : "no") << ", decoded satisfies "
            << (r.decoded_satisfies ? "yes" : "no");
        if (r.witness_sequence_index) {
            out << ", first YES host " << *r.witness_sequence_index;
        }
        out << '\n';
    }
    for (const auto& n : r.notes) {
        out << "note: " << n << '\n';
    }
    if (r.failed_stage) {
        out << "failed stage: " << *r.failed_stage << ": " << r.failure << '\n';
    }
    out << "agreement: " << (r.agreement ? "true" : "false") << '\n';
}

} // namespace subiso
