#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "subiso/errors.hpp"

namespace subiso {

using variable = std::uint32_t;

struct literal {
    variable var = 0;
    bool positive = true;

    literal negated() const noexcept { return {var, !positive}; }
    /// DIMACS encoding: +-(var + 1).
    std::int64_t dimacs() const noexcept {
        return positive ? std::int64_t(var) + 1 : -(std::int64_t(var) + 1);
    }
    static literal from_dimacs(std::int64_t code) {
        return code > 0 ? literal{variable(code - 1), true} : literal{variable(-code - 1), false};
    }

    friend bool operator==(const literal&, const literal&) = default;
    friend auto operator<=>(const literal&, const literal&) = default;
};

using clause = std::vector<literal>;

/// Variables and an ordered clause list. Immutable once built; every literal's
/// variable is below var_count().
class cnf_formula {
public:
    cnf_formula() = default;

    cnf_formula(std::size_t var_count, std::vector<clause> clauses)
        : var_count_(var_count), clauses_(std::move(clauses)) {
        for (const auto& c : clauses_) {
            for (const auto& lit : c) {
                if (lit.var >= var_count_) {
                    throw contract_error("cnf_formula: literal " + std::to_string(lit.dimacs()) +
                                         " exceeds var_count " + std::to_string(var_count_));
                }
            }
        }
    }

    std::size_t var_count() const noexcept { return var_count_; }
    std::size_t clause_count() const noexcept { return clauses_.size(); }
    const std::vector<clause>& clauses() const noexcept { return clauses_; }
    const clause& operator[](std::size_t i) const { return clauses_[i]; }

    /// Number of clauses each variable appears in (a clause counts once per variable).
    std::vector<std::size_t> occurrence_counts() const {
        std::vector<std::size_t> counts(var_count_, 0);
        for (const auto& c : clauses_) {
            std::vector<variable> vars;
            for (const auto& lit : c) {
                vars.push_back(lit.var);
            }
            std::sort(vars.begin(), vars.end());
            vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
            for (auto v : vars) {
                ++counts[v];
            }
        }
        return counts;
    }

    friend bool operator==(const cnf_formula&, const cnf_formula&) = default;

private:
    std::size_t var_count_ = 0;
    std::vector<clause> clauses_;
};

/// Truth values indexed by variable.
struct assignment {
    std::vector<bool> values;

    bool satisfies(const clause& c) const {
        return std::any_of(c.begin(), c.end(),
                           [&](const literal& l) { return values.at(l.var) == l.positive; });
    }
    bool satisfies(const cnf_formula& f) const {
        if (values.size() != f.var_count()) {
            return false;
        }
        return std::all_of(f.clauses().begin(), f.clauses().end(),
                           [&](const clause& c) { return satisfies(c); });
    }

    friend bool operator==(const assignment&, const assignment&) = default;
};

// ---------------------------------------------------------------------------
// DIMACS

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) {
        out.push_back(tok);
    }
    return out;
}

inline std::int64_t parse_int(const std::string& tok, std::size_t line) {
    std::size_t used = 0;
    std::int64_t value = 0;
    try {
        value = std::stoll(tok, &used);
    } catch (const std::exception&) {
        throw parse_error(line, "expected an integer, got '" + tok + "'");
    }
    if (used != tok.size()) {
        throw parse_error(line, "expected an integer, got '" + tok + "'");
    }
    return value;
}

} // namespace detail

/// Reads DIMACS CNF: optional 'c' comment lines, a "p cnf <vars> <clauses>"
/// header, then 0-terminated clauses that may span lines. A '%' line ends input.
inline cnf_formula parse_dimacs(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::optional<std::pair<std::int64_t, std::int64_t>> header;
    std::vector<clause> clauses;
    clause pending;
    std::size_t pending_line = 0;

    while (std::getline(in, line)) {
        ++line_no;
        const auto toks = detail::split_ws(line);
        if (toks.empty() || toks[0][0] == 'c') {
            continue;
        }
        if (toks[0] == "%") {
            break;
        }
        if (toks[0] == "p") {
            if (header) {
                throw parse_error(line_no, "duplicate problem line");
            }
            if (toks.size() != 4 || toks[1] != "cnf") {
                throw parse_error(line_no, "malformed header, expected 'p cnf <vars> <clauses>'");
            }
            const auto vars = detail::parse_int(toks[2], line_no);
            const auto count = detail::parse_int(toks[3], line_no);
            if (vars < 0 || count < 0) {
                throw parse_error(line_no, "negative count in header");
            }
            header = {vars, count};
            continue;
        }
        if (!header) {
            throw parse_error(line_no, "clause data before 'p cnf' header");
        }
        for (const auto& tok : toks) {
            const auto code = detail::parse_int(tok, line_no);
            if (code == 0) {
                clauses.push_back(std::move(pending));
                pending.clear();
                continue;
            }
            const auto var = code > 0 ? code : -code;
            if (var > header->first) {
                throw parse_error(line_no, "literal " + tok + " out of range (" +
                                               std::to_string(header->first) + " variables declared)");
            }
            if (pending.empty()) {
                pending_line = line_no;
            }
            pending.push_back(literal::from_dimacs(code));
        }
    }
    if (!header) {
        throw parse_error(line_no, "missing 'p cnf' header");
    }
    if (!pending.empty()) {
        throw parse_error(pending_line, "clause not terminated by 0");
    }
    if (std::int64_t(clauses.size()) != header->second) {
        throw parse_error(line_no, "header declares " + std::to_string(header->second) +
                                       " clauses, found " + std::to_string(clauses.size()));
    }
    return cnf_formula(std::size_t(header->first), std::move(clauses));
}

inline cnf_formula parse_dimacs(const std::string& text) {
    std::istringstream in(text);
    return parse_dimacs(in);
}

inline void write_dimacs(std::ostream& out, const cnf_formula& f) {
    out << "p cnf " << f.var_count() << ' ' << f.clause_count() << '\n';
    for (const auto& c : f.clauses()) {
        for (const auto& lit : c) {
            out << lit.dimacs() << ' ';
        }
        out << "0\n";
    }
}

inline std::string write_dimacs(const cnf_formula& f) {
    std::ostringstream out;
    write_dimacs(out, f);
    return out.str();
}

/// Assignment text: whitespace-separated signed DIMACS literals, optionally on
/// "v"-prefixed lines, optionally 0-terminated. Unmentioned variables are false.
inline assignment parse_assignment(std::istream& in, std::size_t var_count) {
    assignment a{std::vector<bool>(var_count, false)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto toks = detail::split_ws(line);
        if (toks.empty() || toks[0] == "c" || toks[0] == "s") {
            continue;
        }
        std::size_t start = toks[0] == "v" ? 1 : 0;
        for (std::size_t i = start; i < toks.size(); ++i) {
            const auto code = detail::parse_int(toks[i], line_no);
            if (code == 0) {
                continue;
            }
            const auto lit = literal::from_dimacs(code);
            if (lit.var >= var_count) {
                throw parse_error(line_no, "assignment literal " + toks[i] + " out of range");
            }
            a.values[lit.var] = lit.positive;
        }
    }
    return a;
}

inline void write_assignment(std::ostream& out, const assignment& a) {
    out << 'v';
    for (std::size_t v = 0; v < a.values.size(); ++v) {
        out << ' ' << (a.values[v] ? std::int64_t(v) + 1 : -(std::int64_t(v) + 1));
    }
    out << " 0\n";
}

// ---------------------------------------------------------------------------
// Brute-force satisfiability

struct sat_result {
    bool satisfiable = false;
    std::optional<assignment> witness;
};

inline constexpr std::size_t default_sat_var_limit = 24;

/// Exhaustive check over all 2^n assignments, in increasing binary order with
/// variable i as bit i. Returns the first satisfying assignment found.
inline sat_result sat_oracle(const cnf_formula& f, std::size_t var_limit = default_sat_var_limit) {
    const std::size_t n = f.var_count();
    if (n > var_limit) {
        throw refusal_error("sat_oracle: " + std::to_string(n) + " variables exceed the limit of " +
                            std::to_string(var_limit));
    }
    if (n > 62) {
        throw refusal_error("sat_oracle: more than 62 variables cannot be enumerated");
    }
    struct masks {
        std::uint64_t pos = 0;
        std::uint64_t neg = 0;
    };
    std::vector<masks> cm;
    cm.reserve(f.clause_count());
    for (const auto& c : f.clauses()) {
        masks m;
        for (const auto& lit : c) {
            (lit.positive ? m.pos : m.neg) |= std::uint64_t(1) << lit.var;
        }
        cm.push_back(m);
    }
    const std::uint64_t total = std::uint64_t(1) << n;
    for (std::uint64_t bits = 0; bits < total; ++bits) {
        bool ok = true;
        for (const auto& m : cm) {
            if ((bits & m.pos) == 0 && (~bits & m.neg) == 0) {
                ok = false;
                break;
            }
        }
        if (ok) {
            assignment a{std::vector<bool>(n)};
            for (std::size_t v = 0; v < n; ++v) {
                a.values[v] = (bits >> v) & 1;
            }
            return {true, std::move(a)};
        }
    }
    return {false, std::nullopt};
}

// ---------------------------------------------------------------------------
// (3,4)-form: every clause has exactly three distinct variables and every
// variable occurs in at most four clauses.

inline constexpr std::size_t max_occurrences_34 = 4;

struct validation_issue {
    enum class kind { duplicate_variable, wrong_width, too_many_occurrences };
    kind what;
    std::size_t index;  // clause index, or variable index for too_many_occurrences
    std::size_t value;  // width or occurrence count

    friend bool operator==(const validation_issue&, const validation_issue&) = default;
};

inline std::string describe(const validation_issue& issue) {
    switch (issue.what) {
    case validation_issue::kind::duplicate_variable:
        return "clause " + std::to_string(issue.index) + " repeats a variable";
    case validation_issue::kind::wrong_width:
        return "clause " + std::to_string(issue.index) + " has width " + std::to_string(issue.value);
    case validation_issue::kind::too_many_occurrences:
        return "variable " + std::to_string(issue.index + 1) + " occurs in " +
               std::to_string(issue.value) + " clauses";
    }
    return {};
}

inline std::vector<validation_issue> validate_34(const cnf_formula& f) {
    std::vector<validation_issue> report;
    for (std::size_t i = 0; i < f.clause_count(); ++i) {
        const auto& c = f[i];
        std::vector<variable> vars;
        for (const auto& lit : c) {
            vars.push_back(lit.var);
        }
        std::sort(vars.begin(), vars.end());
        const bool dup = std::adjacent_find(vars.begin(), vars.end()) != vars.end();
        if (dup) {
            report.push_back({validation_issue::kind::duplicate_variable, i, c.size()});
        }
        if (c.size() != 3) {
            report.push_back({validation_issue::kind::wrong_width, i, c.size()});
        }
    }
    const auto occ = f.occurrence_counts();
    for (std::size_t v = 0; v < occ.size(); ++v) {
        if (occ[v] > max_occurrences_34) {
            report.push_back({validation_issue::kind::too_many_occurrences, v, occ[v]});
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Normalization into (3,4)-form

/// Bound on |clauses(transform_to_34(f))| / max(1, |clauses(f)|).
inline constexpr std::size_t transform_34_size_factor = 28;

namespace detail {

/// Clauses of a satisfiable formula whose anchor (variable 0) is false in every
/// model while occurring only twice, leaving two free occurrences. The other six
/// variables occur at most four times; all-false satisfies it. Entries are
/// DIMACS-style codes over local variables 1..7 (1 = anchor).
inline constexpr int forcing_gadget[8][3] = {
    {-2, -5, -7}, {-2, 5, -7}, {-2, 6, 7}, {-3, -4, -5},
    {-3, -4, 5},  {-3, 4, -6}, {-1, 2, 6}, {-1, 3, -6},
};
inline constexpr std::size_t forcing_gadget_vars = 7;
inline constexpr std::size_t forcing_gadget_spare = 2;

/// Hands out positive literals that every model of the output sets false.
class padding_pool {
public:
    padding_pool(std::size_t& next_var, std::vector<clause>& sink) : next_var_(next_var), sink_(sink) {}

    /// A forced-false literal whose variable is not in `avoid`.
    literal take(const std::vector<variable>& avoid) {
        for (auto& slot : slots_) {
            if (slot.second > 0 && std::find(avoid.begin(), avoid.end(), slot.first) == avoid.end()) {
                --slot.second;
                return {slot.first, true};
            }
        }
        const variable anchor = add_gadget();
        --slots_.back().second;
        return {anchor, true};
    }

    variable add_gadget() {
        const variable base = variable(next_var_);
        next_var_ += forcing_gadget_vars;
        for (const auto& row : forcing_gadget) {
            clause c;
            for (int code : row) {
                const variable v = base + variable((code > 0 ? code : -code) - 1);
                c.push_back({v, code > 0});
            }
            sink_.push_back(std::move(c));
        }
        slots_.emplace_back(base, forcing_gadget_spare);
        return base;
    }

private:
    std::size_t& next_var_;
    std::vector<clause>& sink_;
    std::vector<std::pair<variable, std::size_t>> slots_;
};

} // namespace detail

/// Merges duplicate literals and drops tautological clauses, keeping order.
inline cnf_formula simplify_clauses(const cnf_formula& f) {
    std::vector<clause> out;
    for (const auto& c : f.clauses()) {
        clause merged;
        bool tautology = false;
        for (const auto& lit : c) {
            if (std::find(merged.begin(), merged.end(), lit) != merged.end()) {
                continue;
            }
            if (std::find(merged.begin(), merged.end(), lit.negated()) != merged.end()) {
                tautology = true;
                break;
            }
            merged.push_back(lit);
        }
        if (!tautology) {
            out.push_back(std::move(merged));
        }
    }
    return cnf_formula(f.var_count(), std::move(out));
}

/// Output of normalize_34 with the source of every output variable.
struct normalization {
    cnf_formula formula;
    /// Input variable an output variable copies; empty for padding variables.
    std::vector<std::optional<variable>> origin;

    /// Model of the output built from a model of the input: copies take their
    /// variable's value, padding variables are false.
    assignment lift(const assignment& a) const {
        assignment out{std::vector<bool>(formula.var_count(), false)};
        for (std::size_t v = 0; v < origin.size(); ++v) {
            if (origin[v]) {
                out.values[v] = a.values.at(*origin[v]);
            }
        }
        return out;
    }

    /// Restriction of an output model to the input variables.
    assignment project(const assignment& a, std::size_t input_vars) const {
        return {std::vector<bool>(a.values.begin(), a.values.begin() + std::ptrdiff_t(input_vars))};
    }
};

/// Equisatisfiable (3,4)-form of a formula with clauses of width <= 3.
///
/// Inputs already in (3,4)-form come back unchanged. Otherwise: duplicate
/// literals are merged and tautologies dropped; each variable occurring in more
/// than four clauses is split into one copy per occurrence (copy 1 keeps the
/// original index) linked by the implication cycle c1 -> c2 -> ... -> c1; every
/// clause shorter than three is padded with forced-false literals drawn from
/// forcing gadgets. Original variable indices are preserved, new ones are
/// appended. An input with an empty clause yields a fixed unsatisfiable formula.
inline normalization normalize_34(const cnf_formula& input) {
    for (std::size_t i = 0; i < input.clause_count(); ++i) {
        if (input[i].size() > 3) {
            throw contract_error("transform_to_34: clause " + std::to_string(i) + " has width " +
                                 std::to_string(input[i].size()) + " > 3");
        }
    }
    if (validate_34(input).empty()) {
        normalization same{input, {}};
        for (variable v = 0; v < input.var_count(); ++v) {
            same.origin.push_back(v);
        }
        return same;
    }
    const cnf_formula f = simplify_clauses(input);

    std::size_t next_var = f.var_count();
    std::vector<clause> gadget_clauses;
    detail::padding_pool pool(next_var, gadget_clauses);

    const bool has_empty = std::any_of(f.clauses().begin(), f.clauses().end(),
                                       [](const clause& c) { return c.empty(); });
    if (has_empty) {
        clause contradiction;
        for (int i = 0; i < 3; ++i) {
            contradiction.push_back({pool.add_gadget(), true});
        }
        gadget_clauses.push_back(std::move(contradiction));
        return {cnf_formula(next_var, std::move(gadget_clauses)), std::vector<std::optional<variable>>(next_var)};
    }

    // Rename occurrences of overused variables to per-occurrence copies.
    const auto occ = f.occurrence_counts();
    std::vector<std::vector<variable>> copies(f.var_count());
    std::vector<std::size_t> used(f.var_count(), 0);
    for (variable v = 0; v < f.var_count(); ++v) {
        if (occ[v] > max_occurrences_34) {
            copies[v].push_back(v);
            for (std::size_t i = 1; i < occ[v]; ++i) {
                copies[v].push_back(variable(next_var++));
            }
        }
    }
    std::vector<clause> body;
    for (const auto& c : f.clauses()) {
        clause renamed;
        for (const auto& lit : c) {
            if (copies[lit.var].empty()) {
                renamed.push_back(lit);
            } else {
                renamed.push_back({copies[lit.var][used[lit.var]++], lit.positive});
            }
        }
        body.push_back(std::move(renamed));
    }
    for (variable v = 0; v < f.var_count(); ++v) {
        const auto& cs = copies[v];
        for (std::size_t i = 0; i < cs.size(); ++i) {
            body.push_back({{cs[i], false}, {cs[(i + 1) % cs.size()], true}});
        }
    }

    std::vector<clause> out;
    out.reserve(body.size());
    for (auto& c : body) {
        while (c.size() < 3) {
            std::vector<variable> avoid;
            for (const auto& lit : c) {
                avoid.push_back(lit.var);
            }
            c.push_back(pool.take(avoid));
        }
        out.push_back(std::move(c));
    }
    out.insert(out.end(), gadget_clauses.begin(), gadget_clauses.end());
    std::vector<std::optional<variable>> origin(next_var);
    for (variable v = 0; v < f.var_count(); ++v) {
        origin[v] = v;
        for (auto c : copies[v]) {
            origin[c] = v;
        }
    }
    return {cnf_formula(next_var, std::move(out)), std::move(origin)};
}

inline cnf_formula transform_to_34(const cnf_formula& input) {
    return normalize_34(input).formula;
}

} // namespace subiso
