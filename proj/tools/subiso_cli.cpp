#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "subiso/corpus.hpp"
#include "subiso/decolor.hpp"
#include "subiso/formula.hpp"
#include "subiso/grouping.hpp"
#include "subiso/hom2si.hpp"
#include "subiso/pipeline.hpp"
#include "subiso/sat2si.hpp"
#include "subiso/solve.hpp"

namespace fs = std::filesystem;
using namespace subiso;

namespace {

constexpr int exit_yes = 0, exit_no = 1, exit_error = 2, exit_inconclusive = 3;

struct globals {
    std::uint64_t seed = 1;
    std::string cap = "1000000";
    std::uint64_t budget = default_node_budget;
    std::string out;
    std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
};

big_count parse_cap(const std::string& text) {
    if (text.empty() || !std::all_of(text.begin(), text.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
        throw contract_error("--cap expects a non-negative integer, got '" + text + "'");
    }
    return big_count(text);
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    return in;
}

cnf_formula read_formula(const std::string& path) {
    auto in = open_in(path);
    return parse_dimacs(in);
}

si_instance read_instance(const std::string& path) {
    auto in = open_in(path);
    return parse_instance(in);
}

colored_multigraph read_graph(const std::string& path) {
    auto in = open_in(path);
    return parse_cgf(in);
}

// Writes to --out when given, otherwise stdout.
template <class Fn>
void emit(const globals& g, Fn&& write) {
    if (g.out.empty()) {
        write(std::cout);
        return;
    }
    if (fs::path(g.out).has_parent_path()) {
        fs::create_directories(fs::path(g.out).parent_path());
    }
    std::ofstream out(g.out);
    if (!out) {
        throw std::runtime_error("cannot write " + g.out);
    }
    write(out);
}

fs::path require_out_dir(const globals& g, const char* who) {
    if (g.out.empty()) {
        throw contract_error(std::string(who) + " needs --out <dir>");
    }
    fs::create_directories(g.out);
    return fs::path(g.out);
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
}

// "auto" selects the auto regime; a number runs greedy colouring with that many colours.
grouping choose_grouping(const cnf_formula& f, const std::string& k) {
    if (k == "auto") {
        return auto_grouping(f);
    }
    std::size_t value = 0;
    try {
        std::size_t used = 0;
        value = std::stoul(k, &used);
        if (used != k.size()) {
            throw std::invalid_argument(k);
        }
    } catch (const std::logic_error&) {
        throw contract_error("--k expects an integer or 'auto', got '" + k + "'");
    }
    return test_grouping(f, value);
}

std::string with_index(const std::string& stem, const big_count& index, const std::string& ext) {
    return stem + "_" + index.str() + ext;
}

std::vector<std::string> expand_inputs(const std::vector<std::string>& inputs, const std::string& ext) {
    std::vector<std::string> out;
    for (const auto& p : inputs) {
        if (fs::is_directory(p)) {
            std::vector<std::string> found;
            for (const auto& entry : fs::recursive_directory_iterator(p)) {
                if (entry.is_regular_file() && entry.path().extension() == ext) {
                    found.push_back(entry.path().string());
                }
            }
            std::sort(found.begin(), found.end());
            out.insert(out.end(), found.begin(), found.end());
        } else {
            out.push_back(p);
        }
    }
    return out;
}

int run_transform(const globals& g, const std::string& input) {
    const auto f = transform_to_34(read_formula(input));
    emit(g, [&](std::ostream& out) { write_dimacs(out, f); });
    return 0;
}

int run_color(const globals& g, const std::string& input, const std::string& k) {
    const auto gr = choose_grouping(read_formula(input), k);
    emit(g, [&](std::ostream& out) { write_coloring(out, gr.coloring); });
    return 0;
}

int run_pack(const globals& g, const std::string& input, const std::string& k) {
    const auto gr = choose_grouping(read_formula(input), k);
    emit(g, [&](std::ostream& out) { write_packing(out, gr.packing); });
    return 0;
}

struct reduce_flags {
    std::string input;
    std::string k = "auto";
    bool enumerate = false;
    bool force = false;
    std::string witness;
    bool emit_maps = false;
};

int run_reduce(const globals& g, const reduce_flags& r) {
    const auto dir = require_out_dir(g, "reduce");
    const auto f = read_formula(r.input);
    const auto gr = choose_grouping(f, r.k);
    const auto pattern = build_pattern(f, gr.coloring, gr.packing, gr.k);
    write_file(dir / "pattern.cgf", write_cgf(pattern));
    std::cout << "k " << gr.k << ", pattern " << pattern.vertex_count() << " vertices, " << pattern.edge_count()
              << " edges, " << format_count(sequence_count(gr.k)) << " host sequences\n";
    if (r.emit_maps) {
        std::ostringstream col, pack;
        write_coloring(col, gr.coloring);
        write_packing(pack, gr.packing);
        write_file(dir / "coloring.txt", col.str());
        write_file(dir / "packing.txt", pack.str());
    }
    if (!r.witness.empty()) {
        auto in = open_in(r.witness);
        const auto a = parse_assignment(in, f.var_count());
        const auto w = witness_sequence_and_embedding(f, gr.coloring, gr.packing, gr.k, a);
        const auto index = composition_rank(w.sequence);
        // Indices at full-scale k have over a thousand digits; too long for a file name.
        const auto digits = index.str();
        const auto name = digits.size() <= 200 ? with_index("host", index, ".cgf") : std::string("host_witness.cgf");
        write_file(dir / name, write_cgf(build_host(gr.k, w.sequence)));
        write_file(dir / "witness_sequence.txt", digits + "\n");
        std::ostringstream emb;
        write_embedding(emb, w.map);
        write_file(dir / "witness.map", emb.str());
        std::cout << "witness host " << name << " (sequence " << format_count(index)
                  << "), embedding in witness.map\n";
    }
    if (r.enumerate) {
        auto stream = enumerate_sequences(gr.k, parse_cap(g.cap), r.force);
        std::uint64_t written = 0;
        while (auto s = stream.next()) {
            write_file(dir / with_index("host", stream.index(), ".cgf"), write_cgf(build_host(gr.k, *s)));
            ++written;
        }
        std::cout << written << " hosts written\n";
    }
    return 0;
}

int run_decolor(const globals& g, const std::string& input, const std::string& stage) {
    const auto inst = read_instance(input);
    si_instance out;
    if (stage == "edges") {
        out = remove_edge_colors(inst);
    } else if (stage == "vertices") {
        out = remove_vertex_colors(inst);
    } else {
        out = decolor_pipeline(inst);
    }
    emit(g, [&](std::ostream& os) { write_instance(os, out); });
    return 0;
}

int run_hom2si(const globals& g, const std::string& gfile, const std::string& hfile, bool solve, bool force) {
    auto stream = hom_to_si(read_graph(gfile), read_graph(hfile), parse_cap(g.cap), force);
    if (!solve) {
        const auto dir = require_out_dir(g, "hom2si");
        std::uint64_t i = 0;
        while (auto inst = stream.next()) {
            write_file(dir / with_index("instance", i++, ".si"), write_instance(*inst));
        }
        std::cout << i << " instances written\n";
        return 0;
    }
    const colored_multigraph pattern = stream.pattern();
    const colored_multigraph target = stream.target();
    const std::function<std::optional<std::vector<std::uint64_t>>()> next = [&] {
        return stream.next_composition();
    };
    const std::function<colored_multigraph(const std::vector<std::uint64_t>&)> make =
        [&](const std::vector<std::uint64_t>& a) { return replicate_host(target, a); };
    const auto r = si_family_solve<std::vector<std::uint64_t>>(pattern, next, make, {g.budget, g.threads});
    std::cout << to_string(r.status);
    if (r.witness_index) {
        std::cout << " (composition " << *r.witness_index << ")";
    }
    std::cout << '\n';
    return r.status == verdict::yes ? exit_yes : r.status == verdict::no ? exit_no : exit_inconclusive;
}

int run_solve(const globals& g, const std::vector<std::string>& inputs) {
    const auto files = expand_inputs(inputs, ".si");
    if (!g.out.empty() && files.size() != 1) {
        throw contract_error("solve --out writes one embedding; give exactly one instance");
    }
    bool any_no = false, any_inconclusive = false;
    for (const auto& path : files) {
        const auto r = si_solve(read_instance(path), g.budget);
        std::cout << path << ": " << to_string(r.status) << " (" << r.nodes << " nodes)\n";
        any_no = any_no || r.status == verdict::no;
        any_inconclusive = any_inconclusive || r.status == verdict::inconclusive;
        if (r.witness && !g.out.empty()) {
            emit(g, [&](std::ostream& out) { write_embedding(out, *r.witness); });
        }
    }
    return any_inconclusive ? exit_inconclusive : any_no ? exit_no : exit_yes;
}

int run_verify(const std::string& instance_file, const std::string& embedding_file) {
    const auto inst = read_instance(instance_file);
    auto in = open_in(embedding_file);
    const auto e = parse_embedding(in, inst.pattern.vertex_count());
    const auto report = verify_embedding(inst.pattern, inst.host, e);
    if (report.ok()) {
        std::cout << "OK\n";
        return 0;
    }
    for (const auto& v : report.violations) {
        std::cout << "violation: " << v << '\n';
    }
    return 1;
}

struct pipeline_flags {
    std::vector<std::string> inputs;
    std::string mode = "test";
    std::optional<std::size_t> k;
    std::string witness;
    bool force = false;
};

int run_verify_pipeline(const globals& g, const pipeline_flags& p) {
    pipeline_options opt;
    opt.mode = p.mode == "paper" ? pipeline_mode::paper : pipeline_mode::test;
    opt.k = p.k;
    opt.cap = parse_cap(g.cap);
    opt.force = p.force;
    opt.node_budget = g.budget;
    opt.threads = g.threads;
    const auto files = expand_inputs(p.inputs, ".cnf");
    if (!p.witness.empty() && files.size() != 1) {
        throw contract_error("--witness applies to a single formula");
    }
    std::ostringstream all;
    std::size_t agreed = 0;
    for (const auto& path : files) {
        const auto f = read_formula(path);
        // An explicit --witness wins; otherwise a sibling <stem>.sol is used if present.
        auto sol = fs::path(path).replace_extension(".sol");
        opt.witness.reset();
        if (!p.witness.empty() || fs::exists(sol)) {
            auto in = open_in(p.witness.empty() ? sol.string() : p.witness);
            opt.witness = parse_assignment(in, f.var_count());
        }
        const auto r = verify_pipeline(f, opt);
        std::ostringstream one;
        one << "file: " << path << '\n';
        write_report(one, r);
        std::cout << one.str() << '\n';
        all << one.str() << '\n';
        agreed += r.agreement;
    }
    std::cout << "summary: " << agreed << "/" << files.size() << " agree\n";
    if (!g.out.empty()) {
        emit(g, [&](std::ostream& out) { out << all.str() << "summary: " << agreed << "/" << files.size() << " agree\n"; });
    }
    return agreed == files.size() ? 0 : 1;
}

int run_gen_corpus(const globals& g, const std::string& profile) {
    const auto dir = require_out_dir(g, "gen-corpus");
    std::vector<std::string> profiles;
    if (profile == "all") {
        profiles = corpus_profiles();
    } else {
        profiles.push_back(profile);
    }
    for (const auto& name : profiles) {
        const auto target = profile == "all" ? dir / name : dir;
        const auto files = gen_corpus(g.seed, name, target);
        std::cout << name << ": " << files.size() << " files in " << target.string() << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"subiso: reductions between SAT, coloured and plain subgraph isomorphism, and homomorphism"};
    app.require_subcommand(1);
    app.fallthrough();
    globals g;
    app.add_option("--seed", g.seed, "Seed for generated corpora")->capture_default_str();
    app.add_option("--cap", g.cap, "Largest family (host sequences, compositions) to enumerate")
        ->capture_default_str();
    app.add_option("--budget", g.budget, "Search-node budget per SI instance")->capture_default_str();
    app.add_option("--out", g.out, "Output file or directory");
    app.add_option("--threads", g.threads, "Worker threads for family searches")->capture_default_str();

    std::string input, k = "auto";
    int code = 0;

    auto* transform = app.add_subcommand("transform", "Rewrite a CNF formula into (3,4)-form");
    transform->add_option("formula", input, "DIMACS file")->required();
    transform->callback([&] { code = run_transform(g, input); });

    auto* color = app.add_subcommand("color", "Colour the variables of a formula");
    color->add_option("formula", input, "DIMACS file")->required();
    color->add_option("--k", k, "Number of colours, or 'auto' for the auto regime")->capture_default_str();
    color->callback([&] { code = run_color(g, input, k); });

    auto* pack = app.add_subcommand("pack", "Pack the clauses of a formula into groups");
    pack->add_option("formula", input, "DIMACS file")->required();
    pack->add_option("--k", k, "Number of colours, or 'auto' for the auto regime")->capture_default_str();
    pack->callback([&] { code = run_pack(g, input, k); });

    reduce_flags rf;
    auto* reduce = app.add_subcommand("reduce", "Build the coloured SI pattern and hosts for a formula");
    reduce->add_option("formula", rf.input, "DIMACS file in (3,4)-form")->required();
    reduce->add_option("--k", rf.k, "Number of colours, or 'auto'")->capture_default_str();
    reduce->add_flag("--enumerate", rf.enumerate, "Write every host of the family");
    reduce->add_flag("--force", rf.force, "Enumerate past --cap");
    reduce->add_option("--witness", rf.witness, "Assignment file; writes the matching host and embedding");
    reduce->add_flag("--emit-maps", rf.emit_maps, "Write coloring.txt and packing.txt");
    reduce->callback([&] { code = run_reduce(g, rf); });

    std::string stage = "all";
    auto* decolor = app.add_subcommand("decolor", "Remove edge and/or vertex colours from an SI instance");
    decolor->add_option("instance", input, "SI instance file")->required();
    decolor->add_option("--stage", stage, "edges, vertices or all")
        ->check(CLI::IsMember({"edges", "vertices", "all"}))
        ->capture_default_str();
    decolor->callback([&] { code = run_decolor(g, input, stage); });

    std::string gfile, hfile;
    bool hom_solve = false, hom_force = false;
    auto* hom = app.add_subcommand("hom2si", "Reduce graph homomorphism to a family of SI instances");
    hom->add_option("pattern", gfile, "CGF file for G")->required();
    hom->add_option("target", hfile, "CGF file for H")->required();
    hom->add_flag("--solve", hom_solve, "Decide the family instead of writing it");
    hom->add_flag("--force", hom_force, "Enumerate past --cap");
    hom->callback([&] { code = run_hom2si(g, gfile, hfile, hom_solve, hom_force); });

    std::vector<std::string> solve_inputs;
    auto* solve = app.add_subcommand("solve", "Decide SI instances (exit 0 YES, 1 NO, 3 inconclusive)");
    solve->add_option("instances", solve_inputs, "SI instance files or directories")->required();
    solve->callback([&] { code = run_solve(g, solve_inputs); });

    std::string emb_file;
    auto* verify = app.add_subcommand("verify", "Check an embedding file against an SI instance");
    verify->add_option("instance", input, "SI instance file")->required();
    verify->add_option("embedding", emb_file, "File of 'map <pattern> <host>' lines")->required();
    verify->callback([&] { code = run_verify(input, emb_file); });

    pipeline_flags pf;
    auto* vp = app.add_subcommand("verify-pipeline", "Check the SAT to SI chain end to end");
    vp->add_option("formulas", pf.inputs, "DIMACS files or directories")->required();
    vp->add_option("--mode", pf.mode, "test or paper")->check(CLI::IsMember({"test", "paper"}))->capture_default_str();
    vp->add_option("--k", pf.k, "Colours in test mode (default 3)");
    vp->add_option("--witness", pf.witness,
                   "Satisfying assignment for formulas beyond the SAT oracle (default: <formula>.sol if present)");
    vp->add_flag("--force", pf.force, "Enumerate past --cap");
    vp->callback([&] { code = run_verify_pipeline(g, pf); });

    std::string profile;
    auto* gen = app.add_subcommand("gen-corpus", "Write a deterministic corpus");
    gen->add_option("--profile", profile, "Profile name or 'all'")->required();
    gen->callback([&] { code = run_gen_corpus(g, profile); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_error;
    } catch (const parse_error& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return exit_error;
    } catch (const refusal_error& e) {
        std::cerr << "refused: " << e.what() << '\n';
        return exit_error;
    } catch (const construction_error& e) {
        std::cerr << "construction failed: " << e.what() << '\n';
        return exit_error;
    } catch (const contract_error& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return exit_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_error;
    }
    return code;
}
