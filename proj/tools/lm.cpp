#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "lm/gen.hpp"
#include "lm/hld.hpp"
#include "lm/parser.hpp"
#include "lm/printer.hpp"
#include "lm/runtime.hpp"
#include "lm/typecheck.hpp"

using namespace lm;

namespace {

// Concatenated sources with a table mapping global lines back to files.
struct SourceBundle {
    std::string text;
    std::vector<std::pair<int, std::string>> offsets;  // (first global line, file)

    std::string render(const Diagnostic& d) const {
        std::string file = "<input>";
        int base = 0;
        for (const auto& [line, name] : offsets) {
            if (d.loc.line < line) break;
            base = line - 1;
            file = name;
        }
        Diagnostic local = d;
        local.loc.line -= base;
        return local.render(file);
    }
};

bool read_bundle(const std::vector<std::string>& paths, SourceBundle& out) {
    int line = 1;
    for (const auto& path : paths) {
        std::ifstream in(path);
        if (!in) {
            std::cerr << path << ":0:0: IoError: cannot open file\n";
            return false;
        }
        std::stringstream buf;
        buf << in.rdbuf();
        std::string text = buf.str();
        if (!text.empty() && text.back() != '\n') text += '\n';
        out.offsets.push_back({line, path});
        line += static_cast<int>(std::count(text.begin(), text.end(), '\n'));
        out.text += text;
    }
    return true;
}

bool parse_consts(const std::vector<std::string>& defs, std::map<std::string, Value>& out) {
    for (const auto& def : defs) {
        auto eq = def.find('=');
        if (eq == std::string::npos) {
            std::cerr << "<cli>:0:0: BadConst: expected k=v, got " << def << "\n";
            return false;
        }
        auto v = parse_const_literal(def.substr(eq + 1));
        if (!v) {
            std::cerr << "<cli>:0:0: BadConst: cannot parse value " << def.substr(eq + 1)
                      << "\n";
            return false;
        }
        out[def.substr(0, eq)] = *v;
    }
    return true;
}

// Parses and checks the bundle; prints rendered diagnostics on failure.
std::optional<CheckedProgram> frontend(const SourceBundle& src,
                                       const std::map<std::string, Value>& consts,
                                       Program* ast_out = nullptr) {
    Program prog;
    try {
        prog = parse_source(src.text);
    } catch (const ParseError& e) {
        std::cerr << src.render(e.diagnostic) << "\n";
        return std::nullopt;
    }
    if (ast_out) *ast_out = prog;
    auto res = check_program(prog, consts);
    if (!res.ok()) {
        for (const auto& d : res.errors) std::cerr << src.render(d) << "\n";
        return std::nullopt;
    }
    return std::move(res.checked);
}

int cmd_run(const std::vector<std::string>& files, const std::vector<std::string>& const_defs,
            int workers, uint64_t seed, uint64_t max_steps, bool trace, bool dump_db,
            bool dump_ast_flag, bool audit) {
    SourceBundle src;
    if (!read_bundle(files, src)) return 1;
    std::map<std::string, Value> consts;
    if (!parse_consts(const_defs, consts)) return 1;

    Program ast;
    auto checked = frontend(src, consts, &ast);
    if (!checked) return 1;
    if (dump_ast_flag) {
        std::cout << dump_ast(ast);
        return 0;
    }

    auto g = load(*checked);
    RunOptions opts;
    opts.workers = workers;
    opts.seed = seed;
    opts.max_steps = max_steps;
    opts.trace = trace;
    opts.audit = audit;
    RunStats stats = run_to_quiescence(*g, *checked, opts);

    for (const auto& line : stats.trace_lines) std::cout << line << "\n";
    if (dump_db)
        for (const auto& line : g->dump_db()) std::cout << line << "\n";
    if (audit) {
        std::cout << "audit: " << stats.audit_violations << " violations in "
                  << stats.firings << " firings\n";
        if (stats.audit_violations > 0) return 1;
    }
    return stats.quiesced ? 0 : 2;
}

// One verification attempt: does the engine's firing on this database pass
// soundness, committed choice and purity against the exhaustive oracle?
std::string verify_once(const NodeDatabase& db, const CheckedProgram& prog, uint64_t bound) {
    NodeDatabase work = db;
    auto before = work.dump_lines();
    EngineContext ctx;
    auto counter = std::make_shared<uint64_t>(1000);
    ctx.fresh_node = [counter]() { return NodeId{(*counter)++}; };
    Engine eng(prog, ctx);
    auto lld = eng.run_node(work);
    if (work.dump_lines() != before) return "matching mutated the database";
    if (!lld) {
        for (size_t r = 0; r < prog.program.rules.size(); ++r)
            if (!hld_apply(db, prog, r, bound, 0, 1000).empty())
                return "engine reported quiescence but rule " + std::to_string(r) +
                       " has admissible outcomes";
        return {};
    }
    size_t fired = static_cast<size_t>(lld->rule_index);
    if (!check_soundness(*lld, hld_apply(db, prog, fired, bound, 0, 1000)))
        return "firing of rule " + std::to_string(fired) + " is not an admissible outcome";
    for (size_t r = 0; r < fired; ++r)
        if (!hld_apply(db, prog, r, bound, 0, 1000).empty())
            return "committed choice violated: rule " + std::to_string(r) +
                   " matches but rule " + std::to_string(fired) + " fired";
    return {};
}

int cmd_verify(const std::vector<std::string>& files, uint64_t bound, uint64_t samples,
               uint64_t seed) {
    SourceBundle src;
    if (!read_bundle(files, src)) return 1;
    auto checked = frontend(src, {});
    if (!checked) return 1;

    auto g = load(*checked);
    auto ids = g->node_ids();
    if (ids.empty()) {
        std::cout << "pass: no axioms, nothing to verify\n";
        return 0;
    }
    std::mt19937_64 rng(seed);
    uint64_t skipped = 0;
    for (uint64_t k = 0; k < samples; ++k) {
        uint64_t id = ids[rng() % ids.size()];
        const NodeDatabase& full = g->find(NodeId{id})->db;
        NodeDatabase db(NodeId{id});
        for (const Fact& f : full.all_persistent()) db.assert_fact(f);
        std::vector<Fact> linear = full.all_linear();
        std::shuffle(linear.begin(), linear.end(), rng);
        size_t keep = std::min<size_t>(linear.size(), rng() % (bound + 1));
        for (size_t i = 0; i < keep; ++i) db.assert_fact(linear[i]);

        std::string failure = verify_once(db, *checked, bound);
        if (failure.empty()) continue;

        // minimize: greedily drop linear facts while the failure persists
        std::vector<Fact> kept(linear.begin(), linear.begin() + static_cast<long>(keep));
        for (size_t i = 0; i < kept.size();) {
            NodeDatabase smaller(NodeId{id});
            for (const Fact& f : full.all_persistent()) smaller.assert_fact(f);
            for (size_t j = 0; j < kept.size(); ++j)
                if (j != i) smaller.assert_fact(kept[j]);
            if (!verify_once(smaller, *checked, bound).empty()) {
                kept.erase(kept.begin() + static_cast<long>(i));
                db = smaller;
            } else {
                ++i;
            }
        }
        std::cout << "fail: " << verify_once(db, *checked, bound) << "\n";
        std::cout << "counterexample database (node " << id << "):\n";
        for (const auto& line : db.dump_lines()) std::cout << "  " << line << "\n";
        return 1;
    }
    std::cout << "pass: " << (samples - skipped) << " samples\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lm: linear-logic rule language over graphs"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run a program to quiescence");
    std::vector<std::string> run_files, run_consts;
    int workers = 1;
    uint64_t seed = 0, max_steps = 0;
    bool trace = false, dump_db = false, dump_ast_flag = false, audit = false;
    run->add_option("files", run_files, "program files, concatenated in order")
        ->required()
        ->check(CLI::ExistingFile);
    run->add_option("--workers", workers, "worker threads");
    run->add_option("--seed", seed, "selector randomness seed");
    run->add_option("--const", run_consts, "constant override k=v");
    run->add_option("--max-steps", max_steps, "abort after N rule firings");
    run->add_flag("--trace", trace, "print one line per rule firing");
    run->add_flag("--dump-db", dump_db, "print the final databases");
    run->add_flag("--dump-ast", dump_ast_flag, "print the AST and exit");
    run->add_flag("--audit", audit, "check linearity conservation each step");

    auto* verify = app.add_subcommand("verify", "test engine firings against the oracle");
    std::vector<std::string> verify_files;
    uint64_t bound = 8, samples = 100, vseed = 0;
    verify->add_option("files", verify_files, "program files")
        ->required()
        ->check(CLI::ExistingFile);
    verify->add_option("--bound", bound, "max linear facts per sampled database");
    verify->add_option("--samples", samples, "number of sampled databases");
    verify->add_option("--seed", vseed, "sampling seed");

    auto* gen = app.add_subcommand("gen", "emit generated axiom files");
    std::string kind;
    int size = 4;
    gen->add_option("kind", kind, "nqueens | pagerank-ring")
        ->required()
        ->check(CLI::IsMember({"nqueens", "pagerank-ring"}));
    gen->add_option("--size", size, "board side / page count")->required();

    CLI11_PARSE(app, argc, argv);

    if (run->parsed())
        return cmd_run(run_files, run_consts, workers, seed, max_steps, trace, dump_db,
                       dump_ast_flag, audit);
    if (verify->parsed()) return cmd_verify(verify_files, bound, samples, vseed);
    if (gen->parsed()) {
        std::cout << (kind == "nqueens" ? gen::nqueens_board(size) : gen::pagerank_ring(size));
        return 0;
    }
    return 1;
}
