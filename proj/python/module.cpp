#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lm/gen.hpp"
#include "lm/parser.hpp"
#include "lm/printer.hpp"
#include "lm/runtime.hpp"
#include "lm/typecheck.hpp"

namespace py = pybind11;
using namespace lm;

namespace {

std::map<std::string, Value> convert_consts(const std::map<std::string, std::string>& consts) {
    std::map<std::string, Value> out;
    for (const auto& [k, v] : consts) {
        auto parsed = parse_const_literal(v);
        if (!parsed) throw py::value_error("cannot parse constant " + k + "=" + v);
        out[k] = *parsed;
    }
    return out;
}

CheckedProgram checked_or_throw(const std::string& source,
                                const std::map<std::string, std::string>& consts) {
    Program prog;
    try {
        prog = parse_source(source);
    } catch (const ParseError& e) {
        throw py::value_error(e.diagnostic.render());
    }
    auto res = check_program(prog, convert_consts(consts));
    if (!res.ok()) throw py::value_error(res.errors[0].render());
    return std::move(*res.checked);
}

}  // namespace

PYBIND11_MODULE(_lm, m) {
    m.doc() = "linear-logic rule language over graphs";

    m.def(
        "check",
        [](const std::string& source, const std::map<std::string, std::string>& consts) {
            std::vector<std::string> rendered;
            try {
                auto res = check_program(parse_source(source), convert_consts(consts));
                for (const auto& d : res.errors) rendered.push_back(d.render());
            } catch (const ParseError& e) {
                rendered.push_back(e.diagnostic.render());
            }
            return rendered;
        },
        py::arg("source"), py::arg("consts") = std::map<std::string, std::string>{},
        "Parse and type-check; returns a list of diagnostics (empty = ok).");

    m.def(
        "dump_ast",
        [](const std::string& source) {
            try {
                return dump_ast(parse_source(source));
            } catch (const ParseError& e) {
                throw py::value_error(e.diagnostic.render());
            }
        },
        py::arg("source"), "Canonical s-expression rendering of the parsed program.");

    m.def(
        "run",
        [](const std::string& source, const std::map<std::string, std::string>& consts,
           int workers, uint64_t seed, uint64_t max_steps, bool trace, bool audit) {
            CheckedProgram prog = checked_or_throw(source, consts);
            auto g = load(prog);
            RunOptions opts;
            opts.workers = workers;
            opts.seed = seed;
            opts.max_steps = max_steps;
            opts.trace = trace;
            opts.audit = audit;
            RunStats stats;
            {
                py::gil_scoped_release release;
                stats = run_to_quiescence(*g, prog, opts);
            }
            py::dict out;
            out["quiesced"] = stats.quiesced;
            out["firings"] = stats.firings;
            out["audit_violations"] = stats.audit_violations;
            out["db"] = g->dump_db();
            out["trace"] = stats.trace_lines;
            return out;
        },
        py::arg("source"), py::arg("consts") = std::map<std::string, std::string>{},
        py::arg("workers") = 1, py::arg("seed") = 0, py::arg("max_steps") = 0,
        py::arg("trace") = false, py::arg("audit") = false,
        "Run a program to quiescence and return its final databases.");

    m.def("gen_nqueens", &gen::nqueens_board, py::arg("size"));
    m.def("gen_pagerank_ring", &gen::pagerank_ring, py::arg("size"));
}
