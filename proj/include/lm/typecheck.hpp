#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lm/ast.hpp"
#include "lm/database.hpp"
#include "lm/diagnostics.hpp"

namespace lm {

// A checked program: constants resolved to values, ground axioms evaluated,
// per-rule variable typings recorded.
struct CheckedProgram {
    Program program;
    std::map<std::string, Value> consts;
    std::vector<Fact> ground_axioms;
    // Per rule: every variable (rule body, comprehension, aggregate, exists)
    // mapped to its type.
    std::vector<std::map<std::string, TypeExpr>> rule_vars;

    const PredicateDecl* predicate(const std::string& name) const {
        return program.find_predicate(name);
    }
};

struct CheckResult {
    std::optional<CheckedProgram> checked;  // present iff errors is empty
    std::vector<Diagnostic> errors;
    bool ok() const { return errors.empty(); }
};

// Full program check: predicate resolution, arity and argument types,
// constraint typing, head-variable boundness, the locality restriction,
// constant resolution and axiom groundness. Checking twice yields identical
// error lists.
CheckResult check_program(const Program& p, const std::map<std::string, Value>& cli_consts);

// Locality restriction for a single rule: every body fact template (including
// selector, comprehension and aggregate bodies) shares one home variable as
// first argument. Returns the offending template's rendering, or nullopt.
std::optional<std::string> check_locality(const RuleAst& rule);

// Parses a CLI constant literal: @N, integer, float, true/false or a string.
std::optional<Value> parse_const_literal(const std::string& text);

}  // namespace lm
