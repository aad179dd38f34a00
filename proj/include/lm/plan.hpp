#pragma once

#include <set>
#include <string>
#include <vector>

#include "lm/ast.hpp"
#include "lm/diagnostics.hpp"

namespace lm {

// A body compiled into an executable match order: templates stay in written
// order; each constraint runs at the earliest point all its variables are
// bound; "V = expr" with an unbound V becomes a binding step.
struct PlanStep {
    enum class Kind { Match, Constraint, Bind };
    Kind kind;
    const FactTemplate* tmpl = nullptr;
    const Expr* expr = nullptr;   // constraint, or bind right-hand side
    std::string bind_var;
};

struct BodyPlan {
    std::vector<PlanStep> steps;
};

// Variables bound by matching this pattern expression (structural positions
// only; variables inside computed sub-expressions must be bound beforehand).
void pattern_binding_vars(const Expr& e, std::vector<std::string>& out);

// Compiles a body. `bound` is updated with every variable the body binds.
// Reports UnboundVariable for computed template arguments or constraints
// whose variables no template can bind.
bool compile_body_plan(const Body& body, std::set<std::string>& bound, BodyPlan& plan,
                       std::vector<Diagnostic>& errors);

}  // namespace lm
