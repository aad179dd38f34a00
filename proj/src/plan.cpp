#include "lm/plan.hpp"

#include "lm/eval.hpp"
#include "lm/printer.hpp"

namespace lm {

namespace {

bool vars_subset(const Expr& e, const std::set<std::string>& bound) {
    std::vector<std::string> vars;
    collect_vars(e, vars);
    for (const auto& v : vars)
        if (!bound.count(v)) return false;
    return true;
}

// A lone unbound variable on one side of '=' makes the constraint a binding.
const Expr* binding_candidate(const Expr& c, const std::set<std::string>& bound,
                              const Expr** rhs_out) {
    if (c.kind != Expr::Kind::Binary || c.binop != BinOp::Eq) return nullptr;
    const Expr& lhs = *c.operands[0];
    const Expr& rhs = *c.operands[1];
    if (lhs.kind == Expr::Kind::Var && !bound.count(lhs.name) && vars_subset(rhs, bound)) {
        *rhs_out = &rhs;
        return &lhs;
    }
    if (rhs.kind == Expr::Kind::Var && !bound.count(rhs.name) && vars_subset(lhs, bound)) {
        *rhs_out = &lhs;
        return &rhs;
    }
    return nullptr;
}

}  // namespace

void pattern_binding_vars(const Expr& e, std::vector<std::string>& out) {
    switch (e.kind) {
        case Expr::Kind::Var:
            out.push_back(e.name);
            return;
        case Expr::Kind::ListExpr:
            for (const auto& elem : e.operands) pattern_binding_vars(*elem, out);
            if (e.tail) pattern_binding_vars(*e.tail, out);
            return;
        default:
            return;  // computed position, binds nothing
    }
}

bool compile_body_plan(const Body& body, std::set<std::string>& bound, BodyPlan& plan,
                       std::vector<Diagnostic>& errors) {
    std::vector<const Expr*> pending;

    auto flush_pending = [&] {
        bool progress = true;
        while (progress) {
            progress = false;
            for (auto it = pending.begin(); it != pending.end();) {
                const Expr* rhs = nullptr;
                if (const Expr* var = binding_candidate(**it, bound, &rhs)) {
                    plan.steps.push_back({PlanStep::Kind::Bind, nullptr, rhs, var->name});
                    bound.insert(var->name);
                    it = pending.erase(it);
                    progress = true;
                } else if (vars_subset(**it, bound)) {
                    plan.steps.push_back({PlanStep::Kind::Constraint, nullptr, *it, {}});
                    it = pending.erase(it);
                    progress = true;
                } else {
                    ++it;
                }
            }
        }
    };

    size_t initial_errors = errors.size();
    for (const auto& item : body) {
        if (!item.is_fact()) {
            pending.push_back(item.constraint().get());
            flush_pending();
            continue;
        }
        const FactTemplate& tmpl = item.fact();
        // Args bind left to right; computed positions need their variables
        // bound by earlier templates or earlier args of this template.
        std::set<std::string> after = bound;
        for (const auto& arg : tmpl.args) {
            std::vector<std::string> binds;
            pattern_binding_vars(*arg, binds);
            std::vector<std::string> all_vars;
            collect_vars(*arg, all_vars);
            for (const auto& v : all_vars) {
                bool is_binding = false;
                for (const auto& bv : binds) is_binding |= (bv == v);
                if (!is_binding && !after.count(v)) {
                    errors.push_back({arg->loc, "UnboundVariable",
                                      "variable " + v + " in computed argument of " +
                                          tmpl.predicate + " is not bound yet"});
                }
            }
            for (const auto& v : binds) after.insert(v);
        }
        bound = std::move(after);
        plan.steps.push_back({PlanStep::Kind::Match, &tmpl, nullptr, {}});
        flush_pending();
    }
    flush_pending();
    for (const Expr* c : pending) {
        errors.push_back({c->loc, "UnboundVariable",
                          "constraint " + print_expr(*c) + " has variables no template binds"});
    }
    return errors.size() == initial_errors;
}

}  // namespace lm
