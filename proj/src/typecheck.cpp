#include "lm/typecheck.hpp"

#include <algorithm>
#include <cctype>

#include "lm/eval.hpp"
#include "lm/plan.hpp"
#include "lm/printer.hpp"

namespace lm {

namespace {

using TypeEnv = std::map<std::string, TypeExpr>;

TypeExpr any_type() { return TypeExpr::simple(TypeExpr::Kind::Any); }

bool types_compatible(const TypeExpr& a, const TypeExpr& b) {
    if (a.kind == TypeExpr::Kind::Any || b.kind == TypeExpr::Kind::Any) return true;
    if (a.kind != b.kind) return false;
    if (a.params.size() != b.params.size()) return false;
    for (size_t i = 0; i < a.params.size(); ++i)
        if (!types_compatible(a.params[i], b.params[i])) return false;
    return true;
}

TypeExpr type_of_value(const Value& v) {
    if (v.is_node()) return TypeExpr::simple(TypeExpr::Kind::Node);
    if (v.is_int()) return TypeExpr::simple(TypeExpr::Kind::Int);
    if (v.is_float()) return TypeExpr::simple(TypeExpr::Kind::Float);
    if (v.is_bool()) return TypeExpr::simple(TypeExpr::Kind::Bool);
    if (v.is_string()) return TypeExpr::simple(TypeExpr::Kind::String);
    if (v.is_list()) {
        const auto& xs = v.as_list();
        return TypeExpr::list(xs.empty() ? any_type() : type_of_value(xs.front()));
    }
    const auto& p = v.as_pair();
    return TypeExpr::pair(type_of_value(p.first), type_of_value(p.second));
}

bool value_matches_type(const Value& v, const TypeExpr& t) {
    if (t.kind == TypeExpr::Kind::Any) return true;
    switch (t.kind) {
        case TypeExpr::Kind::Node: return v.is_node();
        case TypeExpr::Kind::Int: return v.is_int();
        case TypeExpr::Kind::Float: return v.is_float();
        case TypeExpr::Kind::Bool: return v.is_bool();
        case TypeExpr::Kind::String: return v.is_string();
        case TypeExpr::Kind::List:
            if (!v.is_list()) return false;
            return std::all_of(v.as_list().begin(), v.as_list().end(),
                               [&](const Value& x) { return value_matches_type(x, t.params[0]); });
        case TypeExpr::Kind::Pair:
            return v.is_pair() && value_matches_type(v.as_pair().first, t.params[0]) &&
                   value_matches_type(v.as_pair().second, t.params[1]);
        case TypeExpr::Kind::Any: return true;
    }
    return false;
}

bool numeric(const TypeExpr& t) {
    return t.kind == TypeExpr::Kind::Int || t.kind == TypeExpr::Kind::Float ||
           t.kind == TypeExpr::Kind::Any;
}

class Checker {
public:
    Checker(const Program& p, const std::map<std::string, Value>& cli_consts)
        : prog_(p), cli_consts_(cli_consts) {}

    CheckResult run() {
        CheckResult result;
        check_declarations();
        resolve_constants();
        for (size_t i = 0; i < prog_.rules.size(); ++i) check_rule(prog_.rules[i]);
        check_axioms();
        result.errors = std::move(errors_);
        if (result.errors.empty()) {
            CheckedProgram cp;
            cp.program = prog_;
            cp.consts = std::move(consts_);
            cp.ground_axioms = std::move(ground_axioms_);
            cp.rule_vars = std::move(rule_vars_);
            result.checked = std::move(cp);
        }
        return result;
    }

private:
    void error(SourceLoc loc, std::string code, std::string msg) {
        errors_.push_back({loc, std::move(code), std::move(msg)});
    }

    void check_declarations() {
        for (const auto& d : prog_.declarations) {
            if (preds_.count(d.name))
                error(d.loc, "DuplicatePredicate", "predicate " + d.name + " declared twice");
            if (d.arg_types.empty() || d.arg_types[0].kind != TypeExpr::Kind::Node)
                error(d.loc, "TypeMismatch",
                      "first argument of predicate " + d.name + " must be node");
            preds_[d.name] = &d;
        }
    }

    void resolve_constants() {
        consts_ = cli_consts_;
        for (const auto& c : prog_.constants) {
            std::vector<std::string> vars;
            collect_vars(*c.value, vars);
            if (!vars.empty()) {
                error(c.loc, "TypeMismatch", "constant " + c.name + " is not literal-evaluable");
                continue;
            }
            try {
                EvalEnv env{&consts_, 0};
                Bindings none;
                consts_[c.name] = eval_expr(*c.value, none, env);
            } catch (const EvalError& e) {
                error(c.loc, e.code, std::string("in constant ") + c.name + ": " + e.what());
            }
        }
    }

    const PredicateDecl* lookup_pred(const FactTemplate& t) {
        auto it = preds_.find(t.predicate);
        if (it == preds_.end()) {
            error(t.loc, "UnknownPredicate", "unknown predicate " + t.predicate);
            return nullptr;
        }
        const PredicateDecl* d = it->second;
        if (t.args.size() != d->arg_types.size()) {
            error(t.loc, "TypeMismatch",
                  t.predicate + " expects " + std::to_string(d->arg_types.size()) +
                      " arguments, got " + std::to_string(t.args.size()));
            return nullptr;
        }
        if (t.persistent == d->linear) {
            error(t.loc, "TypeMismatch",
                  t.predicate + (d->linear ? " is linear and must not be written with !"
                                           : " is persistent and must be written with !"));
        }
        return d;
    }

    // ---- expressions --------------------------------------------------------

    TypeExpr infer(const Expr& e, const TypeEnv& env) {
        switch (e.kind) {
            case Expr::Kind::Literal:
                return type_of_value(e.literal);
            case Expr::Kind::Var: {
                auto it = env.find(e.name);
                if (it == env.end()) {
                    error(e.loc, "UnboundHeadVariable", "variable " + e.name + " is not bound");
                    return any_type();
                }
                return it->second;
            }
            case Expr::Kind::ConstRef: {
                auto it = consts_.find(e.name);
                if (it == consts_.end()) {
                    error(e.loc, "UnknownConst",
                          "unknown constant '" + e.name + "' (missing --const " + e.name + "=...?)");
                    return any_type();
                }
                return type_of_value(it->second);
            }
            case Expr::Kind::World:
                return TypeExpr::simple(TypeExpr::Kind::Int);
            case Expr::Kind::Unary: {
                TypeExpr t = infer(*e.operands[0], env);
                if (!numeric(t)) error(e.loc, "TypeMismatch", "negation of non-numeric value");
                return t;
            }
            case Expr::Kind::Binary:
                return infer_binary(e, env);
            case Expr::Kind::Cast: {
                TypeExpr t = infer(*e.operands[0], env);
                if (!numeric(t)) error(e.loc, "TypeMismatch", e.name + "() of non-numeric value");
                return TypeExpr::simple(e.name == "float" ? TypeExpr::Kind::Float
                                                          : TypeExpr::Kind::Int);
            }
            case Expr::Kind::ListExpr: {
                TypeExpr elem = any_type();
                for (const auto& x : e.operands) {
                    TypeExpr t = infer(*x, env);
                    if (elem.kind == TypeExpr::Kind::Any)
                        elem = t;
                    else if (!types_compatible(elem, t))
                        error(e.loc, "TypeMismatch", "heterogeneous list elements");
                }
                if (e.tail) {
                    TypeExpr t = infer(*e.tail, env);
                    if (t.kind == TypeExpr::Kind::List) {
                        if (elem.kind == TypeExpr::Kind::Any)
                            elem = t.params[0];
                        else if (!types_compatible(elem, t.params[0]))
                            error(e.loc, "TypeMismatch", "list tail element type mismatch");
                    } else if (t.kind != TypeExpr::Kind::Any) {
                        error(e.loc, "TypeMismatch", "list tail is not a list");
                    }
                }
                return TypeExpr::list(std::move(elem));
            }
            case Expr::Kind::Call:
                error(e.loc, "TypeMismatch", "fact template used as an expression");
                return any_type();
        }
        return any_type();
    }

    TypeExpr infer_binary(const Expr& e, const TypeEnv& env) {
        TypeExpr lhs = infer(*e.operands[0], env);
        TypeExpr rhs = infer(*e.operands[1], env);
        switch (e.binop) {
            case BinOp::Add:
            case BinOp::Sub:
            case BinOp::Mul:
            case BinOp::Div:
                if (!numeric(lhs) || !numeric(rhs) || !types_compatible(lhs, rhs)) {
                    error(e.loc, "TypeMismatch",
                          "arithmetic needs two ints or two floats (use float(...) to cast)");
                    return any_type();
                }
                return lhs.kind == TypeExpr::Kind::Any ? rhs : lhs;
            case BinOp::Eq:
            case BinOp::Neq:
                if (!types_compatible(lhs, rhs))
                    error(e.loc, "TypeMismatch", "comparison of differently typed values");
                return TypeExpr::simple(TypeExpr::Kind::Bool);
            case BinOp::Lt:
            case BinOp::Le:
            case BinOp::Gt:
            case BinOp::Ge:
                if (!types_compatible(lhs, rhs))
                    error(e.loc, "TypeMismatch", "comparison of differently typed values");
                return TypeExpr::simple(TypeExpr::Kind::Bool);
            case BinOp::Or:
            case BinOp::And:
                if (lhs.kind != TypeExpr::Kind::Bool || rhs.kind != TypeExpr::Kind::Bool)
                    error(e.loc, "TypeMismatch", "boolean connective needs bool operands");
                return TypeExpr::simple(TypeExpr::Kind::Bool);
        }
        return any_type();
    }

    // Types a template argument in pattern position, binding fresh variables.
    void check_pattern(const Expr& e, const TypeExpr& expected, TypeEnv& env) {
        switch (e.kind) {
            case Expr::Kind::Var: {
                auto it = env.find(e.name);
                if (it == env.end()) {
                    env.emplace(e.name, expected);
                } else if (!types_compatible(it->second, expected)) {
                    error(e.loc, "TypeMismatch",
                          "variable " + e.name + " used at type " + expected.to_string() +
                              " but has type " + it->second.to_string());
                } else if (it->second.kind == TypeExpr::Kind::Any) {
                    it->second = expected;
                }
                return;
            }
            case Expr::Kind::ListExpr: {
                TypeExpr elem = any_type();
                if (expected.kind == TypeExpr::Kind::List)
                    elem = expected.params[0];
                else if (expected.kind != TypeExpr::Kind::Any)
                    error(e.loc, "TypeMismatch", "list pattern against " + expected.to_string());
                for (const auto& x : e.operands) check_pattern(*x, elem, env);
                if (e.tail) check_pattern(*e.tail, TypeExpr::list(elem), env);
                return;
            }
            default: {
                TypeExpr t = infer(e, env);
                if (!types_compatible(t, expected))
                    error(e.loc, "TypeMismatch",
                          "argument of type " + t.to_string() + " where " + expected.to_string() +
                              " expected");
            }
        }
    }

    // Runs a compiled plan through the type environment.
    void check_plan(const BodyPlan& plan, TypeEnv& env) {
        for (const auto& step : plan.steps) {
            switch (step.kind) {
                case PlanStep::Kind::Match: {
                    const PredicateDecl* d = lookup_pred(*step.tmpl);
                    if (!d) break;
                    for (size_t i = 0; i < step.tmpl->args.size(); ++i)
                        check_pattern(*step.tmpl->args[i], d->arg_types[i], env);
                    break;
                }
                case PlanStep::Kind::Constraint: {
                    TypeExpr t = infer(*step.expr, env);
                    if (t.kind != TypeExpr::Kind::Bool && t.kind != TypeExpr::Kind::Any)
                        error(step.expr->loc, "TypeMismatch", "constraint is not boolean");
                    break;
                }
                case PlanStep::Kind::Bind:
                    env.emplace(step.bind_var, infer(*step.expr, env));
                    break;
            }
        }
    }

    bool compile_and_check_body(const Body& body, TypeEnv& env) {
        std::set<std::string> bound;
        for (const auto& [name, _] : env) bound.insert(name);
        BodyPlan plan;
        bool ok = compile_body_plan(body, bound, plan, errors_);
        check_plan(plan, env);
        return ok;
    }

    void check_sub_head(const SubHead& sh, const TypeEnv& env) {
        for (const auto& f : sh) check_head_fact(f, env);
    }

    void check_head_fact(const FactTemplate& f, const TypeEnv& env) {
        const PredicateDecl* d = lookup_pred(f);
        if (!d) return;
        for (size_t i = 0; i < f.args.size(); ++i) {
            std::vector<std::string> vars;
            collect_vars(*f.args[i], vars);
            for (const auto& v : vars) {
                if (!env.count(v))
                    error(f.loc, "UnboundHeadVariable",
                          "head variable " + v + " is not bound in the rule body");
            }
            TypeEnv patched = env;  // infer() reports unbound separately
            for (const auto& v : vars)
                if (!patched.count(v)) patched.emplace(v, any_type());
            TypeExpr t = infer(*f.args[i], patched);
            if (!types_compatible(t, d->arg_types[i]))
                error(f.loc, "TypeMismatch",
                      "argument " + std::to_string(i + 1) + " of " + f.predicate + " has type " +
                          t.to_string() + ", expected " + d->arg_types[i].to_string());
        }
    }

    void check_comprehension_vars(const std::vector<std::string>& vars, const TypeEnv& outer,
                                  SourceLoc loc) {
        for (const auto& v : vars) {
            if (outer.count(v))
                error(loc, "ShadowedVariable",
                      "variable " + v + " shadows a rule body variable");
        }
    }

    void check_locality_of(const Body& body, const std::string& home, SourceLoc loc) {
        for (const auto& item : body) {
            if (!item.is_fact()) continue;
            const FactTemplate& t = item.fact();
            if (t.args.empty()) continue;
            const Expr& first = *t.args[0];
            if (first.kind != Expr::Kind::Var || first.name != home)
                error(loc, "LocalityViolation",
                      "body fact " + t.predicate + " is not homed at " + home);
        }
    }

    void check_rule(const RuleAst& rule) {
        TypeEnv env;

        // Home variable: first argument of the first body template.
        std::string home;
        for (const auto& item : rule.body) {
            if (!item.is_fact()) continue;
            const FactTemplate& t = item.fact();
            if (!t.args.empty() && t.args[0]->kind == Expr::Kind::Var) home = t.args[0]->name;
            break;
        }
        if (home.empty()) {
            error(rule.loc, "LocalityViolation",
                  "rule has no body fact template with a variable home argument");
            rule_vars_.push_back({});
            return;
        }
        check_locality_of(rule.body, home, rule.loc);

        compile_and_check_body(rule.body, env);

        if (rule.selector) {
            auto it = env.find(rule.selector->var);
            if (it == env.end())
                error(rule.selector->loc, "UnboundHeadVariable",
                      "selector variable " + rule.selector->var + " is not bound by the body");
        }

        TypeEnv merged = env;
        for (const auto& term : rule.head) {
            if (const auto* f = std::get_if<FactTemplate>(&term.term)) {
                check_head_fact(*f, env);
            } else if (const auto* c = std::get_if<Comprehension>(&term.term)) {
                check_comprehension_vars(c->vars, env, c->loc);
                TypeEnv local = env;
                compile_and_check_body(c->body, local);
                check_locality_of(c->body, home, c->loc);
                for (const auto& v : c->vars)
                    if (!local.count(v))
                        error(c->loc, "UnboundHeadVariable",
                              "comprehension variable " + v + " is not bound by its body");
                check_sub_head(c->head, local);
                merged.insert(local.begin(), local.end());
            } else if (const auto* a = std::get_if<Aggregate>(&term.term)) {
                check_comprehension_vars(a->vars, env, a->loc);
                TypeEnv local = env;
                compile_and_check_body(a->body, local);
                check_locality_of(a->body, home, a->loc);
                TypeEnv head2_env = env;
                for (const auto& acc : a->accums) {
                    if (acc.op == AggregateOp::Count) {
                        if (env.count(acc.var) || local.count(acc.var))
                            error(a->loc, "TypeMismatch",
                                  "count accumulator " + acc.var + " must not be bound");
                        head2_env.emplace(acc.var, TypeExpr::simple(TypeExpr::Kind::Int));
                        merged.emplace(acc.var, TypeExpr::simple(TypeExpr::Kind::Int));
                    } else {
                        auto it = local.find(acc.var);
                        if (it == local.end()) {
                            error(a->loc, "UnboundHeadVariable",
                                  "aggregate accumulator " + acc.var +
                                      " is not bound by the aggregate body");
                        } else {
                            if (!numeric(it->second))
                                error(a->loc, "TypeMismatch",
                                      "aggregate accumulator " + acc.var + " is not numeric");
                            head2_env.emplace(acc.var, it->second);
                        }
                    }
                }
                check_sub_head(a->head1, local);
                check_sub_head(a->head2, head2_env);
                merged.insert(local.begin(), local.end());
            } else {
                const auto& e = std::get<ExistsExpr>(term.term);
                check_comprehension_vars(e.vars, env, e.loc);
                TypeEnv local = env;
                for (const auto& v : e.vars)
                    local.emplace(v, TypeExpr::simple(TypeExpr::Kind::Node));
                check_sub_head(e.head, local);
                merged.insert(local.begin(), local.end());
            }
        }
        rule_vars_.push_back(std::move(merged));
    }

    void check_axioms() {
        for (const auto& a : prog_.axioms) {
            const FactTemplate& t = a.fact;
            const PredicateDecl* d = lookup_pred(t);
            if (!d) continue;
            bool ground = true;
            for (const auto& arg : t.args) {
                std::vector<std::string> vars;
                collect_vars(*arg, vars);
                if (!vars.empty()) {
                    error(t.loc, "NonGroundAxiom",
                          "axiom " + t.predicate + " has free variable " + vars.front());
                    ground = false;
                }
            }
            if (!ground) continue;
            Fact fact;
            fact.predicate = t.predicate;
            fact.persistent = !d->linear;
            bool ok = true;
            try {
                EvalEnv env{&consts_, 0};
                Bindings none;
                for (size_t i = 0; i < t.args.size(); ++i) {
                    Value v = eval_expr(*t.args[i], none, env);
                    if (!value_matches_type(v, d->arg_types[i])) {
                        error(t.loc, "TypeMismatch",
                              "axiom argument " + std::to_string(i + 1) + " of " + t.predicate +
                                  " has the wrong type");
                        ok = false;
                    }
                    fact.args.push_back(std::move(v));
                }
            } catch (const EvalError& e) {
                error(t.loc, e.code, std::string("in axiom ") + t.predicate + ": " + e.what());
                ok = false;
            }
            if (ok) ground_axioms_.push_back(std::move(fact));
        }
    }

    const Program& prog_;
    const std::map<std::string, Value>& cli_consts_;
    std::map<std::string, const PredicateDecl*> preds_;
    std::map<std::string, Value> consts_;
    std::vector<Fact> ground_axioms_;
    std::vector<std::map<std::string, TypeExpr>> rule_vars_;
    std::vector<Diagnostic> errors_;
};

}  // namespace

CheckResult check_program(const Program& p, const std::map<std::string, Value>& cli_consts) {
    return Checker(p, cli_consts).run();
}

std::optional<std::string> check_locality(const RuleAst& rule) {
    std::string home;
    auto scan = [&](const Body& body) -> std::optional<std::string> {
        for (const auto& item : body) {
            if (!item.is_fact()) continue;
            const FactTemplate& t = item.fact();
            if (t.args.empty() || t.args[0]->kind != Expr::Kind::Var)
                return t.predicate;
            if (home.empty())
                home = t.args[0]->name;
            else if (t.args[0]->name != home)
                return t.predicate;
        }
        return std::nullopt;
    };
    if (auto bad = scan(rule.body)) return bad;
    for (const auto& term : rule.head) {
        if (const auto* c = std::get_if<Comprehension>(&term.term)) {
            if (auto bad = scan(c->body)) return bad;
        } else if (const auto* a = std::get_if<Aggregate>(&term.term)) {
            if (auto bad = scan(a->body)) return bad;
        }
    }
    return std::nullopt;
}

std::optional<Value> parse_const_literal(const std::string& text) {
    if (text.empty()) return std::nullopt;
    if (text == "true") return Value(true);
    if (text == "false") return Value(false);
    if (text[0] == '@') {
        try {
            return Value(NodeId{std::stoull(text.substr(1))});
        } catch (...) {
            return std::nullopt;
        }
    }
    bool is_num = text[0] == '-' || std::isdigit(static_cast<unsigned char>(text[0]));
    if (is_num) {
        if (text.find('.') != std::string::npos) {
            try {
                return Value(std::stod(text));
            } catch (...) {
                return std::nullopt;
            }
        }
        try {
            return Value(static_cast<int64_t>(std::stoll(text)));
        } catch (...) {
            return std::nullopt;
        }
    }
    return Value(text);
}

}  // namespace lm
