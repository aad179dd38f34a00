#include "lm/eval.hpp"

#include <cmath>

namespace lm {

namespace {

[[noreturn]] void type_error(const std::string& what) {
    throw EvalError("TypeError", "ill-typed operands for " + what);
}

Value arith(BinOp op, const Value& a, const Value& b) {
    if (a.is_int() && b.is_int()) {
        int64_t x = a.as_int(), y = b.as_int();
        switch (op) {
            case BinOp::Add: return Value(x + y);
            case BinOp::Sub: return Value(x - y);
            case BinOp::Mul: return Value(x * y);
            case BinOp::Div:
                if (y == 0) throw EvalError("DivisionByZero", "integer division by zero");
                return Value(x / y);
            default: break;
        }
    }
    if (a.is_float() && b.is_float()) {
        double x = a.as_float(), y = b.as_float();
        switch (op) {
            case BinOp::Add: return Value(x + y);
            case BinOp::Sub: return Value(x - y);
            case BinOp::Mul: return Value(x * y);
            case BinOp::Div:
                if (y == 0.0) throw EvalError("DivisionByZero", "float division by zero");
                return Value(x / y);
            default: break;
        }
    }
    type_error("arithmetic");
}

Value compare(BinOp op, const Value& a, const Value& b) {
    switch (op) {
        case BinOp::Eq: return Value(a == b);
        case BinOp::Neq: return Value(!(a == b));
        default: break;
    }
    bool lt = a < b;
    bool gt = b < a;
    switch (op) {
        case BinOp::Lt: return Value(lt);
        case BinOp::Le: return Value(!gt);
        case BinOp::Gt: return Value(gt);
        case BinOp::Ge: return Value(!lt);
        default: break;
    }
    type_error("comparison");
}

}  // namespace

Value eval_expr(const Expr& e, const Bindings& b, const EvalEnv& env) {
    switch (e.kind) {
        case Expr::Kind::Literal:
            return e.literal;
        case Expr::Kind::Var: {
            const Value* v = b.lookup(e.name);
            if (!v) throw EvalError("UnboundVariable", "unbound variable " + e.name);
            return *v;
        }
        case Expr::Kind::ConstRef: {
            if (env.consts) {
                auto it = env.consts->find(e.name);
                if (it != env.consts->end()) return it->second;
            }
            throw EvalError("UnknownConst", "unknown constant '" + e.name + "'");
        }
        case Expr::Kind::World:
            return Value(static_cast<int64_t>(env.world_size));
        case Expr::Kind::Unary: {
            Value v = eval_expr(*e.operands[0], b, env);
            if (v.is_int()) return Value(-v.as_int());
            if (v.is_float()) return Value(-v.as_float());
            type_error("negation");
        }
        case Expr::Kind::Binary: {
            if (e.binop == BinOp::Or || e.binop == BinOp::And) {
                Value lhs = eval_expr(*e.operands[0], b, env);
                if (!lhs.is_bool()) type_error("boolean connective");
                if (e.binop == BinOp::Or && lhs.as_bool()) return Value(true);
                if (e.binop == BinOp::And && !lhs.as_bool()) return Value(false);
                Value rhs = eval_expr(*e.operands[1], b, env);
                if (!rhs.is_bool()) type_error("boolean connective");
                return rhs;
            }
            Value lhs = eval_expr(*e.operands[0], b, env);
            Value rhs = eval_expr(*e.operands[1], b, env);
            switch (e.binop) {
                case BinOp::Add:
                case BinOp::Sub:
                case BinOp::Mul:
                case BinOp::Div:
                    return arith(e.binop, lhs, rhs);
                default:
                    return compare(e.binop, lhs, rhs);
            }
        }
        case Expr::Kind::Cast: {
            Value v = eval_expr(*e.operands[0], b, env);
            if (e.name == "float") {
                if (v.is_int()) return Value(static_cast<double>(v.as_int()));
                if (v.is_float()) return v;
            } else {  // int
                if (v.is_float()) return Value(static_cast<int64_t>(v.as_float()));
                if (v.is_int()) return v;
            }
            type_error("cast");
        }
        case Expr::Kind::ListExpr: {
            ValueList elems;
            for (const auto& x : e.operands) elems.push_back(eval_expr(*x, b, env));
            if (e.tail) {
                Value t = eval_expr(*e.tail, b, env);
                if (!t.is_list())
                    throw EvalError("TypeError", "list tail is not a list");
                for (const auto& v : t.as_list()) elems.push_back(v);
            }
            return Value::list(std::move(elems));
        }
        case Expr::Kind::Call:
            throw EvalError("TypeError", "fact template in expression position");
    }
    throw EvalError("TypeError", "unreachable expression kind");
}

bool expr_fully_bound(const Expr& e, const Bindings& b) {
    switch (e.kind) {
        case Expr::Kind::Var:
            return b.lookup(e.name) != nullptr;
        case Expr::Kind::Literal:
        case Expr::Kind::ConstRef:
        case Expr::Kind::World:
            return true;
        default:
            for (const auto& op : e.operands)
                if (!expr_fully_bound(*op, b)) return false;
            return !e.tail || expr_fully_bound(*e.tail, b);
    }
}

bool match_pattern(const Expr& pattern, const Value& v, Bindings& b, const EvalEnv& env) {
    switch (pattern.kind) {
        case Expr::Kind::Var: {
            if (const Value* bound = b.lookup(pattern.name)) return *bound == v;
            b.bind(pattern.name, v);
            return true;
        }
        case Expr::Kind::Literal:
            return pattern.literal == v;
        case Expr::Kind::ListExpr: {
            if (!v.is_list()) return false;
            const ValueList& xs = v.as_list();
            if (xs.size() < pattern.operands.size()) return false;
            if (!pattern.tail && xs.size() != pattern.operands.size()) return false;
            for (size_t i = 0; i < pattern.operands.size(); ++i)
                if (!match_pattern(*pattern.operands[i], xs[i], b, env)) return false;
            if (pattern.tail) {
                ValueList rest(xs.begin() + static_cast<long>(pattern.operands.size()), xs.end());
                return match_pattern(*pattern.tail, Value::list(std::move(rest)), b, env);
            }
            return true;
        }
        default:
            // Computed argument: evaluate and compare. The checker guarantees
            // all variables are bound at this point.
            if (!expr_fully_bound(pattern, b)) return false;
            return eval_expr(pattern, b, env) == v;
    }
}

void collect_vars(const Expr& e, std::vector<std::string>& out) {
    if (e.kind == Expr::Kind::Var) {
        out.push_back(e.name);
        return;
    }
    for (const auto& op : e.operands) collect_vars(*op, out);
    if (e.tail) collect_vars(*e.tail, out);
}

}  // namespace lm
