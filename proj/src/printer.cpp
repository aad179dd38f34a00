#include "lm/printer.hpp"

#include <sstream>

namespace lm {

namespace {

const char* binop_text(BinOp op) {
    switch (op) {
        case BinOp::Add: return "+";
        case BinOp::Sub: return "-";
        case BinOp::Mul: return "*";
        case BinOp::Div: return "/";
        case BinOp::Eq: return "=";
        case BinOp::Neq: return "<>";
        case BinOp::Lt: return "<";
        case BinOp::Le: return "<=";
        case BinOp::Gt: return ">";
        case BinOp::Ge: return ">=";
        case BinOp::Or: return "||";
        case BinOp::And: return "&&";
    }
    return "?";
}

std::string var_text(const std::string& name) {
    // Anonymous variables regenerate on re-parse.
    return name.rfind("_$", 0) == 0 ? "_" : name;
}

// ---- concrete syntax -------------------------------------------------------

std::string expr_text(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::Literal: return e.literal.to_string();
        case Expr::Kind::Var: return var_text(e.name);
        case Expr::Kind::ConstRef: return e.name;
        case Expr::Kind::World: return "@world";
        case Expr::Kind::Unary: return "(-" + expr_text(*e.operands[0]) + ")";
        case Expr::Kind::Binary:
            return "(" + expr_text(*e.operands[0]) + " " + binop_text(e.binop) + " " +
                   expr_text(*e.operands[1]) + ")";
        case Expr::Kind::Cast: return e.name + "(" + expr_text(*e.operands[0]) + ")";
        case Expr::Kind::ListExpr: {
            std::string s = "[";
            for (size_t i = 0; i < e.operands.size(); ++i) {
                if (i) s += ", ";
                s += expr_text(*e.operands[i]);
            }
            if (e.tail) s += " | " + expr_text(*e.tail);
            return s + "]";
        }
        case Expr::Kind::Call: {
            std::string s = e.name + "(";
            for (size_t i = 0; i < e.operands.size(); ++i) {
                if (i) s += ", ";
                s += expr_text(*e.operands[i]);
            }
            return s + ")";
        }
    }
    return "?";
}

std::string fact_text(const FactTemplate& f) {
    std::string s = f.persistent ? "!" : "";
    s += f.predicate + "(";
    for (size_t i = 0; i < f.args.size(); ++i) {
        if (i) s += ", ";
        s += expr_text(*f.args[i]);
    }
    return s + ")";
}

std::string body_text(const Body& body) {
    if (body.empty()) return "1";
    std::string s;
    for (size_t i = 0; i < body.size(); ++i) {
        if (i) s += ", ";
        const auto& item = body[i];
        s += item.is_fact() ? fact_text(item.fact()) : expr_text(*item.constraint());
    }
    return s;
}

std::string sub_head_text(const SubHead& sh) {
    if (sh.empty()) return "1";
    std::string s;
    for (size_t i = 0; i < sh.size(); ++i) {
        if (i) s += ", ";
        s += fact_text(sh[i]);
    }
    return s;
}

std::string vars_text(const std::vector<std::string>& vars) {
    std::string s;
    for (size_t i = 0; i < vars.size(); ++i) {
        if (i) s += ", ";
        s += var_text(vars[i]);
    }
    return s;
}

const char* aggregate_op_text(AggregateOp op) {
    switch (op) {
        case AggregateOp::Min: return "min";
        case AggregateOp::Max: return "max";
        case AggregateOp::Sum: return "sum";
        case AggregateOp::Count: return "count";
    }
    return "?";
}

std::string head_term_text(const HeadTerm& term) {
    if (const auto* f = std::get_if<FactTemplate>(&term.term)) return fact_text(*f);
    if (const auto* c = std::get_if<Comprehension>(&term.term)) {
        return "{" + vars_text(c->vars) + " | " + body_text(c->body) + " | " +
               sub_head_text(c->head) + "}";
    }
    if (const auto* a = std::get_if<Aggregate>(&term.term)) {
        std::string s = "[";
        for (size_t i = 0; i < a->accums.size(); ++i) {
            if (i) s += ", ";
            s += std::string(aggregate_op_text(a->accums[i].op)) + " => " + a->accums[i].var;
        }
        s += " | " + (a->vars.empty() ? "." : vars_text(a->vars));
        s += " | " + body_text(a->body);
        s += " | " + sub_head_text(a->head1);
        s += " | " + sub_head_text(a->head2);
        return s + "]";
    }
    const auto& e = std::get<ExistsExpr>(term.term);
    return "exists " + vars_text(e.vars) + ". (" + sub_head_text(e.head) + ")";
}

std::string head_text(const Head& head) {
    if (head.empty()) return "1";
    std::string s;
    for (size_t i = 0; i < head.size(); ++i) {
        if (i) s += ", ";
        s += head_term_text(head[i]);
    }
    return s;
}

const char* selector_op_text(SelectorOp op) {
    switch (op) {
        case SelectorOp::Min: return "min";
        case SelectorOp::Max: return "max";
        case SelectorOp::Random: return "random";
    }
    return "?";
}

// ---- s-expressions ---------------------------------------------------------

class AstDumper {
public:
    std::string run(const Program& prog) {
        for (const auto& d : prog.declarations) {
            line("(decl " + d.name + (d.linear ? " linear" : " persistent") +
                 type_list(d.arg_types) + ")");
        }
        for (const auto& c : prog.constants)
            line("(const " + c.name + " " + expr_sexpr(*c.value) + ")");
        for (const auto& r : prog.rules) {
            std::string s = "(rule " + std::to_string(r.priority);
            if (r.selector)
                s += " (selector " + std::string(selector_op_text(r.selector->op)) +
                     (r.selector->var.empty() ? "" : " " + var_text(r.selector->var)) + ")";
            s += " (body" + body_sexpr(r.body) + ") (head" + head_sexpr(r.head) + "))";
            line(s);
        }
        for (const auto& a : prog.axioms) line("(axiom " + fact_sexpr(a.fact) + ")");
        return out_.str();
    }

private:
    void line(const std::string& s) { out_ << s << "\n"; }

    std::string type_list(const std::vector<TypeExpr>& ts) {
        std::string s;
        for (const auto& t : ts) s += " " + t.to_string();
        return s;
    }

    std::string expr_sexpr(const Expr& e) {
        switch (e.kind) {
            case Expr::Kind::Literal: return "(lit " + e.literal.to_string() + ")";
            case Expr::Kind::Var: return "(var " + var_text(e.name) + ")";
            case Expr::Kind::ConstRef: return "(constref " + e.name + ")";
            case Expr::Kind::World: return "(world)";
            case Expr::Kind::Unary: return "(neg " + expr_sexpr(*e.operands[0]) + ")";
            case Expr::Kind::Binary:
                return std::string("(") + binop_text(e.binop) + " " +
                       expr_sexpr(*e.operands[0]) + " " + expr_sexpr(*e.operands[1]) + ")";
            case Expr::Kind::Cast:
                return "(cast " + e.name + " " + expr_sexpr(*e.operands[0]) + ")";
            case Expr::Kind::ListExpr: {
                std::string s = "(list";
                for (const auto& x : e.operands) s += " " + expr_sexpr(*x);
                if (e.tail) s += " (tail " + expr_sexpr(*e.tail) + ")";
                return s + ")";
            }
            case Expr::Kind::Call: {
                std::string s = "(call " + e.name;
                for (const auto& x : e.operands) s += " " + expr_sexpr(*x);
                return s + ")";
            }
        }
        return "?";
    }

    std::string fact_sexpr(const FactTemplate& f) {
        std::string s = std::string("(") + (f.persistent ? "pfact " : "lfact ") + f.predicate;
        for (const auto& a : f.args) s += " " + expr_sexpr(*a);
        return s + ")";
    }

    std::string body_sexpr(const Body& body) {
        std::string s;
        for (const auto& item : body) {
            s += " ";
            s += item.is_fact() ? fact_sexpr(item.fact())
                                : "(constraint " + expr_sexpr(*item.constraint()) + ")";
        }
        return s;
    }

    std::string sub_head_sexpr(const SubHead& sh) {
        std::string s;
        for (const auto& f : sh) s += " " + fact_sexpr(f);
        return s;
    }

    std::string head_sexpr(const Head& head) {
        std::string s;
        for (const auto& term : head) {
            s += " ";
            if (const auto* f = std::get_if<FactTemplate>(&term.term)) {
                s += fact_sexpr(*f);
            } else if (const auto* c = std::get_if<Comprehension>(&term.term)) {
                s += "(comp (vars " + vars_text(c->vars) + ") (body" + body_sexpr(c->body) +
                     ") (head" + sub_head_sexpr(c->head) + "))";
            } else if (const auto* a = std::get_if<Aggregate>(&term.term)) {
                s += "(agg (ops";
                for (const auto& acc : a->accums)
                    s += std::string(" ") + aggregate_op_text(acc.op) + "=>" + acc.var;
                s += ") (vars " + vars_text(a->vars) + ") (body" + body_sexpr(a->body) +
                     ") (head1" + sub_head_sexpr(a->head1) + ") (head2" +
                     sub_head_sexpr(a->head2) + "))";
            } else {
                const auto& e = std::get<ExistsExpr>(term.term);
                s += "(exists (vars " + vars_text(e.vars) + ") (head" +
                     sub_head_sexpr(e.head) + "))";
            }
        }
        return s;
    }

    std::ostringstream out_;
};

}  // namespace

std::string TypeExpr::to_string() const {
    switch (kind) {
        case Kind::Node: return "node";
        case Kind::Int: return "int";
        case Kind::Float: return "float";
        case Kind::String: return "string";
        case Kind::Bool: return "bool";
        case Kind::List: return "list " + params[0].to_string();
        case Kind::Pair: return "pair " + params[0].to_string() + " " + params[1].to_string();
        case Kind::Any: return "any";
    }
    return "?";
}

std::string print_expr(const Expr& e) { return expr_text(e); }

std::string dump_ast(const Program& prog) { return AstDumper().run(prog); }

std::string pretty_print(const Program& prog) {
    std::ostringstream out;
    for (const auto& d : prog.declarations) {
        out << "type " << (d.linear ? "linear " : "") << d.name << "(";
        for (size_t i = 0; i < d.arg_types.size(); ++i) {
            if (i) out << ", ";
            out << d.arg_types[i].to_string();
        }
        out << ").\n";
    }
    for (const auto& c : prog.constants)
        out << "const " << c.name << " = " << expr_text(*c.value) << ".\n";
    for (const auto& r : prog.rules) {
        if (r.selector) {
            out << "[" << selector_op_text(r.selector->op) << " => " << var_text(r.selector->var)
                << " | " << body_text(r.body) << "]";
        } else {
            out << body_text(r.body);
        }
        out << " -o " << head_text(r.head) << ".\n";
    }
    for (const auto& a : prog.axioms) out << fact_text(a.fact) << ".\n";
    return out.str();
}

}  // namespace lm
