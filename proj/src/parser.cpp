#include "lm/parser.hpp"

#include "lm/diagnostics.hpp"

namespace lm {

ExprPtr make_literal(Value v, SourceLoc loc) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Literal;
    e->literal = std::move(v);
    e->loc = loc;
    return e;
}

ExprPtr make_var(std::string name, SourceLoc loc) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Var;
    e->name = std::move(name);
    e->loc = loc;
    return e;
}

namespace {

class Parser {
public:
    explicit Parser(const std::vector<Token>& tokens) : toks_(tokens) {}

    Program run() {
        Program prog;
        while (!at(TokenKind::End)) {
            if (at(TokenKind::KwType)) {
                prog.declarations.push_back(declaration());
            } else if (at(TokenKind::KwConst)) {
                prog.constants.push_back(const_decl());
            } else {
                statement(prog);
            }
        }
        return prog;
    }

private:
    const Token& peek(size_t ahead = 0) const {
        size_t i = pos_ + ahead;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    bool at(TokenKind k) const { return peek().kind == k; }
    const Token& advance() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool accept(TokenKind k) {
        if (at(k)) {
            advance();
            return true;
        }
        return false;
    }
    const Token& expect(TokenKind k, const char* what) {
        if (!at(k))
            throw ParseError(peek().loc, "SyntaxError",
                             std::string("expected ") + token_kind_name(k) + " (" + what +
                                 "), found " + token_kind_name(peek().kind));
        return toks_[pos_++];
    }

    [[noreturn]] void fail(const std::string& msg) {
        throw ParseError(peek().loc, "SyntaxError",
                         msg + ", found " + token_kind_name(peek().kind));
    }

    // ---- declarations -----------------------------------------------------

    PredicateDecl declaration() {
        PredicateDecl d;
        d.loc = peek().loc;
        expect(TokenKind::KwType, "declaration");
        d.linear = accept(TokenKind::KwLinear);
        d.name = expect(TokenKind::Ident, "predicate name").text;
        expect(TokenKind::LParen, "declaration");
        d.arg_types.push_back(type_expr());
        while (accept(TokenKind::Comma)) d.arg_types.push_back(type_expr());
        expect(TokenKind::RParen, "declaration");
        expect(TokenKind::Dot, "declaration");
        return d;
    }

    TypeExpr type_expr() {
        const Token& t = expect(TokenKind::Ident, "type");
        if (t.text == "node") return TypeExpr::simple(TypeExpr::Kind::Node);
        if (t.text == "int") return TypeExpr::simple(TypeExpr::Kind::Int);
        if (t.text == "float") return TypeExpr::simple(TypeExpr::Kind::Float);
        if (t.text == "string") return TypeExpr::simple(TypeExpr::Kind::String);
        if (t.text == "bool") return TypeExpr::simple(TypeExpr::Kind::Bool);
        if (t.text == "list") return TypeExpr::list(type_expr());
        if (t.text == "pair") {
            TypeExpr a = type_expr();
            TypeExpr b = type_expr();
            return TypeExpr::pair(std::move(a), std::move(b));
        }
        throw ParseError(t.loc, "SyntaxError", "unknown type '" + t.text + "'");
    }

    ConstDecl const_decl() {
        ConstDecl c;
        c.loc = peek().loc;
        expect(TokenKind::KwConst, "constant");
        c.name = expect(TokenKind::Ident, "constant name").text;
        expect(TokenKind::Eq, "constant");
        c.value = expression();
        expect(TokenKind::Dot, "constant");
        return c;
    }

    // ---- rules and axioms -------------------------------------------------

    bool at_selector_rule() const {
        if (!at(TokenKind::LBracket)) return false;
        const Token& op = peek(1);
        if (op.kind != TokenKind::Ident) return false;
        return (op.text == "min" || op.text == "max" || op.text == "random") &&
               peek(2).kind == TokenKind::Arrow;
    }

    void statement(Program& prog) {
        SourceLoc loc = peek().loc;
        RuleAst rule;
        rule.loc = loc;

        if (at_selector_rule()) {
            rule.selector = selector(rule.body);
            expect(TokenKind::Lolli, "selector rule");
            rule.head = head();
            expect(TokenKind::Dot, "rule");
            rule.priority = static_cast<int>(prog.rules.size());
            prog.rules.push_back(std::move(rule));
            return;
        }

        Body body = parse_body();
        if (accept(TokenKind::Lolli)) {
            rule.body = std::move(body);
            rule.head = head();
            expect(TokenKind::Dot, "rule");
            rule.priority = static_cast<int>(prog.rules.size());
            prog.rules.push_back(std::move(rule));
            return;
        }
        // Bare facts ending in '.' are axioms.
        expect(TokenKind::Dot, "axiom or rule");
        for (auto& item : body) {
            if (!item.is_fact())
                throw ParseError(loc, "SyntaxError", "axiom statement must contain only facts");
            prog.axioms.push_back(AxiomAst{std::move(item.fact())});
        }
    }

    Selector selector(Body& body_out) {
        Selector sel;
        sel.loc = peek().loc;
        expect(TokenKind::LBracket, "selector");
        const Token& op = expect(TokenKind::Ident, "selector operation");
        if (op.text == "min")
            sel.op = SelectorOp::Min;
        else if (op.text == "max")
            sel.op = SelectorOp::Max;
        else
            sel.op = SelectorOp::Random;
        expect(TokenKind::Arrow, "selector");
        sel.var = expect(TokenKind::Variable, "selector variable").text;
        expect(TokenKind::Bar, "selector");
        body_out = parse_body();
        expect(TokenKind::RBracket, "selector");
        return sel;
    }

    Body parse_body() {
        Body body;
        do {
            body_conjunct(body);
        } while (accept(TokenKind::Comma));
        return body;
    }

    void body_conjunct(Body& body) {
        if (at(TokenKind::Int) && peek().int_value == 1 && !is_expr_continuation(peek(1).kind)) {
            advance();  // unit
            return;
        }
        if (at(TokenKind::Bang)) {
            advance();
            body.push_back(BodyItem{fact_template(true)});
            return;
        }
        ExprPtr e = expression();
        if (e->kind == Expr::Kind::Call) {
            body.push_back(BodyItem{call_to_template(*e, false)});
        } else {
            body.push_back(BodyItem{std::move(e)});
        }
    }

    static bool is_expr_continuation(TokenKind k) {
        switch (k) {
            case TokenKind::Plus:
            case TokenKind::Minus:
            case TokenKind::Star:
            case TokenKind::Slash:
            case TokenKind::Eq:
            case TokenKind::Neq:
            case TokenKind::Lt:
            case TokenKind::Le:
            case TokenKind::Gt:
            case TokenKind::Ge:
            case TokenKind::OrOr:
            case TokenKind::AndAnd:
                return true;
            default:
                return false;
        }
    }

    FactTemplate call_to_template(Expr& call, bool persistent) {
        FactTemplate t;
        t.predicate = call.name;
        t.args = std::move(call.operands);
        t.persistent = persistent;
        t.loc = call.loc;
        return t;
    }

    FactTemplate fact_template(bool persistent) {
        SourceLoc loc = peek().loc;
        ExprPtr e = expression();
        if (e->kind != Expr::Kind::Call)
            throw ParseError(loc, "SyntaxError", "expected a fact template");
        return call_to_template(*e, persistent);
    }

    // ---- heads ------------------------------------------------------------

    Head head() {
        Head h;
        do {
            head_term(h);
        } while (accept(TokenKind::Comma));
        return h;
    }

    void head_term(Head& h) {
        if (at(TokenKind::Int) && peek().int_value == 1 && !is_expr_continuation(peek(1).kind)) {
            advance();  // unit
            return;
        }
        if (at(TokenKind::LBrace)) {
            h.push_back(HeadTerm{comprehension()});
            return;
        }
        if (at(TokenKind::LBracket)) {
            h.push_back(HeadTerm{aggregate()});
            return;
        }
        if (at(TokenKind::KwExists)) {
            h.push_back(HeadTerm{exists_expr()});
            return;
        }
        bool persistent = accept(TokenKind::Bang);
        h.push_back(HeadTerm{fact_template(persistent)});
    }

    std::vector<std::string> var_list() {
        std::vector<std::string> vars;
        vars.push_back(expect(TokenKind::Variable, "variable list").text);
        while (accept(TokenKind::Comma))
            vars.push_back(expect(TokenKind::Variable, "variable list").text);
        return vars;
    }

    Comprehension comprehension() {
        Comprehension c;
        c.loc = peek().loc;
        expect(TokenKind::LBrace, "comprehension");
        c.vars = var_list();
        expect(TokenKind::Bar, "comprehension");
        c.body = parse_body();
        expect(TokenKind::Bar, "comprehension");
        c.head = sub_head();
        expect(TokenKind::RBrace, "comprehension");
        return c;
    }

    Aggregate aggregate() {
        Aggregate a;
        a.loc = peek().loc;
        expect(TokenKind::LBracket, "aggregate");
        do {
            const Token& op = expect(TokenKind::Ident, "aggregate operation");
            AggregateAccum acc;
            if (op.text == "min")
                acc.op = AggregateOp::Min;
            else if (op.text == "max")
                acc.op = AggregateOp::Max;
            else if (op.text == "sum")
                acc.op = AggregateOp::Sum;
            else if (op.text == "count")
                acc.op = AggregateOp::Count;
            else
                throw ParseError(op.loc, "SyntaxError",
                                 "unknown aggregate operation '" + op.text + "'");
            expect(TokenKind::Arrow, "aggregate");
            acc.var = expect(TokenKind::Variable, "aggregate accumulator").text;
            a.accums.push_back(std::move(acc));
        } while (accept(TokenKind::Comma));
        expect(TokenKind::Bar, "aggregate");
        if (!accept(TokenKind::Dot)) a.vars = var_list();  // '.' is the empty list
        expect(TokenKind::Bar, "aggregate");
        a.body = parse_body();
        expect(TokenKind::Bar, "aggregate");
        a.head1 = sub_head();
        expect(TokenKind::Bar, "aggregate");
        a.head2 = sub_head();
        expect(TokenKind::RBracket, "aggregate");
        return a;
    }

    ExistsExpr exists_expr() {
        ExistsExpr e;
        e.loc = peek().loc;
        expect(TokenKind::KwExists, "exists");
        e.vars = var_list();
        expect(TokenKind::Dot, "exists");
        expect(TokenKind::LParen, "exists");
        e.head = sub_head();
        expect(TokenKind::RParen, "exists");
        return e;
    }

    SubHead sub_head() {
        SubHead sh;
        do {
            if (at(TokenKind::Int) && peek().int_value == 1 &&
                !is_expr_continuation(peek(1).kind)) {
                advance();  // unit
                continue;
            }
            bool persistent = accept(TokenKind::Bang);
            sh.push_back(fact_template(persistent));
        } while (accept(TokenKind::Comma));
        return sh;
    }

    // ---- expressions ------------------------------------------------------

    ExprPtr expression() { return or_expr(); }

    ExprPtr binary(BinOp op, ExprPtr lhs, ExprPtr rhs, SourceLoc loc) {
        auto e = std::make_shared<Expr>();
        e->kind = Expr::Kind::Binary;
        e->binop = op;
        e->operands = {std::move(lhs), std::move(rhs)};
        e->loc = loc;
        return e;
    }

    ExprPtr or_expr() {
        ExprPtr lhs = and_expr();
        while (at(TokenKind::OrOr)) {
            SourceLoc loc = advance().loc;
            lhs = binary(BinOp::Or, std::move(lhs), and_expr(), loc);
        }
        return lhs;
    }

    ExprPtr and_expr() {
        ExprPtr lhs = cmp_expr();
        while (at(TokenKind::AndAnd)) {
            SourceLoc loc = advance().loc;
            lhs = binary(BinOp::And, std::move(lhs), cmp_expr(), loc);
        }
        return lhs;
    }

    ExprPtr cmp_expr() {
        ExprPtr lhs = add_expr();
        while (true) {
            BinOp op;
            switch (peek().kind) {
                case TokenKind::Eq: op = BinOp::Eq; break;
                case TokenKind::Neq: op = BinOp::Neq; break;
                case TokenKind::Lt: op = BinOp::Lt; break;
                case TokenKind::Le: op = BinOp::Le; break;
                case TokenKind::Gt: op = BinOp::Gt; break;
                case TokenKind::Ge: op = BinOp::Ge; break;
                default: return lhs;
            }
            SourceLoc loc = advance().loc;
            lhs = binary(op, std::move(lhs), add_expr(), loc);
        }
    }

    ExprPtr add_expr() {
        ExprPtr lhs = mul_expr();
        while (at(TokenKind::Plus) || at(TokenKind::Minus)) {
            BinOp op = at(TokenKind::Plus) ? BinOp::Add : BinOp::Sub;
            SourceLoc loc = advance().loc;
            lhs = binary(op, std::move(lhs), mul_expr(), loc);
        }
        return lhs;
    }

    ExprPtr mul_expr() {
        ExprPtr lhs = unary_expr();
        while (at(TokenKind::Star) || at(TokenKind::Slash)) {
            BinOp op = at(TokenKind::Star) ? BinOp::Mul : BinOp::Div;
            SourceLoc loc = advance().loc;
            lhs = binary(op, std::move(lhs), unary_expr(), loc);
        }
        return lhs;
    }

    ExprPtr unary_expr() {
        if (at(TokenKind::Minus)) {
            SourceLoc loc = advance().loc;
            // Fold negative literals directly.
            ExprPtr inner = unary_expr();
            if (inner->kind == Expr::Kind::Literal && inner->literal.is_int())
                return make_literal(Value(-inner->literal.as_int()), loc);
            if (inner->kind == Expr::Kind::Literal && inner->literal.is_float())
                return make_literal(Value(-inner->literal.as_float()), loc);
            auto e = std::make_shared<Expr>();
            e->kind = Expr::Kind::Unary;
            e->operands = {std::move(inner)};
            e->loc = loc;
            return e;
        }
        return primary();
    }

    ExprPtr primary() {
        const Token& t = peek();
        switch (t.kind) {
            case TokenKind::Int:
                advance();
                return make_literal(Value(t.int_value), t.loc);
            case TokenKind::Float:
                advance();
                return make_literal(Value(t.float_value), t.loc);
            case TokenKind::String:
                advance();
                return make_literal(Value(t.text), t.loc);
            case TokenKind::NodeLit:
                advance();
                return make_literal(Value(NodeId{static_cast<uint64_t>(t.int_value)}), t.loc);
            case TokenKind::World: {
                advance();
                auto e = std::make_shared<Expr>();
                e->kind = Expr::Kind::World;
                e->loc = t.loc;
                return e;
            }
            case TokenKind::Variable: {
                advance();
                // Each '_' occurrence is a fresh anonymous variable.
                std::string name = t.text == "_" ? "_$" + std::to_string(wildcards_++) : t.text;
                return make_var(std::move(name), t.loc);
            }
            case TokenKind::LParen: {
                advance();
                ExprPtr e = expression();
                expect(TokenKind::RParen, "parenthesized expression");
                return e;
            }
            case TokenKind::LBracket:
                return list_expr();
            case TokenKind::Ident:
                return ident_expr();
            default:
                fail("expected an expression");
        }
    }

    ExprPtr ident_expr() {
        const Token& t = advance();
        if (t.text == "true") return make_literal(Value(true), t.loc);
        if (t.text == "false") return make_literal(Value(false), t.loc);
        if (!at(TokenKind::LParen)) {
            auto e = std::make_shared<Expr>();
            e->kind = Expr::Kind::ConstRef;
            e->name = t.text;
            e->loc = t.loc;
            return e;
        }
        advance();  // '('
        auto e = std::make_shared<Expr>();
        e->loc = t.loc;
        e->name = t.text;
        if (!at(TokenKind::RParen)) {
            e->operands.push_back(expression());
            while (accept(TokenKind::Comma)) e->operands.push_back(expression());
        }
        expect(TokenKind::RParen, "argument list");
        if (t.text == "float" || t.text == "int") {
            if (e->operands.size() != 1)
                throw ParseError(t.loc, "SyntaxError", t.text + "() takes one argument");
            e->kind = Expr::Kind::Cast;
        } else {
            e->kind = Expr::Kind::Call;
        }
        return e;
    }

    ExprPtr list_expr() {
        SourceLoc loc = expect(TokenKind::LBracket, "list").loc;
        auto e = std::make_shared<Expr>();
        e->kind = Expr::Kind::ListExpr;
        e->loc = loc;
        if (accept(TokenKind::RBracket)) return e;
        e->operands.push_back(expression());
        while (accept(TokenKind::Comma)) e->operands.push_back(expression());
        if (accept(TokenKind::Bar)) e->tail = expression();
        expect(TokenKind::RBracket, "list");
        return e;
    }

    const std::vector<Token>& toks_;
    size_t pos_ = 0;
    int wildcards_ = 0;
};

}  // namespace

Program parse_program(const std::vector<Token>& tokens) { return Parser(tokens).run(); }

Program parse_source(std::string_view source) { return parse_program(tokenize(source)); }

}  // namespace lm
