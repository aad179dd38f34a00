#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lm/value.hpp"

namespace lm {

struct SourceLoc {
    int line = 0;
    int col = 0;
};

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

struct TypeExpr {
    enum class Kind { Node, Int, Float, String, Bool, List, Pair, Any };
    Kind kind = Kind::Int;
    std::vector<TypeExpr> params;  // List: 1 element, Pair: 2 elements

    static TypeExpr simple(Kind k) { return TypeExpr{k, {}}; }
    static TypeExpr list(TypeExpr elem) { return TypeExpr{Kind::List, {std::move(elem)}}; }
    static TypeExpr pair(TypeExpr a, TypeExpr b) {
        return TypeExpr{Kind::Pair, {std::move(a), std::move(b)}};
    }

    bool operator==(const TypeExpr& o) const {
        return kind == o.kind && params == o.params;
    }
    std::string to_string() const;
};

struct PredicateDecl {
    std::string name;
    std::vector<TypeExpr> arg_types;  // arg_types[0] is always node
    bool linear = false;
    SourceLoc loc;
};

// ---------------------------------------------------------------------------
// Expressions (fact arguments and constraints)
// ---------------------------------------------------------------------------

struct Expr;
using ExprPtr = std::shared_ptr<Expr>;

enum class BinOp { Add, Sub, Mul, Div, Eq, Neq, Lt, Le, Gt, Ge, Or, And };

struct Expr {
    enum class Kind {
        Literal,   // value
        Var,       // name (uppercase or generated wildcard)
        ConstRef,  // name (lowercase constant)
        World,     // @world
        Unary,     // negation, operands[0]
        Binary,    // binop, operands[0], operands[1]
        Cast,      // cast_target over operands[0] ("float" or "int")
        ListExpr,  // operands = elements; tail = optional cons tail
        Call,      // predicate application; only legal as a body/head conjunct
    };

    Kind kind = Kind::Literal;
    Value literal;
    std::string name;  // Var / ConstRef / Call predicate / cast target
    BinOp binop = BinOp::Add;
    std::vector<ExprPtr> operands;
    ExprPtr tail;  // ListExpr cons tail, null for a complete list
    SourceLoc loc;
};

ExprPtr make_literal(Value v, SourceLoc loc = {});
ExprPtr make_var(std::string name, SourceLoc loc = {});

// ---------------------------------------------------------------------------
// Rules
// ---------------------------------------------------------------------------

struct FactTemplate {
    std::string predicate;
    std::vector<ExprPtr> args;
    bool persistent = false;
    SourceLoc loc;
};

// One conjunct of a rule body: a fact template or a constraint expression.
struct BodyItem {
    std::variant<FactTemplate, ExprPtr> item;
    bool is_fact() const { return std::holds_alternative<FactTemplate>(item); }
    const FactTemplate& fact() const { return std::get<FactTemplate>(item); }
    FactTemplate& fact() { return std::get<FactTemplate>(item); }
    const ExprPtr& constraint() const { return std::get<ExprPtr>(item); }
};

using Body = std::vector<BodyItem>;      // empty body is the unit 1
using SubHead = std::vector<FactTemplate>;  // empty sub-head is the unit 1

struct Comprehension {
    std::vector<std::string> vars;
    Body body;
    SubHead head;
    SourceLoc loc;
};

enum class AggregateOp { Min, Max, Sum, Count };

struct AggregateAccum {
    AggregateOp op;
    std::string var;
};

struct Aggregate {
    std::vector<AggregateAccum> accums;  // one or more "op => Var" entries
    std::vector<std::string> vars;
    Body body;
    SubHead head1;
    SubHead head2;
    SourceLoc loc;
};

struct ExistsExpr {
    std::vector<std::string> vars;  // fresh node variables
    SubHead head;
    SourceLoc loc;
};

struct HeadTerm {
    std::variant<FactTemplate, Comprehension, Aggregate, ExistsExpr> term;
};

using Head = std::vector<HeadTerm>;  // empty head is the unit 1

enum class SelectorOp { Min, Max, Random };

struct Selector {
    SelectorOp op;
    std::string var;  // unused for random
    SourceLoc loc;
};

struct RuleAst {
    int priority = 0;  // source position index, 0 = highest
    std::optional<Selector> selector;
    Body body;
    Head head;
    SourceLoc loc;
};

struct ConstDecl {
    std::string name;
    ExprPtr value;
    SourceLoc loc;
};

// A ground fact written directly in the source, e.g. "!edge(@1, @2).".
// Arguments may reference constants, resolved during checking.
struct AxiomAst {
    FactTemplate fact;
};

struct Program {
    std::vector<PredicateDecl> declarations;
    std::vector<ConstDecl> constants;
    std::vector<RuleAst> rules;
    std::vector<AxiomAst> axioms;

    const PredicateDecl* find_predicate(const std::string& name) const {
        for (const auto& d : declarations)
            if (d.name == name) return &d;
        return nullptr;
    }
};

}  // namespace lm
