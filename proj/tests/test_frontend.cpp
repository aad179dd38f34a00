#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lm/database.hpp"
#include "lm/eval.hpp"
#include "lm/lexer.hpp"
#include "lm/parser.hpp"
#include "lm/plan.hpp"
#include "lm/printer.hpp"
#include "lm/typecheck.hpp"

using namespace lm;

namespace {

const char* kMessageProgram = R"(
type edge(node, node). // define direct edge
type linear message(node, string, list node). // message format

message(A, Content, [B | L]), !edge(A, B)
   -o message(B, Content, L). // message derived at node B

message(A, Content, [])
   -o 1. // message received

!edge(@1, @2). !edge(@2, @3). !edge(@3, @4). !edge(@1, @3).
message(@1, 'Hello World', [@3, @4]).
)";

const char* kVisitProgram = R"(
type edge(node, node).
type linear visit(node).
type linear unvisited(node).
type linear visited(node).

visit(A), unvisited(A)
   -o visited(A), {B | !edge(A, B) | visit(B)}. // mark node as visited and visit neighbors

visit(A), visited(A)
   -o visited(A). // already visited

!edge(@1, @2). !edge(@2, @3). !edge(@1, @4). !edge(@2, @4).
unvisited(@1). unvisited(@2). unvisited(@3). unvisited(@4).
visit(@1).
)";

CheckResult check_source(const std::string& src,
                         const std::map<std::string, Value>& consts = {}) {
    return check_program(parse_source(src), consts);
}

bool has_error(const CheckResult& r, const std::string& code) {
    for (const auto& e : r.errors)
        if (e.code == code) return true;
    return false;
}

}  // namespace

// ---------------------------------------------------------------------------
// lexer
// ---------------------------------------------------------------------------

TEST_CASE("tokenize persistent axiom") {
    auto toks = tokenize("!edge(@1, @2).");
    std::vector<TokenKind> kinds;
    for (const auto& t : toks) kinds.push_back(t.kind);
    CHECK(kinds == std::vector<TokenKind>{TokenKind::Bang, TokenKind::Ident, TokenKind::LParen,
                                          TokenKind::NodeLit, TokenKind::Comma, TokenKind::NodeLit,
                                          TokenKind::RParen, TokenKind::Dot, TokenKind::End});
    CHECK(toks[1].text == "edge");
    CHECK(toks[3].int_value == 1);
    CHECK(toks[5].int_value == 2);
}

TEST_CASE("tokenize empty input") {
    auto toks = tokenize("");
    REQUIRE(toks.size() == 1);
    CHECK(toks[0].kind == TokenKind::End);
}

TEST_CASE("tokenize strips line comments") {
    auto toks = tokenize("// comment\n1");
    REQUIRE(toks.size() == 2);
    CHECK(toks[0].kind == TokenKind::Int);
    CHECK(toks[0].int_value == 1);
    CHECK(toks[0].loc.line == 2);
}

TEST_CASE("tokenize hyphenated identifier vs subtraction") {
    auto toks = tokenize("count-prices(A, X - 1)");
    CHECK(toks[0].kind == TokenKind::Ident);
    CHECK(toks[0].text == "count-prices");
    CHECK(toks[5].kind == TokenKind::Minus);
}

TEST_CASE("tokenize lolli and floats") {
    auto toks = tokenize("p(A) -o q(A, 1.0, 0.85, 2).");
    CHECK(toks[4].kind == TokenKind::Lolli);
    CHECK(toks[9].kind == TokenKind::Float);
    CHECK(toks[9].float_value == doctest::Approx(1.0));
    CHECK(toks[11].float_value == doctest::Approx(0.85));
    CHECK(toks[13].kind == TokenKind::Int);
}

TEST_CASE("tokenize world and strings") {
    auto toks = tokenize("@world 'Hello World'");
    CHECK(toks[0].kind == TokenKind::World);
    CHECK(toks[1].kind == TokenKind::String);
    CHECK(toks[1].text == "Hello World");
}

TEST_CASE("lexer errors carry location") {
    CHECK_THROWS_WITH_AS(tokenize("'oops"), doctest::Contains("string"), ParseError);
    try {
        tokenize("p(A) $ q(A)");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.diagnostic.code == "IllegalCharacter");
        CHECK(e.diagnostic.loc.line == 1);
        CHECK(e.diagnostic.loc.col == 6);
    }
}

// ---------------------------------------------------------------------------
// parser
// ---------------------------------------------------------------------------

TEST_CASE("parse visit program shape") {
    Program p = parse_source(kVisitProgram);
    CHECK(p.declarations.size() == 4);
    CHECK(p.rules.size() == 2);
    CHECK(p.axioms.size() == 9);
    CHECK(p.rules[0].priority == 0);
    CHECK(p.rules[1].priority == 1);
    REQUIRE(p.rules[0].head.size() == 2);
    CHECK(std::holds_alternative<Comprehension>(p.rules[0].head[1].term));
    const auto& comp = std::get<Comprehension>(p.rules[0].head[1].term);
    CHECK(comp.vars == std::vector<std::string>{"B"});
    REQUIRE(comp.body.size() == 1);
    CHECK(comp.body[0].fact().predicate == "edge");
    CHECK(comp.body[0].fact().persistent);
}

TEST_CASE("parse smallest program") {
    Program p = parse_source("type edge(node, node).");
    CHECK(p.declarations.size() == 1);
    CHECK(p.rules.empty());
    CHECK(p.axioms.empty());
    CHECK(!p.declarations[0].linear);
    REQUIRE(p.declarations[0].arg_types.size() == 2);
    CHECK(p.declarations[0].arg_types[0].kind == TypeExpr::Kind::Node);
}

TEST_CASE("parse unit head and unit body") {
    Program p = parse_source(
        "type linear p(node).\n"
        "p(A) -o 1.\n");
    REQUIRE(p.rules.size() == 1);
    CHECK(p.rules[0].head.empty());
}

TEST_CASE("parse aggregate head") {
    Program p = parse_source(
        "type linear price(node, int).\n"
        "type linear count-prices(node).\n"
        "type linear total(node, int).\n"
        "count-prices(A) -o [sum => P | . | price(A, P) | 1 | total(A, P)].\n");
    REQUIRE(p.rules.size() == 1);
    REQUIRE(p.rules[0].head.size() == 1);
    const auto& agg = std::get<Aggregate>(p.rules[0].head[0].term);
    REQUIRE(agg.accums.size() == 1);
    CHECK(agg.accums[0].op == AggregateOp::Sum);
    CHECK(agg.accums[0].var == "P");
    CHECK(agg.vars.empty());
    REQUIRE(agg.body.size() == 1);
    CHECK(agg.body[0].fact().predicate == "price");
    CHECK(agg.head1.empty());
    REQUIRE(agg.head2.size() == 1);
    CHECK(agg.head2[0].predicate == "total");
}

TEST_CASE("parse multi-operator aggregate") {
    Program p = parse_source(
        "type linear neighbor-rank(node, node, float).\n"
        "type linear update(node).\n"
        "type linear sum-ranks(node, float).\n"
        "update(A), !neighbor-rank(A, B, V)\n"
        "  -o [sum => S, count => C | B, V | neighbor-rank(A, B, V) |"
        " neighbor-rank(A, B, V) | sum-ranks(A, S)].\n");
    // declared persistent usage mismatch aside, shape must parse
    const auto& agg = std::get<Aggregate>(p.rules[0].head[0].term);
    REQUIRE(agg.accums.size() == 2);
    CHECK(agg.accums[0].op == AggregateOp::Sum);
    CHECK(agg.accums[1].op == AggregateOp::Count);
    CHECK(agg.vars == std::vector<std::string>{"B", "V"});
}

TEST_CASE("parse selector rule") {
    Program p = parse_source(
        "type edge(node, node).\n"
        "type linear weight(node, node, int).\n"
        "type linear picked(node, node, int).\n"
        "[min => W | !edge(A, B), weight(A, B, W)] -o picked(A, B, W).\n");
    REQUIRE(p.rules.size() == 1);
    REQUIRE(p.rules[0].selector.has_value());
    CHECK(p.rules[0].selector->op == SelectorOp::Min);
    CHECK(p.rules[0].selector->var == "W");
    CHECK(p.rules[0].body.size() == 2);
}

TEST_CASE("parse exists head") {
    Program p = parse_source(
        "type linear do-work(node, int).\n"
        "type linear perform-work(node, int).\n"
        "do-work(A, W) -o exists B. (perform-work(B, W)).\n");
    const auto& e = std::get<ExistsExpr>(p.rules[0].head[0].term);
    CHECK(e.vars == std::vector<std::string>{"B"});
    REQUIRE(e.head.size() == 1);
    CHECK(e.head[0].predicate == "perform-work");
}

TEST_CASE("parse constraints and wildcards") {
    Program p = parse_source(
        "type linear coord(node, int, int).\n"
        "type linear ok(node).\n"
        "coord(A, X, Y), X < 0 || Y < 0, coord(A, _, _) -o ok(A).\n");
    REQUIRE(p.rules.size() == 1);
    const Body& body = p.rules[0].body;
    REQUIRE(body.size() == 3);
    CHECK(body[0].is_fact());
    CHECK(!body[1].is_fact());
    CHECK(body[1].constraint()->binop == BinOp::Or);
    // each '_' is a fresh variable
    const auto& wild = body[2].fact();
    CHECK(wild.args[1]->name != wild.args[2]->name);
}

TEST_CASE("parse const declarations") {
    Program p = parse_source(
        "type linear path(node, int).\n"
        "const used = 1.\n"
        "const damping = 0.85.\n"
        "path(startnode, used).\n");
    CHECK(p.constants.size() == 2);
    CHECK(p.axioms.size() == 1);
    CHECK(p.axioms[0].fact.args[0]->kind == Expr::Kind::ConstRef);
}

TEST_CASE("syntax error reports location") {
    try {
        parse_source("type edge(node node).");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.diagnostic.code == "SyntaxError");
        CHECK(e.diagnostic.loc.line == 1);
    }
}

TEST_CASE("round trip: parse(pretty(p)) is structurally equal") {
    for (const char* src : {kMessageProgram, kVisitProgram}) {
        Program p = parse_source(src);
        Program q = parse_source(pretty_print(p));
        CHECK(dump_ast(p) == dump_ast(q));
    }
}

TEST_CASE("dump_ast is stable line-per-node") {
    Program p = parse_source(kMessageProgram);
    std::string dumped = dump_ast(p);
    CHECK(dumped.find("(decl edge persistent node node)") != std::string::npos);
    CHECK(dumped.find("(rule 0 ") != std::string::npos);
    CHECK(dump_ast(p) == dump_ast(parse_source(kMessageProgram)));
}

// ---------------------------------------------------------------------------
// typecheck
// ---------------------------------------------------------------------------

TEST_CASE("visit and message programs check clean") {
    CHECK(check_source(kVisitProgram).ok());
    CHECK(check_source(kMessageProgram).ok());
}

TEST_CASE("unbound head variable") {
    auto r = check_source(
        "type linear visit(node).\n"
        "visit(A) -o visit(B).\n");
    CHECK(!r.ok());
    CHECK(has_error(r, "UnboundHeadVariable"));
}

TEST_CASE("locality violation names the offending template") {
    auto r = check_source(
        "type linear p(node).\n"
        "type linear q(node).\n"
        "p(A), q(B) -o p(A).\n");
    CHECK(has_error(r, "LocalityViolation"));

    Program prog = parse_source(
        "type linear p(node).\ntype linear q(node).\np(A), q(B) -o p(A).\n");
    auto bad = check_locality(prog.rules[0]);
    REQUIRE(bad.has_value());
    CHECK(*bad == "q");
}

TEST_CASE("locality covers comprehension bodies") {
    auto r = check_source(
        "type edge(node, node).\n"
        "type linear visit(node).\n"
        "type linear go(node).\n"
        "go(A) -o {B | !edge(B, A) | visit(B)}.\n");
    CHECK(has_error(r, "LocalityViolation"));
}

TEST_CASE("ground axiom with constants") {
    auto r = check_source(
        "type linear path(node, int, int).\n"
        "const used = 1.\n"
        "const notused = 0.\n"
        "path(startnode, 0, notused).\n",
        {{"startnode", Value(NodeId{3})}});
    REQUIRE(r.ok());
    REQUIRE(r.checked->ground_axioms.size() == 1);
    const Fact& f = r.checked->ground_axioms[0];
    CHECK(f.home() == NodeId{3});
    CHECK(f.args[1] == Value(int64_t{0}));
    CHECK(f.args[2] == Value(int64_t{0}));
}

TEST_CASE("unresolved const is a check error") {
    auto r = check_source(
        "type linear path(node, int).\n"
        "path(startnode, 0).\n");
    CHECK(has_error(r, "UnknownConst"));
}

TEST_CASE("non-ground axiom") {
    auto r = check_source(
        "type linear p(node, int).\n"
        "p(@1, X).\n");
    CHECK(has_error(r, "NonGroundAxiom"));
}

TEST_CASE("unknown predicate and arity mismatch") {
    CHECK(has_error(check_source("type linear p(node).\nq(@1).\n"), "UnknownPredicate"));
    CHECK(has_error(check_source("type linear p(node, int).\np(@1).\n"), "TypeMismatch"));
}

TEST_CASE("mixed arithmetic without cast is rejected") {
    auto r = check_source(
        "type linear v(node, float).\n"
        "type linear n(node, int).\n"
        "v(A, V), n(A, X), V > X -o v(A, V).\n");
    CHECK(has_error(r, "TypeMismatch"));
    auto ok = check_source(
        "type linear v(node, float).\n"
        "type linear n(node, int).\n"
        "v(A, V), n(A, X), V > float(X) -o v(A, V).\n");
    CHECK(ok.ok());
}

TEST_CASE("comprehension variable shadowing is an error") {
    auto r = check_source(
        "type edge(node, node).\n"
        "type linear visit(node).\n"
        "visit(B), visit(A) -o {B | !edge(A, B) | visit(B)}.\n");
    CHECK(has_error(r, "ShadowedVariable"));
}

TEST_CASE("persistence marker must match declaration") {
    CHECK(has_error(check_source("type edge(node, node).\nedge(@1, @2).\n"), "TypeMismatch"));
    CHECK(has_error(check_source("type linear v(node).\n!v(@1).\n"), "TypeMismatch"));
}

TEST_CASE("checking twice yields identical error lists") {
    Program prog = parse_source(
        "type linear p(node).\n"
        "p(A) -o p(B).\n"
        "q(@2).\n");
    auto r1 = check_program(prog, {});
    auto r2 = check_program(prog, {});
    REQUIRE(r1.errors.size() == r2.errors.size());
    for (size_t i = 0; i < r1.errors.size(); ++i) {
        CHECK(r1.errors[i].code == r2.errors[i].code);
        CHECK(r1.errors[i].message == r2.errors[i].message);
    }
}

TEST_CASE("selector variable must be bound") {
    auto r = check_source(
        "type linear w(node, int).\n"
        "type linear out(node, int).\n"
        "[min => Z | w(A, W)] -o out(A, W).\n");
    CHECK(!r.ok());
}

TEST_CASE("cli const literal parsing") {
    CHECK(*parse_const_literal("@7") == Value(NodeId{7}));
    CHECK(*parse_const_literal("42") == Value(int64_t{42}));
    CHECK(*parse_const_literal("-3") == Value(int64_t{-3}));
    CHECK(*parse_const_literal("0.5") == Value(0.5));
    CHECK(*parse_const_literal("true") == Value(true));
    CHECK(*parse_const_literal("hello") == Value(std::string("hello")));
}

// ---------------------------------------------------------------------------
// database
// ---------------------------------------------------------------------------

TEST_CASE("linear facts are a multiset") {
    NodeDatabase db(NodeId{1});
    Fact visit{"visit", {Value(NodeId{1})}, false};
    db.assert_fact(visit);
    db.assert_fact(visit);
    CHECK(db.multiplicity(visit) == 2);
    db.retract_fact(visit);
    CHECK(db.multiplicity(visit) == 1);
    db.retract_fact(visit);
    CHECK(db.multiplicity(visit) == 0);
    CHECK_THROWS_AS(db.retract_fact(visit), DatabaseError);
}

TEST_CASE("persistent facts are a set") {
    NodeDatabase db(NodeId{1});
    Fact edge{"edge", {Value(NodeId{1}), Value(NodeId{2})}, true};
    db.assert_fact(edge);
    db.assert_fact(edge);
    CHECK(db.persistent_bucket("edge").size() == 1);
    CHECK(db.contains_persistent(edge));
    CHECK_THROWS_AS(db.retract_fact(edge), DatabaseError);
}

TEST_CASE("wrong node is rejected") {
    NodeDatabase db(NodeId{1});
    Fact f{"visit", {Value(NodeId{2})}, false};
    CHECK_THROWS_AS(db.assert_fact(f), DatabaseError);
}

TEST_CASE("visit axioms at node 2") {
    NodeDatabase db(NodeId{2});
    db.assert_fact({"unvisited", {Value(NodeId{2})}, false});
    db.assert_fact({"edge", {Value(NodeId{2}), Value(NodeId{3})}, true});
    db.assert_fact({"edge", {Value(NodeId{2}), Value(NodeId{4})}, true});
    CHECK(db.linear_count() == 1);
    CHECK(db.persistent_bucket("edge").size() == 2);
    auto lines = db.dump_lines();
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "!edge(@2, @3) x1");
    CHECK(lines[1] == "!edge(@2, @4) x1");
    CHECK(lines[2] == "unvisited(@2) x1");
}

// ---------------------------------------------------------------------------
// expressions
// ---------------------------------------------------------------------------

TEST_CASE("constraint evaluation") {
    std::map<std::string, Value> consts;
    EvalEnv env{&consts, 4};
    Bindings b;
    b.bind("D1", Value(int64_t{3}));
    b.bind("D2", Value(int64_t{3}));

    Program p = parse_source(
        "type linear t(node, int, int).\n"
        "t(A, D1, D2), D1 <= D2 -o t(A, D1, D2).\n");
    const Expr& cmp = *p.rules[0].body[1].constraint();
    CHECK(eval_expr(cmp, b, env) == Value(true));

    Program q = parse_source(
        "type linear r(node, float).\n"
        "type linear s(node).\n"
        "s(A) -o r(A, 1.0 / float(@world)).\n");
    const Expr& init = *std::get<FactTemplate>(q.rules[0].head[0].term).args[1];
    CHECK(eval_expr(init, b, env) == Value(0.25));
}

TEST_CASE("disequality disjunction") {
    std::map<std::string, Value> consts;
    EvalEnv env{&consts, 0};
    Bindings b;
    b.bind("X", Value(int64_t{1}));
    b.bind("X1", Value(int64_t{1}));
    b.bind("Y", Value(int64_t{2}));
    b.bind("Y1", Value(int64_t{2}));
    Program p = parse_source(
        "type linear t(node, int, int, int, int).\n"
        "t(A, X, Y, X1, Y1), X <> X1 || Y <> Y1 -o 1.\n");
    CHECK(eval_expr(*p.rules[0].body[1].constraint(), b, env) == Value(false));
}

TEST_CASE("division by zero raises") {
    std::map<std::string, Value> consts;
    EvalEnv env{&consts, 0};
    Bindings b;
    Program p = parse_source(
        "type linear t(node, int).\n"
        "t(A, X), X = 1 / 0 -o 1.\n");
    const Expr& e = *p.rules[0].body[1].constraint();
    CHECK_THROWS_AS(eval_expr(*e.operands[1], b, env), EvalError);
}

TEST_CASE("pattern matching binds and destructures") {
    std::map<std::string, Value> consts;
    EvalEnv env{&consts, 0};
    Bindings b;
    Program p = parse_source(
        "type linear m(node, list node).\n"
        "m(A, [B | L]) -o 1.\n");
    const Expr& pat = *p.rules[0].body[0].fact().args[1];
    Value route = Value::list({Value(NodeId{3}), Value(NodeId{4})});
    REQUIRE(match_pattern(pat, route, b, env));
    CHECK(*b.lookup("B") == Value(NodeId{3}));
    CHECK(*b.lookup("L") == Value::list({Value(NodeId{4})}));

    Bindings b2;
    CHECK(!match_pattern(pat, Value::list({}), b2, env));
}

TEST_CASE("body plan orders constraints after binding templates") {
    Program p = parse_source(
        "type linear d(node, int).\n"
        "type linear e(node, int).\n"
        "d(A, X), X > Y, e(A, Y) -o 1.\n");
    std::set<std::string> bound;
    BodyPlan plan;
    std::vector<Diagnostic> errors;
    REQUIRE(compile_body_plan(p.rules[0].body, bound, plan, errors));
    REQUIRE(plan.steps.size() == 3);
    CHECK(plan.steps[0].kind == PlanStep::Kind::Match);
    CHECK(plan.steps[1].kind == PlanStep::Kind::Match);
    CHECK(plan.steps[2].kind == PlanStep::Kind::Constraint);
    CHECK(bound == std::set<std::string>{"A", "X", "Y"});
}

TEST_CASE("body plan turns V = expr into a binding step") {
    Program p = parse_source(
        "type linear d(node, int).\n"
        "type linear out(node, int).\n"
        "d(A, X), Y = X + 1 -o out(A, Y).\n");
    std::set<std::string> bound;
    BodyPlan plan;
    std::vector<Diagnostic> errors;
    REQUIRE(compile_body_plan(p.rules[0].body, bound, plan, errors));
    REQUIRE(plan.steps.size() == 2);
    CHECK(plan.steps[1].kind == PlanStep::Kind::Bind);
    CHECK(plan.steps[1].bind_var == "Y");
}
