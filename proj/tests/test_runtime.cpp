#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "lm/parser.hpp"
#include "lm/runtime.hpp"
#include "lm/typecheck.hpp"

using namespace lm;

namespace {

CheckedProgram checked(const std::string& src,
                       const std::map<std::string, Value>& consts = {}) {
    auto r = check_program(parse_source(src), consts);
    REQUIRE_MESSAGE(r.ok(), (r.errors.empty() ? "" : r.errors[0].render()));
    return std::move(*r.checked);
}

std::vector<std::string> final_db(const CheckedProgram& p, RunOptions opts = {}) {
    auto g = load(p);
    RunStats stats = run_to_quiescence(*g, p, opts);
    REQUIRE(stats.quiesced);
    return g->dump_db();
}

const char* kVisitProgram = R"(
type edge(node, node).
type linear visit(node).
type linear unvisited(node).
type linear visited(node).
visit(A), unvisited(A) -o visited(A), {B | !edge(A, B) | visit(B)}.
visit(A), visited(A) -o visited(A).
!edge(@1, @2). !edge(@2, @3). !edge(@1, @4). !edge(@2, @4).
unvisited(@1). unvisited(@2). unvisited(@3). unvisited(@4).
visit(@1).
)";

const char* kMessageProgram = R"(
type edge(node, node).
type linear message(node, string, list node).
message(A, Content, [B | L]), !edge(A, B) -o message(B, Content, L).
message(A, Content, []) -o 1.
!edge(@1, @2). !edge(@2, @3). !edge(@3, @4). !edge(@1, @3).
message(@1, 'Hello World', [@3, @4]).
)";

}  // namespace

TEST_CASE("load materializes axiom nodes") {
    CheckedProgram p = checked(kMessageProgram);
    auto g = load(p);
    CHECK(g->node_count() == 4);
    Graph::Node* n1 = g->find(NodeId{1});
    REQUIRE(n1 != nullptr);
    CHECK(n1->db.linear_count() == 1);
    CHECK(n1->db.persistent_bucket("edge").size() == 2);
}

TEST_CASE("empty program quiesces immediately") {
    CheckedProgram p = checked("type linear v(node).\nv(A) -o 1.\n");
    auto g = load(p);
    RunStats stats = run_to_quiescence(*g, p, {});
    CHECK(stats.quiesced);
    CHECK(stats.firings == 0);
    CHECK(g->dump_db().empty());
}

TEST_CASE("visit program marks every reachable node") {
    CheckedProgram p = checked(kVisitProgram);
    auto lines = final_db(p);
    std::vector<std::string> expected = {
        "node 1: !edge(@1, @2) x1", "node 1: !edge(@1, @4) x1", "node 1: visited(@1) x1",
        "node 2: !edge(@2, @3) x1", "node 2: !edge(@2, @4) x1", "node 2: visited(@2) x1",
        "node 3: visited(@3) x1",   "node 4: visited(@4) x1"};
    CHECK(lines == expected);
}

TEST_CASE("visit program is confluent across workers and seeds") {
    CheckedProgram p = checked(kVisitProgram);
    auto reference = final_db(p);
    for (int workers : {1, 2, 4}) {
        for (uint64_t seed : {0u, 1u, 2u}) {
            RunOptions opts;
            opts.workers = workers;
            opts.seed = seed;
            CHECK(final_db(p, opts) == reference);
        }
    }
}

TEST_CASE("message program consumes the message and fires along the route") {
    CheckedProgram p = checked(kMessageProgram);
    auto g = load(p);
    RunOptions opts;
    opts.trace = true;
    RunStats stats = run_to_quiescence(*g, p, opts);
    REQUIRE(stats.quiesced);

    // only the edges survive
    for (const std::string& line : g->dump_db()) CHECK(line.find("edge") != std::string::npos);

    // firing order @1 -> @3 -> @4
    std::vector<uint64_t> fired_at;
    for (const std::string& line : stats.trace_lines) {
        std::istringstream in(line);
        std::string word;
        uint64_t id;
        in >> word >> id;
        fired_at.push_back(id);
    }
    CHECK(fired_at == std::vector<uint64_t>{1, 3, 4});
}

TEST_CASE("routing preserves per-sender FIFO order") {
    // @1 emits two facts to @2 in one firing; @2 consumes them in order
    CheckedProgram p = checked(R"(
type linear go(node).
type linear item(node, int).
type linear got(node, int, int).
go(A) -o item(@2, 1), item(@2, 2).
item(A, X), item(A, Y) -o got(A, X, Y).
go(@1).
)");
    auto lines = final_db(p);
    CHECK(lines == std::vector<std::string>{"node 2: got(@2, 1, 2) x1"});
}

TEST_CASE("max-steps aborts a diverging program") {
    CheckedProgram p = checked(R"(
type linear tick(node).
tick(A) -o tick(A).
tick(@1).
)");
    auto g = load(p);
    RunOptions opts;
    opts.max_steps = 100;
    RunStats stats = run_to_quiescence(*g, p, opts);
    CHECK(!stats.quiesced);
    CHECK(stats.firings >= 100);
}

TEST_CASE("exists-created nodes appear in the final database") {
    CheckedProgram p = checked(R"(
type linear do-work(node, int).
type linear perform-work(node, int).
do-work(A, W) -o exists B. (perform-work(B, W)).
do-work(@1, 9).
)");
    auto lines = final_db(p);
    REQUIRE(lines.size() == 1);
    CHECK(lines[0] == "node 2: perform-work(@2, 9) x1");
}

TEST_CASE("audit mode sees zero conservation violations") {
    for (const char* src : {kVisitProgram, kMessageProgram}) {
        CheckedProgram p = checked(src);
        auto g = load(p);
        RunOptions opts;
        opts.audit = true;
        RunStats stats = run_to_quiescence(*g, p, opts);
        CHECK(stats.quiesced);
        CHECK(stats.audit_violations == 0);
    }
}

TEST_CASE("quiescence leaves every inbox empty and every node quiet") {
    CheckedProgram p = checked(kVisitProgram);
    auto g = load(p);
    run_to_quiescence(*g, p, {});
    EngineContext ctx;
    ctx.world_size = g->node_count();
    Engine eng(p, ctx);
    for (uint64_t id : g->node_ids()) {
        Graph::Node* n = g->find(NodeId{id});
        CHECK(n->inbox.empty());
        CHECK(!eng.run_node(n->db).has_value());
    }
}

TEST_CASE("stealing keeps a starved worker busy") {
    // all real work lives on the first worker's half of the id range
    std::ostringstream src;
    src << "type linear t(node, int).\n"
        << "t(A, X), X > 0 -o t(A, X - 1).\n";
    for (int i = 1; i <= 50; ++i) src << "t(@" << i << ", 200).\n";
    for (int i = 51; i <= 100; ++i) src << "t(@" << i << ", 0).\n";
    CheckedProgram p = checked(src.str());
    auto g = load(p);
    RunOptions opts;
    opts.workers = 2;
    RunStats stats = run_to_quiescence(*g, p, opts);
    REQUIRE(stats.quiesced);
    CHECK(stats.firings == 50 * 200);
    REQUIRE(stats.worker_firings.size() == 2);
    CHECK(stats.worker_firings[0] > 0);
    CHECK(stats.worker_firings[1] > 0);
}

TEST_CASE("constants from the command line reach axioms and rules") {
    CheckedProgram p = checked(R"(
type linear path(node, int, int).
const used = 1.
const notused = 0.
path(startnode, 0, notused).
path(A, D, used), path(A, D, notused) -o path(A, D, used).
)",
                               {{"startnode", Value(NodeId{3})}});
    auto lines = final_db(p);
    CHECK(lines == std::vector<std::string>{"node 3: path(@3, 0, 0) x1"});
}
