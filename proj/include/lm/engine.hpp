#pragma once

#include <functional>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "lm/database.hpp"
#include "lm/eval.hpp"
#include "lm/plan.hpp"
#include "lm/typecheck.hpp"

namespace lm {

// Result of one committed rule firing: consumed linear facts, derived linear
// facts (args[0] names the target node) and derived persistent facts.
struct DerivationOutcome {
    int rule_index = -1;
    std::vector<Fact> consumed;
    std::vector<Fact> derived_linear;
    std::vector<Fact> derived_persistent;
    std::map<std::string, Value> bindings;  // rule-body bindings at commit
};

struct EngineContext {
    uint64_t world_size = 0;
    std::function<NodeId()> fresh_node;  // allocator for exists-created nodes
    uint64_t seed = 0;                   // random selector seed
};

// One continuation frame: the untried candidate alternatives for a body
// template plus restore marks for the bindings trail and the consumed set.
struct Frame {
    bool linear = false;
    size_t step = 0;  // plan step index of the template
    std::vector<const Fact*> alts;
    size_t next = 0;  // first untried alternative
    size_t bind_mark = 0;
    size_t xi_mark = 0;
};

// All stored facts of the template's predicate still available for matching:
// FIFO bucket order, minus the already-consumed handles for linear templates.
std::vector<const Fact*> candidates(const NodeDatabase& db, const FactTemplate& tmpl,
                                    const std::vector<const Fact*>& consumed);

// Body matcher over a frozen database snapshot. Matching never mutates the
// database; consumption is tracked as handles in `xi`. The continuation
// stack supports finding further solutions (resume) and comprehension-style
// stack fixing after a committed application.
class Matcher {
public:
    Matcher(const NodeDatabase& db, const BodyPlan& plan, Bindings& b,
            std::vector<const Fact*>& xi, const EvalEnv& env)
        : db_(db), plan_(plan), b_(b), xi_(xi), env_(env) {}

    bool start();   // first solution, from an empty stack
    bool resume();  // backtrack into the stack and find the next solution

    // Keeps the persistent prefix and the first linear frame only, removes
    // `consumed` from that frame's remaining alternatives, and commits the
    // current consumption so backtracking cannot undo completed applications.
    void fix_stack(const std::vector<const Fact*>& consumed);

    const std::vector<Frame>& stack() const { return stack_; }

private:
    bool run(size_t step);
    bool advance(size_t& resume_step);

    const NodeDatabase& db_;
    const BodyPlan& plan_;
    Bindings& b_;
    std::vector<const Fact*>& xi_;
    const EvalEnv& env_;
    std::vector<Frame> stack_;
};

class Engine {
public:
    Engine(const CheckedProgram& prog, EngineContext ctx);

    // Tries rules in priority order; returns the first rule's outcome
    // (committed choice) or nullopt at quiescence.
    std::optional<DerivationOutcome> run_node(const NodeDatabase& db);

    // Single-rule attempt (used by tests and the verification harness).
    std::optional<DerivationOutcome> apply_rule(const NodeDatabase& db, size_t rule_index);

    // Whether the rule body alone has any match (no head derivation).
    bool body_matches(const NodeDatabase& db, size_t rule_index);

    // Whether a comprehension/aggregate body (head term `term_index` of rule
    // `rule_index`) matches under the given outer bindings.
    bool comp_body_matches(const NodeDatabase& db, size_t rule_index, size_t term_index,
                           const std::map<std::string, Value>& outer);

    const CheckedProgram& program() const { return prog_; }

private:
    struct CompiledRule {
        const RuleAst* rule = nullptr;
        BodyPlan body;
        std::vector<BodyPlan> head_plans;  // per head term; empty plan if plain
    };

    DerivationOutcome derive_head(const NodeDatabase& db, const CompiledRule& cr, Bindings& b,
                                  std::vector<const Fact*>& xi);
    void derive_sub_head(const SubHead& sh, Bindings& b, DerivationOutcome& out);
    void match_comprehension(const NodeDatabase& db, const Comprehension& comp,
                             const BodyPlan& plan, Bindings& b, std::vector<const Fact*>& xi,
                             DerivationOutcome& out);
    void apply_aggregate(const NodeDatabase& db, const Aggregate& agg, const BodyPlan& plan,
                         size_t rule_index, Bindings& b, std::vector<const Fact*>& xi,
                         DerivationOutcome& out);
    void instantiate_exists(const ExistsExpr& ee, Bindings& b, DerivationOutcome& out);
    std::optional<DerivationOutcome> apply_selector(const NodeDatabase& db,
                                                    const CompiledRule& cr);
    Fact instantiate(const FactTemplate& tmpl, Bindings& b) const;

    const CheckedProgram& prog_;
    EngineContext ctx_;
    EvalEnv env_;
    std::mt19937_64 rng_;
    std::vector<CompiledRule> rules_;
};

}  // namespace lm
