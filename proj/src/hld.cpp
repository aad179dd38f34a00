#include "lm/hld.hpp"

#include <algorithm>

namespace lm {

namespace {

struct Solution {
    std::map<std::string, Value> binds;
    std::vector<const Fact*> xi;
};

// Every complete match of `plan` under the outer bindings, with `consumed`
// already unavailable. The matcher's resume() walks the full search space.
std::vector<Solution> all_matches(const NodeDatabase& db, const BodyPlan& plan,
                                  const std::map<std::string, Value>& outer,
                                  const std::vector<const Fact*>& consumed, const EvalEnv& env) {
    Bindings b;
    for (const auto& [k, v] : outer) b.bind(k, v);
    std::vector<const Fact*> xi = consumed;
    Matcher m(db, plan, b, xi, env);
    std::vector<Solution> sols;
    for (bool ok = m.start(); ok; ok = m.resume()) sols.push_back({b.snapshot(), xi});
    return sols;
}

struct Enumerator {
    const NodeDatabase& db;
    const CheckedProgram& prog;
    const RuleAst& rule;
    size_t rule_index;
    const BodyPlan& body_plan;
    const std::vector<BodyPlan>& head_plans;
    EvalEnv env;
    size_t bound;
    uint64_t first_fresh;
    HldOutcomeSet results;

    Fact instantiate(const FactTemplate& tmpl, const std::map<std::string, Value>& binds) const {
        Bindings b;
        for (const auto& [k, v] : binds) b.bind(k, v);
        const PredicateDecl* decl = prog.predicate(tmpl.predicate);
        Fact f;
        f.predicate = tmpl.predicate;
        f.persistent = decl && !decl->linear;
        for (const auto& arg : tmpl.args) f.args.push_back(eval_expr(*arg, b, env));
        return f;
    }

    void push_sub_head(const SubHead& sh, const std::map<std::string, Value>& binds,
                       std::vector<Fact>& lin, std::vector<Fact>& per) const {
        for (const FactTemplate& t : sh) {
            Fact f = instantiate(t, binds);
            (f.persistent ? per : lin).push_back(std::move(f));
        }
    }

    void record(const std::vector<const Fact*>& xi, const std::vector<Fact>& lin,
                const std::vector<Fact>& per) {
        CanonicalOutcome c;
        for (const Fact* f : xi) c.consumed.push_back(f->to_string());
        for (const Fact& f : lin) c.derived_linear.push_back(f.to_string());
        for (const Fact& f : per) c.derived_persistent.push_back(f.to_string());
        std::sort(c.consumed.begin(), c.consumed.end());
        std::sort(c.derived_linear.begin(), c.derived_linear.end());
        std::sort(c.derived_persistent.begin(), c.derived_persistent.end());
        results.insert(std::move(c));
    }

    void derive(size_t term, const std::map<std::string, Value>& binds,
                std::vector<const Fact*> xi, std::vector<Fact> lin, std::vector<Fact> per,
                uint64_t fresh) {
        if (term == rule.head.size()) {
            record(xi, lin, per);
            return;
        }
        const HeadTerm& ht = rule.head[term];
        if (const auto* f = std::get_if<FactTemplate>(&ht.term)) {
            Fact inst = instantiate(*f, binds);
            (inst.persistent ? per : lin).push_back(std::move(inst));
            derive(term + 1, binds, std::move(xi), std::move(lin), std::move(per), fresh);
        } else if (const auto* c = std::get_if<Comprehension>(&ht.term)) {
            unfold_comp(term, *c, binds, std::move(xi), std::move(lin), std::move(per), fresh, 0);
        } else if (const auto* a = std::get_if<Aggregate>(&ht.term)) {
            std::vector<std::optional<Value>> accs(a->accums.size());
            std::vector<int64_t> counts(a->accums.size(), 0);
            unfold_agg(term, *a, binds, std::move(xi), std::move(lin), std::move(per), fresh, 0,
                       accs, counts, 0);
        } else {
            const auto& e = std::get<ExistsExpr>(ht.term);
            std::map<std::string, Value> b2 = binds;
            for (const std::string& v : e.vars) b2[v] = Value(NodeId{fresh++});
            push_sub_head(e.head, b2, lin, per);
            derive(term + 1, binds, std::move(xi), std::move(lin), std::move(per), fresh);
        }
    }

    // Comprehension def-unfolding: at every depth either stop or apply the
    // sub-rule once more; both branches are admissible outcomes.
    void unfold_comp(size_t term, const Comprehension& c,
                     const std::map<std::string, Value>& binds, std::vector<const Fact*> xi,
                     std::vector<Fact> lin, std::vector<Fact> per, uint64_t fresh, size_t depth) {
        derive(term + 1, binds, xi, lin, per, fresh);
        if (depth >= bound) return;
        for (const Solution& s : all_matches(db, head_plans[term], binds, xi, env)) {
            std::vector<Fact> lin2 = lin, per2 = per;
            push_sub_head(c.head, s.binds, lin2, per2);
            unfold_comp(term, c, binds, s.xi, std::move(lin2), std::move(per2), fresh, depth + 1);
        }
    }

    void unfold_agg(size_t term, const Aggregate& a, const std::map<std::string, Value>& binds,
                    std::vector<const Fact*> xi, std::vector<Fact> lin, std::vector<Fact> per,
                    uint64_t fresh, size_t depth, const std::vector<std::optional<Value>>& accs,
                    const std::vector<int64_t>& counts, size_t apps) {
        // stop branch: derive head2 with the accumulators folded so far
        bool minmax_empty = false;
        if (apps == 0)
            for (const AggregateAccum& acc : a.accums)
                if (acc.op == AggregateOp::Min || acc.op == AggregateOp::Max) minmax_empty = true;
        {
            std::vector<Fact> lin2 = lin, per2 = per;
            if (!minmax_empty) {
                std::map<std::string, Value> b2 = binds;
                const auto& types = prog.rule_vars[rule_index];
                for (size_t i = 0; i < a.accums.size(); ++i) {
                    const AggregateAccum& acc = a.accums[i];
                    if (acc.op == AggregateOp::Count) {
                        b2[acc.var] = Value(counts[i]);
                    } else if (accs[i]) {
                        b2[acc.var] = *accs[i];
                    } else {
                        auto it = types.find(acc.var);
                        bool flt = it != types.end() && it->second.kind == TypeExpr::Kind::Float;
                        b2[acc.var] = flt ? Value(0.0) : Value(int64_t{0});
                    }
                }
                push_sub_head(a.head2, b2, lin2, per2);
            }
            derive(term + 1, binds, xi, std::move(lin2), std::move(per2), fresh);
        }
        if (depth >= bound) return;
        for (const Solution& s : all_matches(db, head_plans[term], binds, xi, env)) {
            std::vector<std::optional<Value>> accs2 = accs;
            std::vector<int64_t> counts2 = counts;
            for (size_t i = 0; i < a.accums.size(); ++i) {
                const AggregateAccum& acc = a.accums[i];
                if (acc.op == AggregateOp::Count) {
                    ++counts2[i];
                    continue;
                }
                const Value& v = s.binds.at(acc.var);
                switch (acc.op) {
                    case AggregateOp::Sum:
                        if (!accs2[i]) {
                            accs2[i] = v;
                        } else if (accs2[i]->is_int()) {
                            accs2[i] = Value(accs2[i]->as_int() + v.as_int());
                        } else {
                            accs2[i] = Value(accs2[i]->as_float() + v.as_float());
                        }
                        break;
                    case AggregateOp::Min:
                        if (!accs2[i] || v < *accs2[i]) accs2[i] = v;
                        break;
                    case AggregateOp::Max:
                        if (!accs2[i] || *accs2[i] < v) accs2[i] = v;
                        break;
                    case AggregateOp::Count:
                        break;
                }
            }
            std::vector<Fact> lin2 = lin, per2 = per;
            push_sub_head(a.head1, s.binds, lin2, per2);
            unfold_agg(term, a, binds, s.xi, std::move(lin2), std::move(per2), fresh, depth + 1,
                       accs2, counts2, apps + 1);
        }
    }
};

}  // namespace

CanonicalOutcome canonicalize(const DerivationOutcome& out) {
    CanonicalOutcome c;
    for (const Fact& f : out.consumed) c.consumed.push_back(f.to_string());
    for (const Fact& f : out.derived_linear) c.derived_linear.push_back(f.to_string());
    for (const Fact& f : out.derived_persistent) c.derived_persistent.push_back(f.to_string());
    std::sort(c.consumed.begin(), c.consumed.end());
    std::sort(c.derived_linear.begin(), c.derived_linear.end());
    std::sort(c.derived_persistent.begin(), c.derived_persistent.end());
    return c;
}

HldOutcomeSet hld_apply(const NodeDatabase& db, const CheckedProgram& prog, size_t rule_index,
                        size_t bound, uint64_t world_size, uint64_t first_fresh) {
    if (db.linear_count() > bound)
        throw HldError("linear store of size " + std::to_string(db.linear_count()) +
                       " exceeds enumeration bound " + std::to_string(bound));
    const RuleAst& rule = prog.program.rules[rule_index];
    std::vector<Diagnostic> ignored;
    BodyPlan body_plan;
    std::set<std::string> bound_vars;
    compile_body_plan(rule.body, bound_vars, body_plan, ignored);
    std::vector<BodyPlan> head_plans;
    for (const HeadTerm& term : rule.head) {
        BodyPlan plan;
        std::set<std::string> inner = bound_vars;
        if (const auto* c = std::get_if<Comprehension>(&term.term))
            compile_body_plan(c->body, inner, plan, ignored);
        else if (const auto* a = std::get_if<Aggregate>(&term.term))
            compile_body_plan(a->body, inner, plan, ignored);
        head_plans.push_back(std::move(plan));
    }

    Enumerator e{db,        prog, rule,       rule_index,
                 body_plan, head_plans, EvalEnv{&prog.consts, world_size},
                 bound,     first_fresh, {}};
    for (const Solution& s : all_matches(db, body_plan, {}, {}, e.env))
        e.derive(0, s.binds, s.xi, {}, {}, first_fresh);
    return std::move(e.results);
}

bool check_soundness(const DerivationOutcome& lld, const HldOutcomeSet& hld) {
    return hld.count(canonicalize(lld)) > 0;
}

}  // namespace lm
