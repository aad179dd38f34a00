#include "lm/engine.hpp"

#include <algorithm>
#include <stdexcept>

namespace lm {

namespace {

Value fold_add(const Value& a, const Value& b) {
    if (a.is_int() && b.is_int()) return Value(a.as_int() + b.as_int());
    return Value(a.as_float() + b.as_float());
}

Value zero_of(const TypeExpr& t) {
    return t.kind == TypeExpr::Kind::Float ? Value(0.0) : Value(int64_t{0});
}

}  // namespace

std::vector<const Fact*> candidates(const NodeDatabase& db, const FactTemplate& tmpl,
                                    const std::vector<const Fact*>& consumed) {
    const auto& bucket = tmpl.persistent ? db.persistent_bucket(tmpl.predicate)
                                         : db.linear_bucket(tmpl.predicate);
    std::vector<const Fact*> out;
    out.reserve(bucket.size());
    for (const Fact& f : bucket) {
        if (!tmpl.persistent &&
            std::find(consumed.begin(), consumed.end(), &f) != consumed.end())
            continue;
        out.push_back(&f);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Matcher
// ---------------------------------------------------------------------------

bool Matcher::start() {
    stack_.clear();
    return run(0);
}

bool Matcher::resume() {
    size_t step = 0;
    if (!advance(step)) return false;
    return run(step);
}

// Tries the untried alternatives of the top frame, popping exhausted frames.
// On success leaves the stack consistent and reports the next plan step.
bool Matcher::advance(size_t& resume_step) {
    while (!stack_.empty()) {
        Frame& f = stack_.back();
        b_.undo_to(f.bind_mark);
        xi_.resize(f.xi_mark);
        const FactTemplate& tmpl = *plan_.steps[f.step].tmpl;
        while (f.next < f.alts.size()) {
            const Fact* cand = f.alts[f.next++];
            size_t m = b_.mark();
            bool ok = true;
            for (size_t k = 0; k < tmpl.args.size() && ok; ++k)
                ok = match_pattern(*tmpl.args[k], cand->args[k], b_, env_);
            if (ok) {
                if (f.linear) xi_.push_back(cand);
                resume_step = f.step + 1;
                return true;
            }
            b_.undo_to(m);
        }
        stack_.pop_back();
    }
    return false;
}

bool Matcher::run(size_t step) {
    while (true) {
        if (step == plan_.steps.size()) return true;
        const PlanStep& s = plan_.steps[step];
        switch (s.kind) {
            case PlanStep::Kind::Match: {
                Frame f;
                f.linear = !s.tmpl->persistent;
                f.step = step;
                f.alts = candidates(db_, *s.tmpl, xi_);
                f.bind_mark = b_.mark();
                f.xi_mark = xi_.size();
                stack_.push_back(std::move(f));
                if (!advance(step)) return false;
                break;
            }
            case PlanStep::Kind::Constraint: {
                Value v = eval_expr(*s.expr, b_, env_);
                if (v == Value(true)) {
                    ++step;
                } else if (!advance(step)) {
                    return false;
                }
                break;
            }
            case PlanStep::Kind::Bind:
                b_.bind(s.bind_var, eval_expr(*s.expr, b_, env_));
                ++step;
                break;
        }
    }
}

void Matcher::fix_stack(const std::vector<const Fact*>& consumed) {
    // Keep the persistent prefix plus the first linear frame, if any.
    size_t keep = stack_.size();
    for (size_t k = 0; k < stack_.size(); ++k) {
        if (stack_[k].linear) {
            keep = k + 1;
            break;
        }
    }
    stack_.resize(keep);
    if (!stack_.empty() && stack_.back().linear) {
        Frame& f = stack_.back();
        f.alts.erase(std::remove_if(f.alts.begin() + static_cast<long>(f.next), f.alts.end(),
                                    [&](const Fact* p) {
                                        return std::find(consumed.begin(), consumed.end(), p) !=
                                               consumed.end();
                                    }),
                     f.alts.end());
    }
    // Commit the completed application's consumption: backtracking must not
    // resurrect facts consumed by already-derived sub-heads.
    for (Frame& f : stack_) f.xi_mark = xi_.size();
}

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

Engine::Engine(const CheckedProgram& prog, EngineContext ctx)
    : prog_(prog), ctx_(std::move(ctx)), env_{&prog.consts, ctx.world_size}, rng_(ctx.seed) {
    std::vector<Diagnostic> ignored;
    for (const RuleAst& rule : prog_.program.rules) {
        CompiledRule cr;
        cr.rule = &rule;
        std::set<std::string> bound;
        compile_body_plan(rule.body, bound, cr.body, ignored);
        for (const HeadTerm& term : rule.head) {
            BodyPlan plan;
            std::set<std::string> inner = bound;
            if (const auto* c = std::get_if<Comprehension>(&term.term))
                compile_body_plan(c->body, inner, plan, ignored);
            else if (const auto* a = std::get_if<Aggregate>(&term.term))
                compile_body_plan(a->body, inner, plan, ignored);
            cr.head_plans.push_back(std::move(plan));
        }
        rules_.push_back(std::move(cr));
    }
}

std::optional<DerivationOutcome> Engine::run_node(const NodeDatabase& db) {
    for (size_t r = 0; r < rules_.size(); ++r) {
        auto out = apply_rule(db, r);
        if (out) return out;
    }
    return std::nullopt;
}

std::optional<DerivationOutcome> Engine::apply_rule(const NodeDatabase& db, size_t rule_index) {
    const CompiledRule& cr = rules_[rule_index];
    if (cr.rule->selector) {
        auto out = apply_selector(db, cr);
        if (out) out->rule_index = static_cast<int>(rule_index);
        return out;
    }
    Bindings b;
    std::vector<const Fact*> xi;
    Matcher m(db, cr.body, b, xi, env_);
    if (!m.start()) return std::nullopt;
    DerivationOutcome out = derive_head(db, cr, b, xi);
    out.rule_index = static_cast<int>(rule_index);
    return out;
}

bool Engine::body_matches(const NodeDatabase& db, size_t rule_index) {
    Bindings b;
    std::vector<const Fact*> xi;
    Matcher m(db, rules_[rule_index].body, b, xi, env_);
    return m.start();
}

bool Engine::comp_body_matches(const NodeDatabase& db, size_t rule_index, size_t term_index,
                               const std::map<std::string, Value>& outer) {
    Bindings b;
    for (const auto& [k, v] : outer) b.bind(k, v);
    std::vector<const Fact*> xi;
    Matcher m(db, rules_[rule_index].head_plans[term_index], b, xi, env_);
    return m.start();
}

Fact Engine::instantiate(const FactTemplate& tmpl, Bindings& b) const {
    const PredicateDecl* decl = prog_.predicate(tmpl.predicate);
    Fact f;
    f.predicate = tmpl.predicate;
    f.persistent = decl && !decl->linear;
    for (const auto& arg : tmpl.args) f.args.push_back(eval_expr(*arg, b, env_));
    return f;
}

void Engine::derive_sub_head(const SubHead& sh, Bindings& b, DerivationOutcome& out) {
    for (const FactTemplate& tmpl : sh) {
        Fact f = instantiate(tmpl, b);
        (f.persistent ? out.derived_persistent : out.derived_linear).push_back(std::move(f));
    }
}

DerivationOutcome Engine::derive_head(const NodeDatabase& db, const CompiledRule& cr, Bindings& b,
                                      std::vector<const Fact*>& xi) {
    DerivationOutcome out;
    out.bindings = b.snapshot();
    const Head& head = cr.rule->head;
    for (size_t t = 0; t < head.size(); ++t) {
        const HeadTerm& term = head[t];
        if (const auto* f = std::get_if<FactTemplate>(&term.term)) {
            Fact inst = instantiate(*f, b);
            (inst.persistent ? out.derived_persistent : out.derived_linear)
                .push_back(std::move(inst));
        } else if (const auto* c = std::get_if<Comprehension>(&term.term)) {
            match_comprehension(db, *c, cr.head_plans[t], b, xi, out);
        } else if (const auto* a = std::get_if<Aggregate>(&term.term)) {
            size_t idx = static_cast<size_t>(cr.rule - prog_.program.rules.data());
            apply_aggregate(db, *a, cr.head_plans[t], idx, b, xi, out);
        } else {
            instantiate_exists(std::get<ExistsExpr>(term.term), b, out);
        }
    }
    out.consumed.reserve(xi.size());
    for (const Fact* f : xi) out.consumed.push_back(*f);
    return out;
}

void Engine::match_comprehension(const NodeDatabase& db, const Comprehension& comp,
                                 const BodyPlan& plan, Bindings& b,
                                 std::vector<const Fact*>& xi, DerivationOutcome& out) {
    size_t outer_mark = b.mark();
    size_t committed = xi.size();
    Matcher m(db, plan, b, xi, env_);
    bool found = m.start();
    while (found) {
        derive_sub_head(comp.head, b, out);
        std::vector<const Fact*> app(xi.begin() + static_cast<long>(committed), xi.end());
        m.fix_stack(app);
        committed = xi.size();
        found = m.resume();
    }
    b.undo_to(outer_mark);
}

void Engine::apply_aggregate(const NodeDatabase& db, const Aggregate& agg, const BodyPlan& plan,
                             size_t rule_index, Bindings& b, std::vector<const Fact*>& xi,
                             DerivationOutcome& out) {
    struct AccState {
        std::optional<Value> value;
        int64_t count = 0;
    };
    std::vector<AccState> accs(agg.accums.size());
    size_t outer_mark = b.mark();
    size_t committed = xi.size();
    size_t applications = 0;
    Matcher m(db, plan, b, xi, env_);
    bool found = m.start();
    while (found) {
        ++applications;
        for (size_t i = 0; i < agg.accums.size(); ++i) {
            const AggregateAccum& acc = agg.accums[i];
            if (acc.op == AggregateOp::Count) {
                ++accs[i].count;
                continue;
            }
            const Value* v = b.lookup(acc.var);
            switch (acc.op) {
                case AggregateOp::Sum:
                    accs[i].value = accs[i].value ? fold_add(*accs[i].value, *v) : *v;
                    break;
                case AggregateOp::Min:
                    if (!accs[i].value || *v < *accs[i].value) accs[i].value = *v;
                    break;
                case AggregateOp::Max:
                    if (!accs[i].value || *accs[i].value < *v) accs[i].value = *v;
                    break;
                case AggregateOp::Count:
                    break;
            }
        }
        derive_sub_head(agg.head1, b, out);
        std::vector<const Fact*> app(xi.begin() + static_cast<long>(committed), xi.end());
        m.fix_stack(app);
        committed = xi.size();
        found = m.resume();
    }
    b.undo_to(outer_mark);

    if (applications == 0) {
        // min/max has no neutral element: derive nothing at all.
        for (const AggregateAccum& acc : agg.accums)
            if (acc.op == AggregateOp::Min || acc.op == AggregateOp::Max) return;
    }
    size_t mark = b.mark();
    const auto& types = prog_.rule_vars[rule_index];
    for (size_t i = 0; i < agg.accums.size(); ++i) {
        const AggregateAccum& acc = agg.accums[i];
        Value total;
        if (acc.op == AggregateOp::Count) {
            total = Value(accs[i].count);
        } else if (accs[i].value) {
            total = *accs[i].value;
        } else {
            auto it = types.find(acc.var);
            total = zero_of(it == types.end() ? TypeExpr::simple(TypeExpr::Kind::Int)
                                              : it->second);
        }
        b.bind(acc.var, std::move(total));
    }
    derive_sub_head(agg.head2, b, out);
    b.undo_to(mark);
}

void Engine::instantiate_exists(const ExistsExpr& ee, Bindings& b, DerivationOutcome& out) {
    if (!ctx_.fresh_node) throw std::logic_error("exists requires a fresh-node allocator");
    for (const std::string& var : ee.vars) b.bind(var, Value(ctx_.fresh_node()));
    derive_sub_head(ee.head, b, out);
}

std::optional<DerivationOutcome> Engine::apply_selector(const NodeDatabase& db,
                                                        const CompiledRule& cr) {
    struct Candidate {
        std::map<std::string, Value> binds;
        std::vector<const Fact*> xi;
    };
    std::vector<Candidate> found;
    {
        Bindings b;
        std::vector<const Fact*> xi;
        Matcher m(db, cr.body, b, xi, env_);
        for (bool ok = m.start(); ok; ok = m.resume()) found.push_back({b.snapshot(), xi});
    }
    if (found.empty()) return std::nullopt;

    const Selector& sel = *cr.rule->selector;
    if (sel.op == SelectorOp::Random) {
        std::shuffle(found.begin(), found.end(), rng_);
    } else {
        auto key = [&](const Candidate& c) -> const Value& { return c.binds.at(sel.var); };
        std::stable_sort(found.begin(), found.end(), [&](const Candidate& a, const Candidate& b2) {
            return sel.op == SelectorOp::Min ? key(a) < key(b2) : key(b2) < key(a);
        });
    }

    Bindings b;
    for (const auto& [k, v] : found.front().binds) b.bind(k, v);
    std::vector<const Fact*> xi = found.front().xi;
    return derive_head(db, cr, b, xi);
}

}  // namespace lm
