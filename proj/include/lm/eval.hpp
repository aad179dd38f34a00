#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "lm/ast.hpp"
#include "lm/diagnostics.hpp"
#include "lm/value.hpp"

namespace lm {

// Variable bindings with an undo trail for backtracking.
class Bindings {
public:
    bool bind(const std::string& name, Value v) {
        auto [it, inserted] = map_.emplace(name, std::move(v));
        if (!inserted) return false;
        trail_.push_back(name);
        return true;
    }

    const Value* lookup(const std::string& name) const {
        auto it = map_.find(name);
        return it == map_.end() ? nullptr : &it->second;
    }

    size_t mark() const { return trail_.size(); }

    void undo_to(size_t mark) {
        while (trail_.size() > mark) {
            map_.erase(trail_.back());
            trail_.pop_back();
        }
    }

    std::map<std::string, Value> snapshot() const {
        return {map_.begin(), map_.end()};
    }

private:
    std::unordered_map<std::string, Value> map_;
    std::vector<std::string> trail_;
};

// Evaluation environment: resolved program constants plus the graph size for
// @world.
struct EvalEnv {
    const std::map<std::string, Value>* consts = nullptr;
    uint64_t world_size = 0;
};

// Strict evaluation; every variable of e must be bound. Throws EvalError with
// codes DivisionByZero, HeadOfEmptyList, UnboundVariable, UnknownConst.
Value eval_expr(const Expr& e, const Bindings& b, const EvalEnv& env);

// True when every variable occurring in e is bound.
bool expr_fully_bound(const Expr& e, const Bindings& b);

// Matches a template argument expression against a stored value, extending
// b (through the trail) on success. Unbound variables bind; list patterns
// destructure; fully bound expressions evaluate and compare.
bool match_pattern(const Expr& pattern, const Value& v, Bindings& b, const EvalEnv& env);

void collect_vars(const Expr& e, std::vector<std::string>& out);

}  // namespace lm
