#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "lm/value.hpp"

namespace lm {

struct Fact {
    std::string predicate;
    std::vector<Value> args;  // args[0] is the home node
    bool persistent = false;

    NodeId home() const { return args[0].as_node(); }
    bool operator==(const Fact& o) const {
        return persistent == o.persistent && predicate == o.predicate && args == o.args;
    }
    std::string to_string() const;
};

class DatabaseError : public std::runtime_error {
public:
    DatabaseError(std::string code, const std::string& msg)
        : std::runtime_error(msg), code(std::move(code)) {}
    std::string code;
};

// Per-node fact store: a multiset of linear facts and a set of persistent
// facts, bucketed by predicate in FIFO insertion order.
class NodeDatabase {
public:
    NodeDatabase() = default;
    explicit NodeDatabase(NodeId node) : node_(node) {}

    NodeId node() const { return node_; }

    // Linear insertion raises multiplicity; persistent insertion is
    // idempotent. Throws WrongNode when f.args[0] != node().
    void assert_fact(const Fact& f);

    // Lowers the multiplicity of a linear fact by one. Throws NotPresent or
    // PersistentRetract.
    void retract_fact(const Fact& f);

    size_t multiplicity(const Fact& f) const;
    bool contains_persistent(const Fact& f) const;

    const std::vector<Fact>& linear_bucket(const std::string& predicate) const;
    const std::vector<Fact>& persistent_bucket(const std::string& predicate) const;

    std::vector<Fact> all_linear() const;
    std::vector<Fact> all_persistent() const;
    size_t linear_count() const;
    bool empty() const;

    // Canonical text form: one "pred(args) xN" line per distinct fact, sorted
    // lexicographically by predicate then args.
    std::vector<std::string> dump_lines() const;

    bool dirty = false;  // scheduler hint

private:
    NodeId node_;
    std::map<std::string, std::vector<Fact>> linear_;
    std::map<std::string, std::vector<Fact>> persistent_;
};

}  // namespace lm
