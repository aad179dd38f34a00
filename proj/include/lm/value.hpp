#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace lm {

// Node addresses are plain naturals (written @N in source).
struct NodeId {
    uint64_t id = 0;
    friend bool operator==(NodeId a, NodeId b) { return a.id == b.id; }
    friend auto operator<=>(NodeId a, NodeId b) { return a.id <=> b.id; }
};

class Value;
using ValueList = std::vector<Value>;
using ValuePair = std::pair<Value, Value>;

// Runtime value. Floats compare bitwise so that multiset removal from the
// database is exact.
class Value {
public:
    using Storage = std::variant<NodeId, int64_t, double, bool, std::string,
                                 std::shared_ptr<const ValueList>,
                                 std::shared_ptr<const ValuePair>>;

    Value() : storage_(int64_t{0}) {}
    explicit Value(NodeId n) : storage_(n) {}
    explicit Value(int64_t i) : storage_(i) {}
    explicit Value(double f) : storage_(f) {}
    explicit Value(bool b) : storage_(b) {}
    explicit Value(std::string s) : storage_(std::move(s)) {}

    static Value list(ValueList elems) {
        Value v;
        v.storage_ = std::make_shared<const ValueList>(std::move(elems));
        return v;
    }
    static Value pair(Value first, Value second) {
        Value v;
        v.storage_ = std::make_shared<const ValuePair>(std::move(first), std::move(second));
        return v;
    }

    bool is_node() const { return std::holds_alternative<NodeId>(storage_); }
    bool is_int() const { return std::holds_alternative<int64_t>(storage_); }
    bool is_float() const { return std::holds_alternative<double>(storage_); }
    bool is_bool() const { return std::holds_alternative<bool>(storage_); }
    bool is_string() const { return std::holds_alternative<std::string>(storage_); }
    bool is_list() const { return std::holds_alternative<std::shared_ptr<const ValueList>>(storage_); }
    bool is_pair() const { return std::holds_alternative<std::shared_ptr<const ValuePair>>(storage_); }

    NodeId as_node() const { return std::get<NodeId>(storage_); }
    int64_t as_int() const { return std::get<int64_t>(storage_); }
    double as_float() const { return std::get<double>(storage_); }
    bool as_bool() const { return std::get<bool>(storage_); }
    const std::string& as_string() const { return std::get<std::string>(storage_); }
    const ValueList& as_list() const { return *std::get<std::shared_ptr<const ValueList>>(storage_); }
    const ValuePair& as_pair() const { return *std::get<std::shared_ptr<const ValuePair>>(storage_); }

    bool operator==(const Value& other) const;
    // Total order used for canonical dumps and sorted selectors.
    bool operator<(const Value& other) const;

    std::string to_string() const;

private:
    int kind_rank() const { return static_cast<int>(storage_.index()); }
    Storage storage_;
};

}  // namespace lm
