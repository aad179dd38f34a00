#include "lm/database.hpp"

#include <algorithm>

namespace lm {

std::string Fact::to_string() const {
    std::string s = persistent ? "!" : "";
    s += predicate + "(";
    for (size_t i = 0; i < args.size(); ++i) {
        if (i) s += ", ";
        s += args[i].to_string();
    }
    return s + ")";
}

void NodeDatabase::assert_fact(const Fact& f) {
    if (!(f.home() == node_))
        throw DatabaseError("WrongNode", "fact " + f.to_string() + " does not belong to node @" +
                                             std::to_string(node_.id));
    if (f.persistent) {
        auto& bucket = persistent_[f.predicate];
        if (std::find(bucket.begin(), bucket.end(), f) == bucket.end()) bucket.push_back(f);
    } else {
        linear_[f.predicate].push_back(f);
    }
    dirty = true;
}

void NodeDatabase::retract_fact(const Fact& f) {
    if (f.persistent)
        throw DatabaseError("PersistentRetract", "cannot retract persistent fact " + f.to_string());
    auto it = linear_.find(f.predicate);
    if (it != linear_.end()) {
        auto pos = std::find(it->second.begin(), it->second.end(), f);
        if (pos != it->second.end()) {
            it->second.erase(pos);
            if (it->second.empty()) linear_.erase(it);
            return;
        }
    }
    throw DatabaseError("NotPresent", "fact " + f.to_string() + " not present at node @" +
                                          std::to_string(node_.id));
}

size_t NodeDatabase::multiplicity(const Fact& f) const {
    auto it = linear_.find(f.predicate);
    if (it == linear_.end()) return 0;
    return std::count(it->second.begin(), it->second.end(), f);
}

bool NodeDatabase::contains_persistent(const Fact& f) const {
    auto it = persistent_.find(f.predicate);
    if (it == persistent_.end()) return false;
    return std::find(it->second.begin(), it->second.end(), f) != it->second.end();
}

const std::vector<Fact>& NodeDatabase::linear_bucket(const std::string& predicate) const {
    static const std::vector<Fact> empty;
    auto it = linear_.find(predicate);
    return it == linear_.end() ? empty : it->second;
}

const std::vector<Fact>& NodeDatabase::persistent_bucket(const std::string& predicate) const {
    static const std::vector<Fact> empty;
    auto it = persistent_.find(predicate);
    return it == persistent_.end() ? empty : it->second;
}

std::vector<Fact> NodeDatabase::all_linear() const {
    std::vector<Fact> out;
    for (const auto& [_, bucket] : linear_) out.insert(out.end(), bucket.begin(), bucket.end());
    return out;
}

std::vector<Fact> NodeDatabase::all_persistent() const {
    std::vector<Fact> out;
    for (const auto& [_, bucket] : persistent_) out.insert(out.end(), bucket.begin(), bucket.end());
    return out;
}

size_t NodeDatabase::linear_count() const {
    size_t n = 0;
    for (const auto& [_, bucket] : linear_) n += bucket.size();
    return n;
}

bool NodeDatabase::empty() const { return linear_.empty() && persistent_.empty(); }

std::vector<std::string> NodeDatabase::dump_lines() const {
    // Distinct fact text -> multiplicity, already sorted via std::map.
    std::map<std::string, size_t> counts;
    for (const auto& [_, bucket] : linear_)
        for (const auto& f : bucket) counts[f.to_string()]++;
    for (const auto& [_, bucket] : persistent_)
        for (const auto& f : bucket) counts[f.to_string()]++;
    std::vector<std::string> lines;
    lines.reserve(counts.size());
    for (const auto& [text, n] : counts) lines.push_back(text + " x" + std::to_string(n));
    return lines;
}

}  // namespace lm
