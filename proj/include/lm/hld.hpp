#pragma once

#include <set>
#include <string>
#include <vector>

#include "lm/engine.hpp"

namespace lm {

// Canonical form of a derivation outcome: sorted fact renderings, so that
// indistinguishable matches collapse to one set member.
struct CanonicalOutcome {
    std::vector<std::string> consumed;
    std::vector<std::string> derived_linear;
    std::vector<std::string> derived_persistent;
    auto operator<=>(const CanonicalOutcome&) const = default;
};

using HldOutcomeSet = std::set<CanonicalOutcome>;

class HldError : public std::runtime_error {
public:
    explicit HldError(const std::string& msg)
        : std::runtime_error(msg), code("BoundExceeded") {}
    std::string code;
};

CanonicalOutcome canonicalize(const DerivationOutcome& out);

// Exhaustively enumerates every outcome the nondeterministic semantics admits
// for one rule on one node: every body match, every comprehension/aggregate
// unfolding depth (including partial ones), every selector pick. Fresh nodes
// for exists start at `first_fresh` so they line up with a deterministic
// engine run. Throws when the linear store exceeds `bound`.
HldOutcomeSet hld_apply(const NodeDatabase& db, const CheckedProgram& prog, size_t rule_index,
                        size_t bound, uint64_t world_size = 0, uint64_t first_fresh = 1000);

// Membership test: the committed-choice engine outcome must be one of the
// enumerable outcomes.
bool check_soundness(const DerivationOutcome& lld, const HldOutcomeSet& hld);

}  // namespace lm
