#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "lm/engine.hpp"
#include "lm/typecheck.hpp"

namespace lm {

struct RunOptions {
    int workers = 1;
    uint64_t seed = 0;
    uint64_t max_steps = 0;  // 0 = unlimited
    bool trace = false;
    bool audit = false;
};

struct RunStats {
    uint64_t firings = 0;
    bool quiesced = true;  // false when max_steps aborted the run
    uint64_t audit_violations = 0;
    std::vector<uint64_t> worker_firings;  // rule firings per worker
    std::vector<std::string> trace_lines;  // total order only under 1 worker
};

// The whole database: one NodeDatabase per node plus its routing inbox.
class Graph {
public:
    struct Node {
        NodeDatabase db;
        std::mutex inbox_mutex;
        std::vector<Fact> inbox;
        std::atomic<bool> queued{false};
        std::atomic<int> owner{0};
        explicit Node(NodeId id) : db(id) {}
    };

    Node& get_or_create(NodeId id);
    Node* find(NodeId id);
    uint64_t max_node_id() const;
    size_t node_count() const;
    std::vector<uint64_t> node_ids() const;

    // Canonical dump: "node <id>: pred(args) xN" lines, sorted by node id
    // then fact text.
    std::vector<std::string> dump_db() const;

    // Total multiset of linear facts across databases and inboxes, as sorted
    // renderings (used by conservation checks).
    std::vector<std::string> linear_multiset() const;

private:
    mutable std::mutex mutex_;
    std::map<uint64_t, std::unique_ptr<Node>> nodes_;
};

// Materializes the axioms: every mentioned node exists and is dirty.
std::unique_ptr<Graph> load(const CheckedProgram& prog);

// Runs until no node is dirty and every inbox is empty, or until max_steps
// firings. Workers own contiguous id ranges and steal dirty nodes from the
// longest queue when starved.
RunStats run_to_quiescence(Graph& g, const CheckedProgram& prog, const RunOptions& opts);

}  // namespace lm
