#include "lm/runtime.hpp"

#include <algorithm>
#include <thread>

namespace lm {

// ---------------------------------------------------------------------------
// Graph
// ---------------------------------------------------------------------------

Graph::Node& Graph::get_or_create(NodeId id) {
    std::lock_guard lock(mutex_);
    auto it = nodes_.find(id.id);
    if (it == nodes_.end())
        it = nodes_.emplace(id.id, std::make_unique<Node>(id)).first;
    return *it->second;
}

Graph::Node* Graph::find(NodeId id) {
    std::lock_guard lock(mutex_);
    auto it = nodes_.find(id.id);
    return it == nodes_.end() ? nullptr : it->second.get();
}

uint64_t Graph::max_node_id() const {
    std::lock_guard lock(mutex_);
    return nodes_.empty() ? 0 : nodes_.rbegin()->first;
}

size_t Graph::node_count() const {
    std::lock_guard lock(mutex_);
    return nodes_.size();
}

std::vector<uint64_t> Graph::node_ids() const {
    std::lock_guard lock(mutex_);
    std::vector<uint64_t> ids;
    ids.reserve(nodes_.size());
    for (const auto& [id, _] : nodes_) ids.push_back(id);
    return ids;
}

std::vector<std::string> Graph::dump_db() const {
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [id, node] : nodes_)
        for (const std::string& line : node->db.dump_lines())
            out.push_back("node " + std::to_string(id) + ": " + line);
    return out;
}

std::vector<std::string> Graph::linear_multiset() const {
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [id, node] : nodes_) {
        for (const Fact& f : node->db.all_linear()) out.push_back(f.to_string());
        for (const Fact& f : node->inbox)
            if (!f.persistent) out.push_back(f.to_string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

void materialize_mentioned(Graph& g, const Value& v) {
    if (v.is_node()) {
        g.get_or_create(v.as_node());
    } else if (v.is_list()) {
        for (const Value& e : v.as_list()) materialize_mentioned(g, e);
    }
}

}  // namespace

std::unique_ptr<Graph> load(const CheckedProgram& prog) {
    auto g = std::make_unique<Graph>();
    for (const Fact& f : prog.ground_axioms) {
        g->get_or_create(f.home()).db.assert_fact(f);
        for (const Value& v : f.args) materialize_mentioned(*g, v);
    }
    return g;
}

// ---------------------------------------------------------------------------
// Scheduler
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> linear_strings(const NodeDatabase& db) {
    std::vector<std::string> out;
    for (const Fact& f : db.all_linear()) out.push_back(f.to_string());
    std::sort(out.begin(), out.end());
    return out;
}

// Removes one occurrence of each element of b from a; false when missing.
bool multiset_subtract(std::vector<std::string>& a, const std::vector<std::string>& b) {
    for (const std::string& s : b) {
        auto it = std::find(a.begin(), a.end(), s);
        if (it == a.end()) return false;
        a.erase(it);
    }
    return true;
}

class Scheduler {
public:
    Scheduler(Graph& g, const CheckedProgram& prog, const RunOptions& opts)
        : g_(g), prog_(prog), opts_(opts), queues_(static_cast<size_t>(opts.workers)),
          traces_(static_cast<size_t>(opts.workers)),
          worker_firings_(static_cast<size_t>(opts.workers)) {
        for (auto& c : worker_firings_) c.store(0);
        fresh_.store(g.max_node_id() + 1);
        world_size_ = g.node_count();
    }

    RunStats run() {
        // contiguous id ranges across workers; everything starts dirty
        std::vector<uint64_t> ids = g_.node_ids();
        size_t per = ids.empty() ? 1 : (ids.size() + queues_.size() - 1) / queues_.size();
        for (size_t i = 0; i < ids.size(); ++i) {
            int w = static_cast<int>(std::min(i / per, queues_.size() - 1));
            Graph::Node* n = g_.find(NodeId{ids[i]});
            n->owner.store(w);
            n->queued.store(true);
            outstanding_.fetch_add(1);
            queues_[static_cast<size_t>(w)].q.push_back(ids[i]);
        }

        if (queues_.size() == 1) {
            worker_loop(0);
        } else {
            std::vector<std::thread> threads;
            for (size_t w = 0; w < queues_.size(); ++w)
                threads.emplace_back([this, w] { worker_loop(static_cast<int>(w)); });
            for (auto& t : threads) t.join();
        }

        RunStats stats;
        stats.firings = firings_.load();
        stats.quiesced = !aborted_.load();
        stats.audit_violations = audit_violations_.load();
        for (auto& c : worker_firings_) stats.worker_firings.push_back(c.load());
        for (auto& t : traces_)
            stats.trace_lines.insert(stats.trace_lines.end(), t.begin(), t.end());
        return stats;
    }

private:
    struct WorkerQueue {
        std::mutex m;
        std::deque<uint64_t> q;
    };

    void enqueue(Graph::Node& n, uint64_t id) {
        if (n.queued.exchange(true)) return;
        outstanding_.fetch_add(1);
        int w = n.owner.load();
        std::lock_guard lock(queues_[static_cast<size_t>(w)].m);
        queues_[static_cast<size_t>(w)].q.push_back(id);
    }

    bool try_pop(int w, uint64_t& id) {
        WorkerQueue& wq = queues_[static_cast<size_t>(w)];
        std::lock_guard lock(wq.m);
        if (wq.q.empty()) return false;
        id = wq.q.front();
        wq.q.pop_front();
        return true;
    }

    // Transfers one dirty node from the victim with the longest queue.
    bool try_steal(int w, uint64_t& id) {
        int victim = -1;
        size_t longest = 0;
        for (size_t v = 0; v < queues_.size(); ++v) {
            if (static_cast<int>(v) == w) continue;
            std::lock_guard lock(queues_[v].m);
            if (queues_[v].q.size() > longest) {
                longest = queues_[v].q.size();
                victim = static_cast<int>(v);
            }
        }
        if (victim < 0) return false;
        WorkerQueue& wq = queues_[static_cast<size_t>(victim)];
        std::lock_guard lock(wq.m);
        if (wq.q.empty()) return false;
        id = wq.q.back();
        wq.q.pop_back();
        Graph::Node* n = g_.find(NodeId{id});
        n->owner.store(w);
        stolen_.fetch_add(1);
        return true;
    }

    void worker_loop(int w) {
        EngineContext ctx;
        ctx.world_size = world_size_;
        ctx.seed = opts_.seed + static_cast<uint64_t>(w);
        ctx.fresh_node = [this, w]() {
            uint64_t id = fresh_.fetch_add(1);
            g_.get_or_create(NodeId{id}).owner.store(w);
            return NodeId{id};
        };
        Engine eng(prog_, ctx);

        while (!aborted_.load() && outstanding_.load() > 0) {
            uint64_t id;
            if (try_pop(w, id) || try_steal(w, id)) {
                process_node(w, eng, *g_.find(NodeId{id}));
                outstanding_.fetch_sub(1);
            } else {
                std::this_thread::yield();
            }
        }
    }

    void process_node(int w, Engine& eng, Graph::Node& n) {
        // batch drain: one sender's whole outcome is never split
        {
            std::vector<Fact> arrived;
            {
                std::lock_guard lock(n.inbox_mutex);
                arrived.swap(n.inbox);
            }
            for (const Fact& f : arrived) n.db.assert_fact(f);
        }
        while (!aborted_.load()) {
            auto out = eng.run_node(n.db);
            if (!out) break;
            uint64_t count = firings_.fetch_add(1) + 1;
            if (opts_.max_steps && count > opts_.max_steps) {
                aborted_.store(true);
                return;
            }
            worker_firings_[static_cast<size_t>(w)].fetch_add(1);
            apply_outcome(w, n, *out);
        }
        n.queued.store(false);
        bool pending;
        {
            std::lock_guard lock(n.inbox_mutex);
            pending = !n.inbox.empty();
        }
        if (pending) enqueue(n, n.db.node().id);
    }

    void apply_outcome(int w, Graph::Node& n, const DerivationOutcome& out) {
        std::vector<std::string> before;
        size_t persistent_before = 0;
        if (opts_.audit) {
            before = linear_strings(n.db);
            persistent_before = n.db.all_persistent().size();
        }

        for (const Fact& f : out.consumed) n.db.retract_fact(f);
        NodeId home = n.db.node();
        std::vector<std::string> local_derived;
        auto deliver = [&](const Fact& f) {
            if (f.home() == home) {
                n.db.assert_fact(f);
                if (opts_.audit && !f.persistent) local_derived.push_back(f.to_string());
                return;
            }
            Graph::Node& target = g_.get_or_create(f.home());
            {
                std::lock_guard lock(target.inbox_mutex);
                target.inbox.push_back(f);
            }
            enqueue(target, f.home().id);
        };
        for (const Fact& f : out.derived_linear) deliver(f);
        for (const Fact& f : out.derived_persistent) deliver(f);

        if (opts_.audit) {
            // conservation at the node: new = old - consumed + locally derived
            std::vector<std::string> expected = before;
            std::vector<std::string> consumed;
            for (const Fact& f : out.consumed) consumed.push_back(f.to_string());
            bool ok = multiset_subtract(expected, consumed);
            expected.insert(expected.end(), local_derived.begin(), local_derived.end());
            std::sort(expected.begin(), expected.end());
            if (!ok || expected != linear_strings(n.db)) audit_violations_.fetch_add(1);
            if (n.db.all_persistent().size() < persistent_before) audit_violations_.fetch_add(1);
        }
        if (opts_.trace) {
            std::string line = "node " + std::to_string(home.id) + " rule " +
                               std::to_string(out.rule_index) + ": consumed {";
            for (size_t i = 0; i < out.consumed.size(); ++i)
                line += (i ? ", " : "") + out.consumed[i].to_string();
            line += "} derived {";
            size_t i = 0;
            for (const Fact& f : out.derived_linear) line += (i++ ? ", " : "") + f.to_string();
            for (const Fact& f : out.derived_persistent) line += (i++ ? ", " : "") + f.to_string();
            line += "}";
            traces_[static_cast<size_t>(w)].push_back(std::move(line));
        }
    }

    Graph& g_;
    const CheckedProgram& prog_;
    const RunOptions& opts_;
    std::vector<WorkerQueue> queues_;
    std::vector<std::vector<std::string>> traces_;
    std::deque<std::atomic<uint64_t>> worker_firings_;
    std::atomic<int64_t> outstanding_{0};
    std::atomic<uint64_t> firings_{0};
    std::atomic<uint64_t> fresh_{1};
    std::atomic<uint64_t> stolen_{0};
    std::atomic<uint64_t> audit_violations_{0};
    std::atomic<bool> aborted_{false};
    uint64_t world_size_ = 0;
};

}  // namespace

RunStats run_to_quiescence(Graph& g, const CheckedProgram& prog, const RunOptions& opts) {
    RunOptions o = opts;
    if (o.workers < 1) o.workers = 1;
    Scheduler s(g, prog, o);
    return s.run();
}

}  // namespace lm
