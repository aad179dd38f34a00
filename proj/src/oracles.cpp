#include "lm/oracles.hpp"

#include <algorithm>
#include <map>
#include <queue>

namespace lm::oracle {

std::vector<std::pair<uint64_t, int64_t>> dijkstra(const std::vector<WeightedEdge>& edges,
                                                   uint64_t start) {
    std::map<uint64_t, std::vector<std::pair<uint64_t, int64_t>>> adj;
    for (const WeightedEdge& e : edges) adj[e.from].push_back({e.to, e.weight});

    std::map<uint64_t, int64_t> dist;
    using Item = std::pair<int64_t, uint64_t>;  // (distance, node)
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[start] = 0;
    pq.push({0, start});
    while (!pq.empty()) {
        auto [d, n] = pq.top();
        pq.pop();
        if (d != dist[n]) continue;  // stale entry
        auto it = adj.find(n);
        if (it == adj.end()) continue;
        for (auto [m, w] : it->second) {
            int64_t nd = d + w;
            auto dit = dist.find(m);
            if (dit == dist.end() || nd < dit->second) {
                dist[m] = nd;
                pq.push({nd, m});
            }
        }
    }
    return {dist.begin(), dist.end()};
}

namespace {

void place_row(int n, int row, std::vector<int>& cols, std::vector<std::vector<int>>& out) {
    if (row == n) {
        out.push_back(cols);
        return;
    }
    for (int c = 0; c < n; ++c) {
        bool ok = true;
        for (int r = 0; r < row && ok; ++r)
            ok = cols[r] != c && std::abs(cols[r] - c) != row - r;
        if (!ok) continue;
        cols.push_back(c);
        place_row(n, row + 1, cols, out);
        cols.pop_back();
    }
}

}  // namespace

std::vector<std::vector<int>> nqueens_solutions(int n) {
    std::vector<std::vector<int>> out;
    std::vector<int> cols;
    place_row(n, 0, cols, out);
    return out;
}

std::vector<double> pagerank_scalar(const std::vector<std::vector<int>>& out_links,
                                    int iterations) {
    size_t n = out_links.size();
    std::vector<double> rank(n, 1.0 / static_cast<double>(n));
    for (int k = 0; k < iterations; ++k) {
        std::vector<double> acc(n, 0.0);
        for (size_t i = 0; i < n; ++i)
            for (int j : out_links[i])
                acc[static_cast<size_t>(j)] +=
                    rank[i] / static_cast<double>(out_links[i].size());
        for (size_t i = 0; i < n; ++i) rank[i] = 0.85 + 0.15 * acc[i];
    }
    return rank;
}

}  // namespace lm::oracle
