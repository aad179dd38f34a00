#pragma once

#include <cstdint>
#include <vector>

namespace lm::oracle {

struct WeightedEdge {
    uint64_t from;
    uint64_t to;
    int64_t weight;
};

// Single-source shortest distances over directed weighted edges.
// Node ids are arbitrary; unreachable nodes are absent from the result.
std::vector<std::pair<uint64_t, int64_t>> dijkstra(const std::vector<WeightedEdge>& edges,
                                                   uint64_t start);

// All solutions to the n-queens puzzle; each solution lists the queen's
// column per row.
std::vector<std::vector<int>> nqueens_solutions(int n);

// Reference fold of the rank recurrence rank' = 0.85 + 0.15 * sum of
// incoming rank/outdegree, starting from the uniform vector 1/N.
// out_links[i] lists the targets of node i (0-based).
std::vector<double> pagerank_scalar(const std::vector<std::vector<int>>& out_links,
                                    int iterations);

}  // namespace lm::oracle
