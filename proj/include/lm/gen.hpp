#pragma once

#include <string>

namespace lm::gen {

// Chessboard topology for the n-queens program: one node per cell
// (id = row * size + column, @0 top-left), coord facts, left/right
// neighbors, and the first non-attacked cells of the next row as
// down-left/down-right. Boundary cells get self-loops, which the
// program's "<> A" guards turn into no-ops. Also declares const size.
std::string nqueens_board(int size);

// Directed ring of n pages for the pagerank program: output/numLinks/
// numInput axioms plus one start fact per node.
std::string pagerank_ring(int size);

}  // namespace lm::gen
