#include "lm/gen.hpp"

#include <sstream>

namespace lm::gen {

std::string nqueens_board(int size) {
    std::ostringstream out;
    out << "const size = " << size << ".\n";
    auto id = [size](int x, int y) { return x * size + y; };
    auto valid = [size](int x, int y) { return x >= 0 && x < size && y >= 0 && y < size; };
    auto link = [&](const char* pred, int x, int y, int tx, int ty) {
        int target = valid(tx, ty) ? id(tx, ty) : id(x, y);  // boundary self-loop
        out << "!" << pred << "(@" << id(x, y) << ", @" << target << ").\n";
    };
    for (int x = 0; x < size; ++x) {
        for (int y = 0; y < size; ++y) {
            out << "!coord(@" << id(x, y) << ", " << x << ", " << y << ").\n";
            link("left", x, y, x, y - 1);
            link("right", x, y, x, y + 1);
            link("down-left", x, y, x + 1, y - 2);
            link("down-right", x, y, x + 1, y + 2);
        }
    }
    return out.str();
}

std::string pagerank_ring(int size) {
    std::ostringstream out;
    for (int i = 1; i <= size; ++i) {
        int next = i % size + 1;
        out << "!output(@" << i << ", @" << next << ", 1.0).\n"
            << "!numLinks(@" << i << ", 1).\n"
            << "!numInput(@" << i << ", 1).\n"
            << "start(@" << i << ").\n";
    }
    return out.str();
}

}  // namespace lm::gen
