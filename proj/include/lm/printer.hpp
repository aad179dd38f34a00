#pragma once

#include <string>

#include "lm/ast.hpp"

namespace lm {

// Canonical s-expression rendering of a Program: one node per line, stable
// field order. Used by --dump-ast and the golden tests.
std::string dump_ast(const Program& prog);

// Renders a Program back to concrete LM syntax. parse(pretty_print(p)) is
// structurally equal to p.
std::string pretty_print(const Program& prog);

std::string print_expr(const Expr& e);

}  // namespace lm
