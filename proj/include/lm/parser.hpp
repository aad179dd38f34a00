#pragma once

#include <string_view>

#include "lm/ast.hpp"
#include "lm/lexer.hpp"

namespace lm {

// Parses a token sequence into a Program. Throws ParseError (code
// SyntaxError) on the first malformed statement. Undeclared predicates are
// deferred to the checker.
Program parse_program(const std::vector<Token>& tokens);

// Convenience: tokenize + parse.
Program parse_source(std::string_view source);

}  // namespace lm
