#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "lm/ast.hpp"

namespace lm {

// Machine-readable diagnostic: rendered as "file:line:col: code: message".
struct Diagnostic {
    SourceLoc loc;
    std::string code;
    std::string message;

    std::string render(const std::string& file = "<input>") const {
        return file + ":" + std::to_string(loc.line) + ":" + std::to_string(loc.col) +
               ": " + code + ": " + message;
    }
};

// Thrown by the lexer and parser on the first error.
class ParseError : public std::runtime_error {
public:
    ParseError(SourceLoc loc, std::string code, const std::string& message)
        : std::runtime_error(message), diagnostic{loc, std::move(code), message} {}
    Diagnostic diagnostic;
};

// Thrown by constraint evaluation (division by zero, head of empty list).
class EvalError : public std::runtime_error {
public:
    EvalError(std::string code, const std::string& message)
        : std::runtime_error(message), code(std::move(code)) {}
    std::string code;
};

}  // namespace lm
