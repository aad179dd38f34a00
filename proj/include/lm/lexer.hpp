#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lm/ast.hpp"

namespace lm {

enum class TokenKind {
    Ident,     // lowercase identifier (may contain '-')
    Variable,  // uppercase identifier or '_'
    Int,
    Float,
    String,
    NodeLit,   // @N
    World,     // @world
    LParen, RParen,
    LBracket, RBracket,
    LBrace, RBrace,
    Comma, Dot, Bar,
    Lolli,     // -o
    Arrow,     // =>
    Eq, Neq, Lt, Le, Gt, Ge,
    Plus, Minus, Star, Slash,
    OrOr, AndAnd,
    Bang,
    KwType, KwLinear, KwConst, KwExists,
    End,
};

struct Token {
    TokenKind kind;
    std::string text;     // identifier / variable / string contents
    int64_t int_value = 0;
    double float_value = 0.0;
    SourceLoc loc;
};

// Tokenizes LM source. Strips // line comments. Throws ParseError with codes
// UnterminatedString and IllegalCharacter.
std::vector<Token> tokenize(std::string_view source);

std::string token_kind_name(TokenKind kind);

}  // namespace lm
