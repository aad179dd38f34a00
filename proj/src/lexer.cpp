#include "lm/lexer.hpp"

#include <cctype>
#include <charconv>

#include "lm/diagnostics.hpp"

namespace lm {

namespace {

bool is_ident_start(char c) { return std::islower(static_cast<unsigned char>(c)); }
bool is_upper_start(char c) {
    return std::isupper(static_cast<unsigned char>(c)) || c == '_';
}
bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> tokens;
        while (true) {
            skip_trivia();
            if (at_end()) break;
            tokens.push_back(next_token());
        }
        tokens.push_back(Token{TokenKind::End, "", 0, 0.0, loc()});
        return tokens;
    }

private:
    bool at_end() const { return pos_ >= src_.size(); }
    char peek(size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }
    char advance() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }
    SourceLoc loc() const { return SourceLoc{line_, col_}; }

    void skip_trivia() {
        while (!at_end()) {
            char c = peek();
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (!at_end() && peek() != '\n') advance();
            } else {
                break;
            }
        }
    }

    Token make(TokenKind kind, SourceLoc at, std::string text = "") {
        return Token{kind, std::move(text), 0, 0.0, at};
    }

    Token next_token() {
        SourceLoc at = loc();
        char c = peek();

        if (is_ident_start(c)) return ident(at);
        if (is_upper_start(c)) return variable(at);
        if (std::isdigit(static_cast<unsigned char>(c))) return number(at);

        advance();
        switch (c) {
            case '(': return make(TokenKind::LParen, at);
            case ')': return make(TokenKind::RParen, at);
            case '[': return make(TokenKind::LBracket, at);
            case ']': return make(TokenKind::RBracket, at);
            case '{': return make(TokenKind::LBrace, at);
            case '}': return make(TokenKind::RBrace, at);
            case ',': return make(TokenKind::Comma, at);
            case '.': return make(TokenKind::Dot, at);
            case '+': return make(TokenKind::Plus, at);
            case '*': return make(TokenKind::Star, at);
            case '/': return make(TokenKind::Slash, at);
            case '!': return make(TokenKind::Bang, at);
            case '|':
                if (peek() == '|') {
                    advance();
                    return make(TokenKind::OrOr, at);
                }
                return make(TokenKind::Bar, at);
            case '&':
                if (peek() == '&') {
                    advance();
                    return make(TokenKind::AndAnd, at);
                }
                throw ParseError(at, "IllegalCharacter", "unexpected '&'");
            case '-':
                if (peek() == 'o' && !is_ident_char(peek(1)) && peek(1) != '-') {
                    advance();
                    return make(TokenKind::Lolli, at);
                }
                return make(TokenKind::Minus, at);
            case '=':
                if (peek() == '>') {
                    advance();
                    return make(TokenKind::Arrow, at);
                }
                return make(TokenKind::Eq, at);
            case '<':
                if (peek() == '>') {
                    advance();
                    return make(TokenKind::Neq, at);
                }
                if (peek() == '=') {
                    advance();
                    return make(TokenKind::Le, at);
                }
                return make(TokenKind::Lt, at);
            case '>':
                if (peek() == '=') {
                    advance();
                    return make(TokenKind::Ge, at);
                }
                return make(TokenKind::Gt, at);
            case '@': return at_literal(at);
            case '\'': return string_literal(at);
            default:
                throw ParseError(at, "IllegalCharacter",
                                 std::string("illegal character '") + c + "'");
        }
    }

    // Lowercase identifiers may embed '-' when glued to a letter on both
    // sides (count-prices, down-right). "x - 1" still lexes as subtraction.
    Token ident(SourceLoc at) {
        std::string text;
        while (!at_end()) {
            if (is_ident_char(peek())) {
                text += advance();
            } else if (peek() == '-' && std::isalpha(static_cast<unsigned char>(peek(1)))) {
                text += advance();
                text += advance();
            } else {
                break;
            }
        }
        if (text == "type") return make(TokenKind::KwType, at);
        if (text == "linear") return make(TokenKind::KwLinear, at);
        if (text == "const") return make(TokenKind::KwConst, at);
        if (text == "exists") return make(TokenKind::KwExists, at);
        return make(TokenKind::Ident, at, text);
    }

    Token variable(SourceLoc at) {
        std::string text;
        text += advance();
        while (!at_end() && is_ident_char(peek())) text += advance();
        return make(TokenKind::Variable, at, text);
    }

    Token number(SourceLoc at) {
        std::string digits;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek())))
            digits += advance();
        // "1." terminates a statement; "1.5" is a float.
        if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
            digits += advance();
            while (!at_end() && std::isdigit(static_cast<unsigned char>(peek())))
                digits += advance();
            Token t = make(TokenKind::Float, at, digits);
            t.float_value = std::stod(digits);
            return t;
        }
        Token t = make(TokenKind::Int, at, digits);
        std::from_chars(digits.data(), digits.data() + digits.size(), t.int_value);
        return t;
    }

    Token at_literal(SourceLoc at) {
        if (std::isdigit(static_cast<unsigned char>(peek()))) {
            std::string digits;
            while (!at_end() && std::isdigit(static_cast<unsigned char>(peek())))
                digits += advance();
            Token t = make(TokenKind::NodeLit, at, digits);
            std::from_chars(digits.data(), digits.data() + digits.size(), t.int_value);
            return t;
        }
        std::string word;
        while (!at_end() && is_ident_char(peek())) word += advance();
        if (word == "world") return make(TokenKind::World, at);
        throw ParseError(at, "IllegalCharacter", "unknown @-literal '@" + word + "'");
    }

    Token string_literal(SourceLoc at) {
        std::string text;
        while (true) {
            if (at_end() || peek() == '\n')
                throw ParseError(at, "UnterminatedString", "unterminated string literal");
            char c = advance();
            if (c == '\'') break;
            text += c;
        }
        return make(TokenKind::String, at, text);
    }

    std::string_view src_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

std::string token_kind_name(TokenKind kind) {
    switch (kind) {
        case TokenKind::Ident: return "identifier";
        case TokenKind::Variable: return "variable";
        case TokenKind::Int: return "integer";
        case TokenKind::Float: return "float";
        case TokenKind::String: return "string";
        case TokenKind::NodeLit: return "node literal";
        case TokenKind::World: return "@world";
        case TokenKind::LParen: return "'('";
        case TokenKind::RParen: return "')'";
        case TokenKind::LBracket: return "'['";
        case TokenKind::RBracket: return "']'";
        case TokenKind::LBrace: return "'{'";
        case TokenKind::RBrace: return "'}'";
        case TokenKind::Comma: return "','";
        case TokenKind::Dot: return "'.'";
        case TokenKind::Bar: return "'|'";
        case TokenKind::Lolli: return "'-o'";
        case TokenKind::Arrow: return "'=>'";
        case TokenKind::Eq: return "'='";
        case TokenKind::Neq: return "'<>'";
        case TokenKind::Lt: return "'<'";
        case TokenKind::Le: return "'<='";
        case TokenKind::Gt: return "'>'";
        case TokenKind::Ge: return "'>='";
        case TokenKind::Plus: return "'+'";
        case TokenKind::Minus: return "'-'";
        case TokenKind::Star: return "'*'";
        case TokenKind::Slash: return "'/'";
        case TokenKind::OrOr: return "'||'";
        case TokenKind::AndAnd: return "'&&'";
        case TokenKind::Bang: return "'!'";
        case TokenKind::KwType: return "'type'";
        case TokenKind::KwLinear: return "'linear'";
        case TokenKind::KwConst: return "'const'";
        case TokenKind::KwExists: return "'exists'";
        case TokenKind::End: return "end of input";
    }
    return "?";
}

}  // namespace lm
