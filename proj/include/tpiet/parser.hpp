#pragma once

#include <tpiet/ast.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace tpiet::ql {

enum class TokenKind {
    Identifier,
    Number,
    Date,         // a/b/yyyy
    String,       // "..." with backslash escapes
    BracketName,  // [text] without a comma
    LParen,
    RParen,
    LBracket,  // opens an interval literal
    RBracket,
    Comma,
    Dot,
    Semicolon,
    Minus,
    Op,  // = <> != < <= > >=
    End,
};

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;
    std::size_t line = 1;
    std::size_t column = 1;
};

/// Splits query text into tokens. Throws SyntaxError with the offending
/// position.
std::vector<Token> tokenize(std::string_view text);

/// Parses one query (GIS or CUBE). Subqueries nest at most one level in each
/// direction. Throws SyntaxError carrying line and column.
Query parse(std::string_view text);

}  // namespace tpiet::ql
