#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace skyfed::query {

enum class TokenKind {
    Ident, IntLit, FloatLit, StringLit,
    // keywords
    Select, From, Where, Group, Order, By, Asc, Desc, Limit, And, Or, Not, As, Xmatch, With, Is, Null,
    // punctuation
    Plus, Minus, Star, Slash, Lt, Le, Eq, Ne, Ge, Gt, LParen, RParen, Comma, Dot, Semicolon,
    End,
};

struct Token {
    TokenKind kind;
    std::string text;  // identifier as written, literal spelling, or decoded string contents
    std::size_t offset;
};

std::string_view describe(TokenKind k) noexcept;

inline constexpr std::size_t kMaxQueryBytes = 64 * 1024;

/// Splits query text into tokens terminated by an End token. Keywords are
/// case-insensitive. Throws Error("lex_error") with the byte offset of the
/// offending character, or Error("query_too_large").
std::vector<Token> tokenize(std::string_view text);

}  // namespace skyfed::query
