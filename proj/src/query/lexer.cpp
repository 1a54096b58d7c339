#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <unordered_map>

#include "skyfed/error.hpp"
#include "skyfed/query/token.hpp"

namespace skyfed::query {

std::string_view describe(TokenKind k) noexcept {
    switch (k) {
        case TokenKind::Ident: return "identifier";
        case TokenKind::IntLit: return "integer";
        case TokenKind::FloatLit: return "number";
        case TokenKind::StringLit: return "string";
        case TokenKind::Select: return "SELECT";
        case TokenKind::From: return "FROM";
        case TokenKind::Where: return "WHERE";
        case TokenKind::Group: return "GROUP";
        case TokenKind::Order: return "ORDER";
        case TokenKind::By: return "BY";
        case TokenKind::Asc: return "ASC";
        case TokenKind::Desc: return "DESC";
        case TokenKind::Limit: return "LIMIT";
        case TokenKind::And: return "AND";
        case TokenKind::Or: return "OR";
        case TokenKind::Not: return "NOT";
        case TokenKind::As: return "AS";
        case TokenKind::Xmatch: return "XMATCH";
        case TokenKind::With: return "WITH";
        case TokenKind::Is: return "IS";
        case TokenKind::Null: return "NULL";
        case TokenKind::Plus: return "'+'";
        case TokenKind::Minus: return "'-'";
        case TokenKind::Star: return "'*'";
        case TokenKind::Slash: return "'/'";
        case TokenKind::Lt: return "'<'";
        case TokenKind::Le: return "'<='";
        case TokenKind::Eq: return "'='";
        case TokenKind::Ne: return "'!='";
        case TokenKind::Ge: return "'>='";
        case TokenKind::Gt: return "'>'";
        case TokenKind::LParen: return "'('";
        case TokenKind::RParen: return "')'";
        case TokenKind::Comma: return "','";
        case TokenKind::Dot: return "'.'";
        case TokenKind::Semicolon: return "';'";
        case TokenKind::End: return "end of input";
    }
    return "?";
}

namespace {

const std::unordered_map<std::string, TokenKind>& keywords() {
    static const std::unordered_map<std::string, TokenKind> table{
        {"SELECT", TokenKind::Select}, {"FROM", TokenKind::From},   {"WHERE", TokenKind::Where},
        {"GROUP", TokenKind::Group},   {"ORDER", TokenKind::Order}, {"BY", TokenKind::By},
        {"ASC", TokenKind::Asc},       {"DESC", TokenKind::Desc},   {"LIMIT", TokenKind::Limit},
        {"AND", TokenKind::And},       {"OR", TokenKind::Or},       {"NOT", TokenKind::Not},
        {"AS", TokenKind::As},         {"XMATCH", TokenKind::Xmatch}, {"WITH", TokenKind::With},
        {"IS", TokenKind::Is},         {"NULL", TokenKind::Null},
    };
    return table;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
    if (text.size() > kMaxQueryBytes)
        throw Error("query_too_large", "query text exceeds " + std::to_string(kMaxQueryBytes) + " bytes");
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const char c = text[i];
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            ++i;
            continue;
        }
        if (c == '-' && i + 1 < n && text[i + 1] == '-') {  // comment to end of line
            while (i < n && text[i] != '\n') ++i;
            continue;
        }
        const std::size_t start = i;
        if (ident_start(c)) {
            while (i < n && ident_char(text[i])) ++i;
            std::string word(text.substr(start, i - start));
            std::string upper = word;
            std::transform(upper.begin(), upper.end(), upper.begin(),
                           [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
            auto kw = keywords().find(upper);
            out.push_back({kw == keywords().end() ? TokenKind::Ident : kw->second, std::move(word), start});
            continue;
        }
        if (digit(c) || (c == '.' && i + 1 < n && digit(text[i + 1]))) {
            bool is_float = false;
            while (i < n && digit(text[i])) ++i;
            if (i < n && text[i] == '.') {
                is_float = true;
                ++i;
                while (i < n && digit(text[i])) ++i;
            }
            if (i < n && (text[i] == 'e' || text[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < n && (text[j] == '+' || text[j] == '-')) ++j;
                if (j < n && digit(text[j])) {
                    is_float = true;
                    i = j;
                    while (i < n && digit(text[i])) ++i;
                }
            }
            if (i < n && ident_char(text[i]))
                throw Error("lex_error", "malformed number at offset " + std::to_string(start), start);
            std::string lit(text.substr(start, i - start));
            if (is_float) {
                double v = 0;
                auto [p, ec] = std::from_chars(lit.data(), lit.data() + lit.size(), v);
                if (ec != std::errc() || !std::isfinite(v))
                    throw Error("lex_error", "number out of range at offset " + std::to_string(start), start);
            } else {
                std::int64_t v = 0;
                auto [p, ec] = std::from_chars(lit.data(), lit.data() + lit.size(), v);
                if (ec != std::errc())
                    throw Error("lex_error", "integer out of range at offset " + std::to_string(start), start);
            }
            out.push_back({is_float ? TokenKind::FloatLit : TokenKind::IntLit, std::move(lit), start});
            continue;
        }
        if (c == '\'') {
            std::string value;
            ++i;
            for (;;) {
                if (i >= n)
                    throw Error("lex_error", "unterminated string starting at offset " + std::to_string(start),
                                start);
                if (text[i] == '\'') {
                    if (i + 1 < n && text[i + 1] == '\'') {
                        value.push_back('\'');
                        i += 2;
                        continue;
                    }
                    ++i;
                    break;
                }
                value.push_back(text[i++]);
            }
            out.push_back({TokenKind::StringLit, std::move(value), start});
            continue;
        }
        auto two = [&](char next) { return i + 1 < n && text[i + 1] == next; };
        TokenKind kind;
        std::size_t len = 1;
        switch (c) {
            case '+': kind = TokenKind::Plus; break;
            case '-': kind = TokenKind::Minus; break;
            case '*': kind = TokenKind::Star; break;
            case '/': kind = TokenKind::Slash; break;
            case '(': kind = TokenKind::LParen; break;
            case ')': kind = TokenKind::RParen; break;
            case ',': kind = TokenKind::Comma; break;
            case '.': kind = TokenKind::Dot; break;
            case ';': kind = TokenKind::Semicolon; break;
            case '=': kind = TokenKind::Eq; break;
            case '<':
                if (two('=')) kind = TokenKind::Le, len = 2;
                else if (two('>')) kind = TokenKind::Ne, len = 2;
                else kind = TokenKind::Lt;
                break;
            case '>':
                if (two('=')) kind = TokenKind::Ge, len = 2;
                else kind = TokenKind::Gt;
                break;
            case '!':
                if (two('=')) {
                    kind = TokenKind::Ne, len = 2;
                    break;
                }
                [[fallthrough]];
            default:
                throw Error("lex_error",
                            "illegal character '" + std::string(1, c) + "' at offset " + std::to_string(start),
                            start);
        }
        out.push_back({kind, std::string(text.substr(start, len)), start});
        i += len;
    }
    out.push_back({TokenKind::End, "", n});
    return out;
}

}  // namespace skyfed::query
