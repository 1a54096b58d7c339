#include "skyfed/query/parser.hpp"

#include <algorithm>
#include <charconv>
#include <set>

namespace skyfed::query {

namespace {

std::string expected_list(const std::vector<std::string>& expected) {
    std::string out;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i) out += i + 1 == expected.size() ? " or " : ", ";
        out += expected[i];
    }
    return out;
}

class Parser {
public:
    explicit Parser(const std::vector<Token>& tokens) : toks_(tokens) {}

    Query query() {
        Query q;
        expect(TokenKind::Select);
        if (accept(TokenKind::Star)) {
            q.select_star = true;
        } else {
            do {
                SelectItem item{expression(), std::nullopt};
                if (accept(TokenKind::As)) {
                    item.alias = expect(TokenKind::Ident).text;
                } else if (peek().kind == TokenKind::Ident) {
                    item.alias = advance().text;
                }
                q.select.push_back(std::move(item));
            } while (accept(TokenKind::Comma));
        }
        expect(TokenKind::From);
        q.from = source();
        if (accept(TokenKind::Where)) q.where = expression();
        if (accept(TokenKind::Group)) {
            expect(TokenKind::By);
            do q.group_by.push_back(expression());
            while (accept(TokenKind::Comma));
        }
        if (accept(TokenKind::Order)) {
            expect(TokenKind::By);
            do {
                OrderItem item{expression(), false};
                if (accept(TokenKind::Desc)) item.descending = true;
                else accept(TokenKind::Asc);
                q.order_by.push_back(std::move(item));
            } while (accept(TokenKind::Comma));
        }
        if (accept(TokenKind::Limit)) {
            const Token& t = expect(TokenKind::IntLit);
            std::int64_t v = 0;
            std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
            q.limit = v;
        }
        accept(TokenKind::Semicolon);
        expect(TokenKind::End);
        return q;
    }

    Expr standalone_expression() {
        Expr e = expression();
        expect(TokenKind::End);
        return e;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& advance() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    bool accept(TokenKind k) {
        if (peek().kind != k) {
            tried_.insert(std::string(describe(k)));
            return false;
        }
        advance();
        tried_.clear();
        return true;
    }

    const Token& expect(TokenKind k) {
        if (peek().kind != k) {
            tried_.insert(std::string(describe(k)));
            fail();
        }
        tried_.clear();
        return advance();
    }

    [[noreturn]] void fail() {
        const Token& t = peek();
        std::vector<std::string> expected(tried_.begin(), tried_.end());
        throw ParseError(t.offset, expected, t.kind == TokenKind::End ? "end of input" : "'" + t.text + "'");
    }

    Source source() {
        Source s;
        s.offset = peek().offset;
        if (accept(TokenKind::Xmatch)) {
            s.kind = Source::Kind::XMatch;
            expect(TokenKind::LParen);
            do s.surveys.push_back(expect(TokenKind::Ident).text);
            while (accept(TokenKind::Comma));
            expect(TokenKind::RParen);
            if (accept(TokenKind::With)) {
                do xmatch_option(s);
                while (accept(TokenKind::Comma));
            }
            return s;
        }
        s.table = expect(TokenKind::Ident).text;
        return s;
    }

    void xmatch_option(Source& s) {
        const Token& name = expect(TokenKind::Ident);
        std::string key = name.text;
        std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
        expect(TokenKind::Eq);
        auto number = [&]() {
            const Token& t = peek();
            if (t.kind != TokenKind::IntLit && t.kind != TokenKind::FloatLit) {
                tried_.insert("number");
                fail();
            }
            advance();
            tried_.clear();
            double v = 0;
            std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
            return v;
        };
        if (key == "k") {
            s.k = number();
        } else if (key == "max_radius") {
            s.max_radius_arcsec = number();
        } else if (key == "mode") {
            const Token& m = expect(TokenKind::Ident);
            std::string mode = m.text;
            std::transform(mode.begin(), mode.end(), mode.begin(), [](unsigned char c) { return std::tolower(c); });
            if (mode == "all") s.mode = MatchMode::All;
            else if (mode == "best") s.mode = MatchMode::Best;
            else throw ParseError(m.offset, {"all", "best"}, "'" + m.text + "'");
        } else {
            throw ParseError(name.offset, {"k", "max_radius", "mode"}, "'" + name.text + "'");
        }
    }

    Expr expression() { return or_expr(); }

    Expr or_expr() {
        Expr lhs = and_expr();
        while (peek().kind == TokenKind::Or || (tried_.insert("OR"), false)) {
            const std::size_t off = advance().offset;
            tried_.clear();
            lhs = Expr::binary_of(BinaryOp::Or, std::move(lhs), and_expr(), off);
        }
        return lhs;
    }

    Expr and_expr() {
        Expr lhs = not_expr();
        while (peek().kind == TokenKind::And || (tried_.insert("AND"), false)) {
            const std::size_t off = advance().offset;
            tried_.clear();
            lhs = Expr::binary_of(BinaryOp::And, std::move(lhs), not_expr(), off);
        }
        return lhs;
    }

    Expr not_expr() {
        if (peek().kind == TokenKind::Not) {
            const std::size_t off = advance().offset;
            tried_.clear();
            return Expr::unary_of(UnaryOp::Not, not_expr(), off);
        }
        return comparison();
    }

    Expr comparison() {
        Expr lhs = additive();
        const Token& t = peek();
        std::optional<BinaryOp> op;
        switch (t.kind) {
            case TokenKind::Lt: op = BinaryOp::Lt; break;
            case TokenKind::Le: op = BinaryOp::Le; break;
            case TokenKind::Eq: op = BinaryOp::Eq; break;
            case TokenKind::Ne: op = BinaryOp::Ne; break;
            case TokenKind::Ge: op = BinaryOp::Ge; break;
            case TokenKind::Gt: op = BinaryOp::Gt; break;
            case TokenKind::Is: {
                const std::size_t off = advance().offset;
                tried_.clear();
                Expr e;
                e.kind = ExprKind::IsNull;
                e.negated = accept(TokenKind::Not);
                expect(TokenKind::Null);
                e.args.push_back(std::move(lhs));
                e.offset = off;
                return e;
            }
            default:
                for (auto k : {TokenKind::Lt, TokenKind::Le, TokenKind::Eq, TokenKind::Ne, TokenKind::Ge,
                               TokenKind::Gt, TokenKind::Is})
                    tried_.insert(std::string(describe(k)));
                return lhs;
        }
        const std::size_t off = advance().offset;
        tried_.clear();
        return Expr::binary_of(*op, std::move(lhs), additive(), off);
    }

    Expr additive() {
        Expr lhs = multiplicative();
        for (;;) {
            const auto k = peek().kind;
            if (k != TokenKind::Plus && k != TokenKind::Minus) {
                tried_.insert("'+'");
                tried_.insert("'-'");
                return lhs;
            }
            const std::size_t off = advance().offset;
            tried_.clear();
            lhs = Expr::binary_of(k == TokenKind::Plus ? BinaryOp::Add : BinaryOp::Sub, std::move(lhs),
                                  multiplicative(), off);
        }
    }

    Expr multiplicative() {
        Expr lhs = unary();
        for (;;) {
            const auto k = peek().kind;
            if (k != TokenKind::Star && k != TokenKind::Slash) {
                tried_.insert("'*'");
                tried_.insert("'/'");
                return lhs;
            }
            const std::size_t off = advance().offset;
            tried_.clear();
            lhs = Expr::binary_of(k == TokenKind::Star ? BinaryOp::Mul : BinaryOp::Div, std::move(lhs), unary(),
                                  off);
        }
    }

    Expr unary() {
        if (peek().kind == TokenKind::Minus) {
            const std::size_t off = advance().offset;
            tried_.clear();
            return Expr::unary_of(UnaryOp::Neg, unary(), off);
        }
        if (peek().kind == TokenKind::Plus) {
            advance();
            tried_.clear();
            return unary();
        }
        return primary();
    }

    Expr primary() {
        const Token& t = peek();
        switch (t.kind) {
            case TokenKind::IntLit: {
                advance();
                tried_.clear();
                std::int64_t v = 0;
                std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
                return Expr::literal_of(v, t.offset);
            }
            case TokenKind::FloatLit: {
                advance();
                tried_.clear();
                double v = 0;
                std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
                return Expr::literal_of(v, t.offset);
            }
            case TokenKind::StringLit:
                advance();
                tried_.clear();
                return Expr::literal_of(t.text, t.offset);
            case TokenKind::LParen: {
                advance();
                tried_.clear();
                Expr e = expression();
                expect(TokenKind::RParen);
                return e;
            }
            case TokenKind::Ident: {
                advance();
                tried_.clear();
                if (accept(TokenKind::LParen)) return call(t);
                if (accept(TokenKind::Dot)) {
                    const Token& col = expect(TokenKind::Ident);
                    return Expr::column(col.text, t.text, t.offset);
                }
                return Expr::column(t.text, {}, t.offset);
            }
            default:
                for (const char* s : {"identifier", "number", "string", "'('", "'-'", "NOT"}) tried_.insert(s);
                fail();
        }
    }

    Expr call(const Token& name) {
        std::string upper = name.text;
        std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
        Expr e = Expr::call(upper, {}, name.offset);
        if (accept(TokenKind::Star)) {
            e.star_arg = true;
            expect(TokenKind::RParen);
            return e;
        }
        if (accept(TokenKind::RParen)) return e;
        do e.args.push_back(expression());
        while (accept(TokenKind::Comma));
        expect(TokenKind::RParen);
        return e;
    }

    const std::vector<Token>& toks_;
    std::size_t pos_ = 0;
    std::set<std::string> tried_;
};

}  // namespace

ParseError::ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& found)
    : Error("parse_error",
            "syntax error at offset " + std::to_string(offset) + ": expected " + expected_list(expected) +
                ", found " + found,
            offset),
      expected_(std::move(expected)) {}

Query parse(const std::vector<Token>& tokens) { return Parser(tokens).query(); }

Query parse_query(std::string_view text) { return parse(tokenize(text)); }

Expr parse_expression(std::string_view text) { return Parser(tokenize(text)).standalone_expression(); }

std::string annotate_error(std::string_view text, const Error& e) {
    std::string out = "error[" + e.code() + "]: " + e.what() + "\n";
    if (!e.offset()) return out;
    const std::size_t off = std::min(*e.offset(), text.size());
    std::size_t line_start = 0;
    if (off > 0) {
        const auto nl = text.rfind('\n', off - 1);
        if (nl != std::string_view::npos) line_start = nl + 1;
    }
    std::size_t line_end = text.find('\n', off);
    if (line_end == std::string_view::npos) line_end = text.size();
    out += "  " + std::string(text.substr(line_start, line_end - line_start)) + "\n";
    out += "  " + std::string(off - line_start, ' ') + "^\n";
    return out;
}

}  // namespace skyfed::query
