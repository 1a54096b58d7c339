#include "skyfed/query/ast.hpp"

#include <algorithm>

namespace skyfed::query {

Expr Expr::column(std::string name, std::string qualifier, std::size_t offset) {
    Expr e;
    e.kind = ExprKind::Column;
    e.name = std::move(name);
    e.qualifier = std::move(qualifier);
    e.offset = offset;
    return e;
}

Expr Expr::literal_of(Value v, std::size_t offset) {
    Expr e;
    e.kind = ExprKind::Literal;
    e.literal = std::move(v);
    e.offset = offset;
    return e;
}

Expr Expr::unary_of(UnaryOp op, Expr operand, std::size_t offset) {
    Expr e;
    e.kind = ExprKind::Unary;
    e.unary = op;
    e.args.push_back(std::move(operand));
    e.offset = offset;
    return e;
}

Expr Expr::binary_of(BinaryOp op, Expr lhs, Expr rhs, std::size_t offset) {
    Expr e;
    e.kind = ExprKind::Binary;
    e.binary = op;
    e.args.push_back(std::move(lhs));
    e.args.push_back(std::move(rhs));
    e.offset = offset;
    return e;
}

Expr Expr::call(std::string name, std::vector<Expr> args, std::size_t offset) {
    Expr e;
    e.kind = ExprKind::Call;
    e.name = std::move(name);
    e.args = std::move(args);
    e.offset = offset;
    return e;
}

bool Expr::operator==(const Expr& o) const {
    if (kind != o.kind || args != o.args) return false;
    switch (kind) {
        case ExprKind::Column: return name == o.name && qualifier == o.qualifier;
        case ExprKind::Literal: return literal == o.literal;
        case ExprKind::Unary: return unary == o.unary;
        case ExprKind::Binary: return binary == o.binary;
        case ExprKind::Call: return name == o.name && star_arg == o.star_arg;
        case ExprKind::IsNull: return negated == o.negated;
    }
    return false;
}

bool is_aggregate_name(const std::string& n) {
    return n == "COUNT" || n == "SUM" || n == "MIN" || n == "MAX" || n == "AVG";
}

bool contains_aggregate(const Expr& e) {
    if (e.kind == ExprKind::Call && is_aggregate_name(e.name)) return true;
    return std::any_of(e.args.begin(), e.args.end(), contains_aggregate);
}

namespace {
void collect_conjuncts(const Expr& e, std::vector<Expr>& out) {
    if (e.kind == ExprKind::Binary && e.binary == BinaryOp::And) {
        collect_conjuncts(e.args[0], out);
        collect_conjuncts(e.args[1], out);
    } else {
        out.push_back(e);
    }
}

const char* op_text(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
        case BinaryOp::Lt: return "<";
        case BinaryOp::Le: return "<=";
        case BinaryOp::Eq: return "=";
        case BinaryOp::Ne: return "!=";
        case BinaryOp::Ge: return ">=";
        case BinaryOp::Gt: return ">";
        case BinaryOp::And: return "AND";
        case BinaryOp::Or: return "OR";
    }
    return "?";
}

std::string literal_text(const Value& v) {
    switch (kind_of(v)) {
        case ValueKind::Int: return std::to_string(std::get<std::int64_t>(v));
        case ValueKind::Float: {
            std::string s = format_double(std::get<double>(v));
            if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
            return s;
        }
        case ValueKind::Text: {
            std::string out = "'";
            for (char c : std::get<std::string>(v)) {
                if (c == '\'') out.push_back('\'');
                out.push_back(c);
            }
            return out + "'";
        }
        case ValueKind::Bool: return std::get<bool>(v) ? "TRUE" : "FALSE";
        case ValueKind::Null: break;
    }
    return "NULL";
}

std::string number_text(double v) {
    std::string s = format_double(v);
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
}
}  // namespace

std::vector<Expr> conjuncts(const Expr& e) {
    std::vector<Expr> out;
    collect_conjuncts(e, out);
    return out;
}

std::optional<Expr> conjoin(std::vector<Expr> parts) {
    if (parts.empty()) return std::nullopt;
    Expr acc = std::move(parts.front());
    for (std::size_t i = 1; i < parts.size(); ++i)
        acc = Expr::binary_of(BinaryOp::And, std::move(acc), std::move(parts[i]));
    return acc;
}

std::string to_text(const Expr& e) {
    switch (e.kind) {
        case ExprKind::Column: return e.qualifier.empty() ? e.name : e.qualifier + "." + e.name;
        case ExprKind::Literal: return literal_text(e.literal);
        case ExprKind::Unary:
            return e.unary == UnaryOp::Neg ? "(-" + to_text(e.args[0]) + ")" : "(NOT " + to_text(e.args[0]) + ")";
        case ExprKind::Binary:
            return "(" + to_text(e.args[0]) + " " + op_text(e.binary) + " " + to_text(e.args[1]) + ")";
        case ExprKind::IsNull:
            return "(" + to_text(e.args[0]) + (e.negated ? " IS NOT NULL)" : " IS NULL)");
        case ExprKind::Call: {
            std::string out = e.name + "(";
            if (e.star_arg) out += "*";
            for (std::size_t i = 0; i < e.args.size(); ++i) {
                if (i) out += ", ";
                out += to_text(e.args[i]);
            }
            return out + ")";
        }
    }
    return "";
}

std::string to_text(const Query& q) {
    std::string out = "SELECT ";
    if (q.select_star) out += "*";
    for (std::size_t i = 0; i < q.select.size(); ++i) {
        if (i) out += ", ";
        out += to_text(q.select[i].expr);
        if (q.select[i].alias) out += " AS " + *q.select[i].alias;
    }
    out += " FROM ";
    if (q.from.kind == Source::Kind::Table) {
        out += q.from.table;
    } else {
        out += "XMATCH(";
        for (std::size_t i = 0; i < q.from.surveys.size(); ++i) {
            if (i) out += ", ";
            out += q.from.surveys[i];
        }
        out += ")";
        std::vector<std::string> opts;
        if (q.from.k) opts.push_back("k = " + number_text(*q.from.k));
        if (q.from.max_radius_arcsec) opts.push_back("max_radius = " + number_text(*q.from.max_radius_arcsec));
        if (q.from.mode) opts.push_back(std::string("mode = ") + (*q.from.mode == MatchMode::All ? "all" : "best"));
        for (std::size_t i = 0; i < opts.size(); ++i) out += (i ? ", " : " WITH ") + opts[i];
    }
    if (q.where) out += " WHERE " + to_text(*q.where);
    if (!q.group_by.empty()) {
        out += " GROUP BY ";
        for (std::size_t i = 0; i < q.group_by.size(); ++i) out += (i ? ", " : "") + to_text(q.group_by[i]);
    }
    if (!q.order_by.empty()) {
        out += " ORDER BY ";
        for (std::size_t i = 0; i < q.order_by.size(); ++i)
            out += (i ? ", " : "") + to_text(q.order_by[i].expr) + (q.order_by[i].descending ? " DESC" : " ASC");
    }
    if (q.limit) out += " LIMIT " + std::to_string(*q.limit);
    return out;
}

Expr strip_qualifiers(const Expr& e) {
    Expr out = e;
    out.qualifier.clear();
    for (auto& a : out.args) a = strip_qualifiers(a);
    return out;
}

}  // namespace skyfed::query
