#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "skyfed/value.hpp"

namespace skyfed::query {

enum class ExprKind { Column, Literal, Unary, Binary, Call, IsNull };
enum class UnaryOp { Neg, Not };
enum class BinaryOp { Add, Sub, Mul, Div, Lt, Le, Eq, Ne, Ge, Gt, And, Or };

/// Expression tree node. Value semantics; `offset` is the byte offset of the
/// node's first token and does not take part in equality.
struct Expr {
    ExprKind kind = ExprKind::Literal;
    std::string name;       // column or (upper-cased) function name
    std::string qualifier;  // survey prefix of a qualified column
    Value literal;
    UnaryOp unary = UnaryOp::Neg;
    BinaryOp binary = BinaryOp::Add;
    bool star_arg = false;  // COUNT(*)
    bool negated = false;   // IS NOT NULL
    std::vector<Expr> args;
    std::size_t offset = 0;

    static Expr column(std::string name, std::string qualifier = {}, std::size_t offset = 0);
    static Expr literal_of(Value v, std::size_t offset = 0);
    static Expr unary_of(UnaryOp op, Expr operand, std::size_t offset = 0);
    static Expr binary_of(BinaryOp op, Expr lhs, Expr rhs, std::size_t offset = 0);
    static Expr call(std::string name, std::vector<Expr> args, std::size_t offset = 0);

    bool operator==(const Expr& other) const;
};

struct SelectItem {
    Expr expr;
    std::optional<std::string> alias;
    bool operator==(const SelectItem&) const = default;
};

struct OrderItem {
    Expr expr;
    bool descending = false;
    bool operator==(const OrderItem&) const = default;
};

enum class MatchMode { All, Best };

struct Source {
    enum class Kind { Table, XMatch };
    Kind kind = Kind::Table;
    std::string table;                 // Table
    std::vector<std::string> surveys;  // XMatch
    std::optional<double> k;
    std::optional<double> max_radius_arcsec;
    std::optional<MatchMode> mode;
    std::size_t offset = 0;

    bool operator==(const Source& o) const {
        return kind == o.kind && table == o.table && surveys == o.surveys && k == o.k &&
               max_radius_arcsec == o.max_radius_arcsec && mode == o.mode;
    }
};

struct Query {
    bool select_star = false;
    std::vector<SelectItem> select;
    Source from;
    std::optional<Expr> where;
    std::vector<Expr> group_by;
    std::vector<OrderItem> order_by;
    std::optional<std::int64_t> limit;

    bool operator==(const Query&) const = default;
};

bool is_aggregate_name(const std::string& upper_name);
bool contains_aggregate(const Expr& e);

/// Splits a tree of ANDs into its top-level conjuncts.
std::vector<Expr> conjuncts(const Expr& e);
/// Joins conjuncts back with AND; nullopt when empty.
std::optional<Expr> conjoin(std::vector<Expr> parts);

/// Canonical text: keywords upper-case, every compound sub-expression
/// parenthesised, so that parse(to_text(q)) == q.
std::string to_text(const Expr& e);
std::string to_text(const Query& q);

/// Copy of `e` with every column qualifier removed.
Expr strip_qualifiers(const Expr& e);

}  // namespace skyfed::query
