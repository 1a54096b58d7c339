#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "skyfed/query/ast.hpp"
#include "skyfed/result_table.hpp"
#include "skyfed/schema.hpp"

namespace skyfed::query {

struct LayoutColumn {
    std::string name;
    std::string qualifier;
    ValueKind kind = ValueKind::Float;
};

/// Shape of the rows a plan runs over, and how names resolve against it.
struct RowLayout {
    std::vector<LayoutColumn> columns;
    std::optional<std::size_t> ra_slot;   // implicit position used by CONE(...)
    std::optional<std::size_t> dec_slot;
    std::vector<std::size_t> tiebreak_slots;
    bool qualify_output_names = false;

    /// Slot of a (possibly qualified) column; throws plan_error for unknown or
    /// ambiguous names, listing the candidates.
    std::size_t resolve(const std::string& name, const std::string& qualifier, std::size_t offset) const;
    std::string display_name(std::size_t slot) const;
};

/// Domestic columns of one catalog: object_id, ra, dec, sigma_pos, class,
/// extent, mag_<band>... Columns carry the survey name as qualifier.
RowLayout node_layout(const CatalogSchema& schema);

enum class Op {
    Slot, Const, Neg, Not, Add, Sub, Mul, Div,
    Lt, Le, Eq, Ne, Ge, Gt, And, Or, IsNull, IsNotNull,
    Floor, Abs, Separation, Cone,
};

/// Type-checked expression with columns bound to row slots.
struct Compiled {
    Op op = Op::Const;
    ValueKind type = ValueKind::Null;
    std::size_t slot = 0;   // Slot; ra slot for Cone
    std::size_t slot2 = 0;  // dec slot for Cone
    Value constant;
    std::vector<Compiled> args;
};

struct EvalStats {
    std::size_t division_by_zero = 0;
};

Value evaluate(const Compiled& e, std::span<const Value> row, EvalStats& stats);

/// Compiles a scalar or boolean expression over a layout; aggregates rejected.
Compiled compile_expression(const Expr& e, const RowLayout& layout);

struct ConeScan {
    double ra_deg;
    double dec_deg;
    double radius_deg;
};

struct AggregateSpec {
    std::string function;  // COUNT, SUM, MIN, MAX, AVG
    bool star = false;
    std::optional<Compiled> arg;
    ValueKind type = ValueKind::Int;
};

struct SortKey {
    Compiled expr;
    bool descending = false;
};

struct Plan {
    RowLayout layout;
    std::optional<ConeScan> cone;
    std::optional<Compiled> filter;
    bool aggregate = false;
    std::vector<Compiled> group_keys;     // over input rows
    std::vector<AggregateSpec> aggregates;
    std::vector<Compiled> outputs;        // over input rows, or over [keys..., aggregates...]
    std::vector<SortKey> order;           // same row space as outputs
    std::vector<ColumnSpec> columns;
    std::optional<std::int64_t> limit;

    bool uses_cone_scan() const noexcept { return cone.has_value(); }
    std::string describe() const;
};

struct PlanOptions {
    bool use_index = true;
};

/// Plans a single-table node query against a catalog schema. A top-level
/// CONE conjunct with constant arguments becomes a zone-index scan.
Plan plan(const Query& q, const CatalogSchema& schema, PlanOptions options = {});

/// Plans the select/where/group/order/limit parts of `q` over an arbitrary
/// layout, ignoring the FROM clause. Never produces a cone scan.
Plan plan_over_layout(const Query& q, RowLayout layout);

}  // namespace skyfed::query
