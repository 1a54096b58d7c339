#include <algorithm>
#include <cmath>
#include <sstream>

#include "skyfed/error.hpp"
#include "skyfed/query/plan.hpp"

namespace skyfed::query {

namespace {

[[noreturn]] void plan_error(const std::string& message, std::size_t offset) {
    throw Error("plan_error", message, offset);
}

bool numeric_kind(ValueKind k) { return k == ValueKind::Int || k == ValueKind::Float; }

struct FunctionSig {
    const char* name;
    std::size_t arity;
};
constexpr FunctionSig kScalarFunctions[] = {{"CONE", 3}, {"FLOOR", 1}, {"ABS", 1}, {"SEPARATION", 4}};

bool has_column_ref(const Expr& e) {
    if (e.kind == ExprKind::Column) return true;
    return std::any_of(e.args.begin(), e.args.end(), has_column_ref);
}

class Compiler {
public:
    explicit Compiler(const RowLayout& layout) : layout_(layout) {}

    // Row mode: columns bind to layout slots.
    Compiled row(const Expr& e) {
        post_ = false;
        return compile(e);
    }

    // Post-aggregation mode: leaves are group keys or aggregate results.
    Compiled post(const Expr& e, const std::vector<Expr>& group_exprs, const std::vector<Compiled>& group_keys,
                  const std::vector<SelectItem>* aliases) {
        post_ = true;
        group_exprs_ = &group_exprs;
        group_keys_ = &group_keys;
        aliases_ = aliases;
        return compile(e);
    }

    std::vector<Expr> aggregate_exprs;
    std::vector<AggregateSpec> aggregates;

private:
    Compiled compile(const Expr& e) {
        if (post_) {
            for (std::size_t i = 0; i < group_exprs_->size(); ++i)
                if ((*group_exprs_)[i] == e) return slot(i, (*group_keys_)[i].type);
            if (e.kind == ExprKind::Call && is_aggregate_name(e.name)) return aggregate(e);
            if (e.kind == ExprKind::Column) {
                if (aliases_ && e.qualifier.empty())
                    for (const auto& item : *aliases_)
                        if (item.alias && *item.alias == e.name && !(item.expr == e)) return compile(item.expr);
                layout_.resolve(e.name, e.qualifier, e.offset);
                plan_error("column " + to_text(e) + " must appear in GROUP BY or inside an aggregate", e.offset);
            }
        }
        switch (e.kind) {
            case ExprKind::Column: {
                const std::size_t s = layout_.resolve(e.name, e.qualifier, e.offset);
                return slot(s, layout_.columns[s].kind);
            }
            case ExprKind::Literal: {
                Compiled c;
                c.op = Op::Const;
                c.constant = e.literal;
                c.type = kind_of(e.literal);
                return c;
            }
            case ExprKind::Unary: {
                Compiled c;
                c.args.push_back(compile(e.args[0]));
                if (e.unary == UnaryOp::Neg) {
                    if (!numeric_kind(c.args[0].type)) plan_error("type error: '-' needs a number", e.offset);
                    c.op = Op::Neg;
                    c.type = c.args[0].type;
                } else {
                    if (c.args[0].type != ValueKind::Bool) plan_error("type error: NOT needs a boolean", e.offset);
                    c.op = Op::Not;
                    c.type = ValueKind::Bool;
                }
                return c;
            }
            case ExprKind::IsNull: {
                Compiled c;
                c.op = e.negated ? Op::IsNotNull : Op::IsNull;
                c.type = ValueKind::Bool;
                c.args.push_back(compile(e.args[0]));
                return c;
            }
            case ExprKind::Binary: return binary(e);
            case ExprKind::Call: return call(e);
        }
        plan_error("unsupported expression", e.offset);
    }

    static Compiled slot(std::size_t s, ValueKind kind) {
        Compiled c;
        c.op = Op::Slot;
        c.slot = s;
        c.type = kind;
        return c;
    }

    Compiled binary(const Expr& e) {
        Compiled c;
        c.args.push_back(compile(e.args[0]));
        c.args.push_back(compile(e.args[1]));
        const ValueKind a = c.args[0].type, b = c.args[1].type;
        switch (e.binary) {
            case BinaryOp::Add:
            case BinaryOp::Sub:
            case BinaryOp::Mul:
            case BinaryOp::Div:
                if (!numeric_kind(a) || !numeric_kind(b))
                    plan_error("type error: arithmetic needs numbers, got " + std::string(kind_name(a)) + " and " +
                                   kind_name(b),
                               e.offset);
                c.op = e.binary == BinaryOp::Add   ? Op::Add
                       : e.binary == BinaryOp::Sub ? Op::Sub
                       : e.binary == BinaryOp::Mul ? Op::Mul
                                                   : Op::Div;
                c.type = (c.op != Op::Div && a == ValueKind::Int && b == ValueKind::Int) ? ValueKind::Int
                                                                                        : ValueKind::Float;
                return c;
            case BinaryOp::And:
            case BinaryOp::Or:
                if (a != ValueKind::Bool || b != ValueKind::Bool)
                    plan_error("type error: AND/OR need boolean operands", e.offset);
                c.op = e.binary == BinaryOp::And ? Op::And : Op::Or;
                c.type = ValueKind::Bool;
                return c;
            default: {
                const bool ok = (numeric_kind(a) && numeric_kind(b)) || (a == ValueKind::Text && b == ValueKind::Text);
                if (!ok)
                    plan_error("type error: cannot compare " + std::string(kind_name(a)) + " with " + kind_name(b),
                               e.offset);
                static constexpr Op ops[] = {Op::Lt, Op::Le, Op::Eq, Op::Ne, Op::Ge, Op::Gt};
                c.op = ops[static_cast<int>(e.binary) - static_cast<int>(BinaryOp::Lt)];
                c.type = ValueKind::Bool;
                return c;
            }
        }
    }

    Compiled call(const Expr& e) {
        if (is_aggregate_name(e.name)) plan_error("aggregate " + e.name + " is not allowed here", e.offset);
        const FunctionSig* sig = nullptr;
        for (const auto& f : kScalarFunctions)
            if (e.name == f.name) sig = &f;
        if (!sig) {
            std::string names;
            for (const auto& f : kScalarFunctions) names += std::string(names.empty() ? "" : ", ") + f.name;
            plan_error("unknown function " + e.name + "; available: COUNT, SUM, MIN, MAX, AVG, " + names, e.offset);
        }
        if (e.star_arg || e.args.size() != sig->arity)
            plan_error(e.name + " expects " + std::to_string(sig->arity) + " argument(s), got " +
                           (e.star_arg ? std::string("*") : std::to_string(e.args.size())),
                       e.offset);
        Compiled c;
        for (const auto& a : e.args) {
            c.args.push_back(compile(a));
            if (!numeric_kind(c.args.back().type))
                plan_error("type error: " + e.name + " needs numeric arguments", a.offset);
        }
        const std::string& n = e.name;
        if (n == "FLOOR") {
            c.op = Op::Floor;
            c.type = ValueKind::Int;
        } else if (n == "ABS") {
            c.op = Op::Abs;
            c.type = c.args[0].type;
        } else if (n == "SEPARATION") {
            c.op = Op::Separation;
            c.type = ValueKind::Float;
        } else {
            if (post_ || !layout_.ra_slot || !layout_.dec_slot)
                plan_error("CONE needs a row position; it is only valid in WHERE over a catalog", e.offset);
            c.op = Op::Cone;
            c.slot = *layout_.ra_slot;
            c.slot2 = *layout_.dec_slot;
            c.type = ValueKind::Bool;
        }
        return c;
    }

    Compiled aggregate(const Expr& e) {
        std::size_t index = aggregate_exprs.size();
        for (std::size_t i = 0; i < aggregate_exprs.size(); ++i)
            if (aggregate_exprs[i] == e) index = i;
        if (index == aggregate_exprs.size()) {
            AggregateSpec spec;
            spec.function = e.name;
            spec.star = e.star_arg;
            if (e.star_arg) {
                if (e.name != "COUNT") plan_error(e.name + "(*) is not supported; only COUNT(*)", e.offset);
                if (!e.args.empty()) plan_error("COUNT(*) takes no other argument", e.offset);
                spec.type = ValueKind::Int;
            } else {
                if (e.args.size() != 1)
                    plan_error(e.name + " expects 1 argument, got " + std::to_string(e.args.size()), e.offset);
                if (contains_aggregate(e.args[0])) plan_error("nested aggregates are not allowed", e.offset);
                Compiler inner(layout_);
                Compiled arg = inner.row(e.args[0]);
                if (arg.type == ValueKind::Bool) plan_error("type error: cannot aggregate a boolean", e.offset);
                if ((e.name == "SUM" || e.name == "AVG") && !numeric_kind(arg.type))
                    plan_error("type error: " + e.name + " needs a number", e.offset);
                if (e.name == "COUNT") spec.type = ValueKind::Int;
                else if (e.name == "AVG") spec.type = ValueKind::Float;
                else spec.type = arg.type;
                spec.arg = std::move(arg);
            }
            aggregate_exprs.push_back(e);
            aggregates.push_back(std::move(spec));
        }
        return slot(group_keys_->size() + index, aggregates[index].type);
    }

    const RowLayout& layout_;
    bool post_ = false;
    const std::vector<Expr>* group_exprs_ = nullptr;
    const std::vector<Compiled>* group_keys_ = nullptr;
    const std::vector<SelectItem>* aliases_ = nullptr;
};

std::optional<double> fold_number(const Expr& e, const RowLayout& layout) {
    if (has_column_ref(e) || contains_aggregate(e)) return std::nullopt;
    Compiled c = compile_expression(e, layout);
    if (!numeric_kind(c.type)) return std::nullopt;
    EvalStats stats;
    Value v = evaluate(c, {}, stats);
    if (is_null(v)) return std::nullopt;
    return as_double(v);
}

std::string output_name(const SelectItem& item, const RowLayout& layout) {
    if (item.alias) return *item.alias;
    if (item.expr.kind == ExprKind::Column)
        return layout.display_name(layout.resolve(item.expr.name, item.expr.qualifier, item.expr.offset));
    return to_text(item.expr);
}

// Substitutes a bare name that matches a select alias with the aliased expression.
Expr expand_alias(const Expr& e, const std::vector<SelectItem>& select) {
    if (e.kind == ExprKind::Column && e.qualifier.empty())
        for (const auto& item : select)
            if (item.alias && *item.alias == e.name) return item.expr;
    return e;
}

Plan build(const Query& q, RowLayout layout, std::optional<ConeScan> cone, std::optional<Expr> residual) {
    Plan p;
    p.layout = std::move(layout);
    p.cone = cone;
    p.limit = q.limit;
    if (q.limit && *q.limit < 0) plan_error("LIMIT must be non-negative", 0);

    std::vector<SelectItem> select = q.select;
    if (q.select_star) {
        select.clear();
        for (const auto& col : p.layout.columns) select.push_back({Expr::column(col.name, col.qualifier), std::nullopt});
    }
    for (std::size_t i = 0; i < select.size(); ++i)
        for (std::size_t j = i + 1; j < select.size(); ++j)
            if (select[i].alias && select[j].alias && *select[i].alias == *select[j].alias)
                plan_error("duplicate alias " + *select[i].alias, select[j].expr.offset);

    if (residual) {
        if (contains_aggregate(*residual)) plan_error("aggregates are not allowed in WHERE", residual->offset);
        Compiler c(p.layout);
        p.filter = c.row(*residual);
        if (p.filter->type != ValueKind::Bool) plan_error("WHERE must be a boolean expression", residual->offset);
    }

    bool any_aggregate = !q.group_by.empty();
    for (const auto& item : select) any_aggregate = any_aggregate || contains_aggregate(item.expr);
    for (const auto& item : q.order_by) any_aggregate = any_aggregate || contains_aggregate(item.expr);
    p.aggregate = any_aggregate;

    if (!p.aggregate) {
        Compiler c(p.layout);
        for (const auto& item : select) p.outputs.push_back(c.row(item.expr));
        for (const auto& item : q.order_by) p.order.push_back({c.row(expand_alias(item.expr, select)), item.descending});
        for (std::size_t s : p.layout.tiebreak_slots) {
            Compiled k;
            k.op = Op::Slot;
            k.slot = s;
            k.type = p.layout.columns[s].kind;
            p.order.push_back({std::move(k), false});
        }
    } else {
        std::vector<Expr> group_exprs;
        Compiler key_compiler(p.layout);
        for (const auto& g : q.group_by) {
            Expr expanded = expand_alias(g, select);
            if (contains_aggregate(expanded)) plan_error("aggregates are not allowed in GROUP BY", g.offset);
            p.group_keys.push_back(key_compiler.row(expanded));
            if (p.group_keys.back().type == ValueKind::Bool)
                plan_error("cannot group by a boolean expression", g.offset);
            group_exprs.push_back(std::move(expanded));
        }
        Compiler c(p.layout);
        for (const auto& item : select) p.outputs.push_back(c.post(item.expr, group_exprs, p.group_keys, nullptr));
        for (const auto& item : q.order_by)
            p.order.push_back({c.post(item.expr, group_exprs, p.group_keys, &select), item.descending});
        p.aggregates = std::move(c.aggregates);
    }

    std::vector<ColumnSpec> cols;
    for (std::size_t i = 0; i < select.size(); ++i) {
        const ValueKind k = p.outputs[i].type;
        if (k == ValueKind::Bool)
            plan_error("boolean expressions cannot be selected; use them in WHERE", select[i].expr.offset);
        cols.push_back({output_name(select[i], p.layout), k});
    }
    for (std::size_t i = 0; i < cols.size(); ++i)
        for (std::size_t j = i + 1; j < cols.size(); ++j)
            if (cols[i].name == cols[j].name)
                plan_error("duplicate output column " + cols[i].name + "; add an alias", select[j].expr.offset);
    p.columns = std::move(cols);
    return p;
}

}  // namespace

std::size_t RowLayout::resolve(const std::string& name, const std::string& qualifier, std::size_t offset) const {
    std::vector<std::size_t> hits;
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i].name == name && (qualifier.empty() || columns[i].qualifier == qualifier)) hits.push_back(i);
    if (hits.size() == 1) return hits.front();
    const std::string shown = qualifier.empty() ? name : qualifier + "." + name;
    if (hits.empty()) {
        std::string candidates;
        for (std::size_t i = 0; i < columns.size(); ++i)
            candidates += (i ? ", " : "") + display_name(i);
        plan_error("unknown column " + shown + "; candidates: " + candidates, offset);
    }
    std::string candidates;
    for (std::size_t i = 0; i < hits.size(); ++i)
        candidates += (i ? ", " : "") + columns[hits[i]].qualifier + "." + columns[hits[i]].name;
    plan_error("ambiguous column " + shown + "; qualify it as one of: " + candidates, offset);
}

std::string RowLayout::display_name(std::size_t slot) const {
    const auto& c = columns.at(slot);
    return qualify_output_names && !c.qualifier.empty() ? c.qualifier + "." + c.name : c.name;
}

RowLayout node_layout(const CatalogSchema& schema) {
    RowLayout layout;
    const auto& q = schema.survey_name;
    layout.columns = {{"object_id", q, ValueKind::Int}, {"ra", q, ValueKind::Float},
                      {"dec", q, ValueKind::Float},     {"sigma_pos", q, ValueKind::Float},
                      {"class", q, ValueKind::Text},    {"extent", q, ValueKind::Float}};
    for (const auto& b : schema.bands) layout.columns.push_back({"mag_" + b, q, ValueKind::Float});
    layout.ra_slot = 1;
    layout.dec_slot = 2;
    layout.tiebreak_slots = {0};
    return layout;
}

Compiled compile_expression(const Expr& e, const RowLayout& layout) {
    if (contains_aggregate(e)) plan_error("aggregates are not allowed here", e.offset);
    return Compiler(layout).row(e);
}

Plan plan(const Query& q, const CatalogSchema& schema, PlanOptions options) {
    if (q.from.kind == Source::Kind::XMatch)
        plan_error("XMATCH queries are answered by the portal, not by a single node", q.from.offset);
    RowLayout layout = node_layout(schema);

    std::optional<ConeScan> cone;
    std::optional<Expr> residual = q.where;
    if (q.where) {
        std::vector<Expr> parts = conjuncts(*q.where);
        for (std::size_t i = 0; i < parts.size(); ++i) {
            const Expr& c = parts[i];
            if (c.kind != ExprKind::Call || c.name != "CONE" || c.args.size() != 3 || c.star_arg) continue;
            auto ra = fold_number(c.args[0], layout);
            auto dec = fold_number(c.args[1], layout);
            auto r = fold_number(c.args[2], layout);
            if (!ra || !dec || !r) continue;
            if (!std::isfinite(*ra) || !(std::fabs(*dec) <= 90.0) || !(*r >= 0.0 && *r <= 180.0))
                plan_error("CONE arguments out of range: need finite ra, dec in [-90, 90], radius in [0, 180]",
                           c.offset);
            if (!options.use_index) continue;
            cone = ConeScan{normalize_ra(*ra), *dec, *r};
            parts.erase(parts.begin() + static_cast<std::ptrdiff_t>(i));
            residual = conjoin(std::move(parts));
            break;
        }
    }
    return build(q, std::move(layout), cone, std::move(residual));
}

Plan plan_over_layout(const Query& q, RowLayout layout) {
    return build(q, std::move(layout), std::nullopt, q.where);
}

std::string Plan::describe() const {
    std::ostringstream out;
    if (cone)
        out << "ConeScan(ra=" << format_double(cone->ra_deg) << ", dec=" << format_double(cone->dec_deg)
            << ", r=" << format_double(cone->radius_deg) << ")";
    else
        out << "FullScan";
    if (filter) out << " -> Filter";
    if (aggregate) out << " -> Aggregate(keys=" << group_keys.size() << ", aggs=" << aggregates.size() << ")";
    out << " -> Project(" << columns.size() << ")";
    if (!order.empty()) out << " -> Sort(" << order.size() << ")";
    if (limit) out << " -> Limit(" << *limit << ")";
    return out.str();
}

}  // namespace skyfed::query
