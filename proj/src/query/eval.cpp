#include <cmath>

#include "skyfed/error.hpp"
#include "skyfed/geometry.hpp"
#include "skyfed/query/plan.hpp"

namespace skyfed::query {

namespace {

Value arithmetic(Op op, const Value& a, const Value& b, EvalStats& stats) {
    if (is_null(a) || is_null(b)) return std::monostate{};
    const bool ints = std::holds_alternative<std::int64_t>(a) && std::holds_alternative<std::int64_t>(b);
    if (op == Op::Div) {
        const double d = as_double(b);
        if (d == 0.0) {
            ++stats.division_by_zero;
            return std::monostate{};
        }
        return as_double(a) / d;
    }
    if (ints) {
        // Wrap on overflow instead of invoking undefined behaviour.
        const auto x = static_cast<std::uint64_t>(std::get<std::int64_t>(a));
        const auto y = static_cast<std::uint64_t>(std::get<std::int64_t>(b));
        switch (op) {
            case Op::Add: return static_cast<std::int64_t>(x + y);
            case Op::Sub: return static_cast<std::int64_t>(x - y);
            default: return static_cast<std::int64_t>(x * y);
        }
    }
    const double x = as_double(a), y = as_double(b);
    switch (op) {
        case Op::Add: return x + y;
        case Op::Sub: return x - y;
        default: return x * y;
    }
}

Value comparison(Op op, const Value& a, const Value& b) {
    if (is_null(a) || is_null(b)) return std::monostate{};
    int c;
    if (is_numeric(a) && is_numeric(b)) {
        if (std::holds_alternative<std::int64_t>(a) && std::holds_alternative<std::int64_t>(b)) {
            const auto x = std::get<std::int64_t>(a), y = std::get<std::int64_t>(b);
            c = x < y ? -1 : (y < x ? 1 : 0);
        } else {
            const double x = as_double(a), y = as_double(b);
            if (std::isnan(x) || std::isnan(y)) return std::monostate{};
            c = x < y ? -1 : (y < x ? 1 : 0);
        }
    } else {
        c = compare_values(a, b);
    }
    switch (op) {
        case Op::Lt: return c < 0;
        case Op::Le: return c <= 0;
        case Op::Eq: return c == 0;
        case Op::Ne: return c != 0;
        case Op::Ge: return c >= 0;
        default: return c > 0;
    }
}

}  // namespace

Value evaluate(const Compiled& e, std::span<const Value> row, EvalStats& stats) {
    switch (e.op) {
        case Op::Slot: return row[e.slot];
        case Op::Const: return e.constant;
        case Op::Neg: {
            Value v = evaluate(e.args[0], row, stats);
            if (auto i = std::get_if<std::int64_t>(&v))
                return static_cast<std::int64_t>(0ULL - static_cast<std::uint64_t>(*i));
            if (auto d = std::get_if<double>(&v)) return -*d;
            return std::monostate{};
        }
        case Op::Not: {
            Value v = evaluate(e.args[0], row, stats);
            if (auto b = std::get_if<bool>(&v)) return !*b;
            return std::monostate{};
        }
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::Div:
            return arithmetic(e.op, evaluate(e.args[0], row, stats), evaluate(e.args[1], row, stats), stats);
        case Op::Lt:
        case Op::Le:
        case Op::Eq:
        case Op::Ne:
        case Op::Ge:
        case Op::Gt:
            return comparison(e.op, evaluate(e.args[0], row, stats), evaluate(e.args[1], row, stats));
        case Op::And: {
            Value a = evaluate(e.args[0], row, stats);
            if (a == Value(false)) return false;
            Value b = evaluate(e.args[1], row, stats);
            if (b == Value(false)) return false;
            if (is_null(a) || is_null(b)) return std::monostate{};
            return true;
        }
        case Op::Or: {
            Value a = evaluate(e.args[0], row, stats);
            if (a == Value(true)) return true;
            Value b = evaluate(e.args[1], row, stats);
            if (b == Value(true)) return true;
            if (is_null(a) || is_null(b)) return std::monostate{};
            return false;
        }
        case Op::IsNull: return is_null(evaluate(e.args[0], row, stats));
        case Op::IsNotNull: return !is_null(evaluate(e.args[0], row, stats));
        case Op::Floor: {
            Value v = evaluate(e.args[0], row, stats);
            if (std::holds_alternative<std::int64_t>(v)) return v;
            if (auto d = std::get_if<double>(&v)) {
                const double f = std::floor(*d);
                if (!std::isfinite(f) || f < -9.2e18 || f > 9.2e18) return std::monostate{};
                return static_cast<std::int64_t>(f);
            }
            return std::monostate{};
        }
        case Op::Abs: {
            Value v = evaluate(e.args[0], row, stats);
            if (auto i = std::get_if<std::int64_t>(&v)) return *i < 0 ? static_cast<std::int64_t>(0ULL - static_cast<std::uint64_t>(*i)) : *i;
            if (auto d = std::get_if<double>(&v)) return std::fabs(*d);
            return std::monostate{};
        }
        case Op::Separation: {
            double v[4];
            for (int i = 0; i < 4; ++i) {
                Value a = evaluate(e.args[i], row, stats);
                if (is_null(a)) return std::monostate{};
                v[i] = as_double(a);
            }
            if (!std::isfinite(v[0]) || !std::isfinite(v[2]) || std::fabs(v[1]) > 90.0 || std::fabs(v[3]) > 90.0)
                return std::monostate{};
            return angular_separation(normalize_ra(v[0]), v[1], normalize_ra(v[2]), v[3]);
        }
        case Op::Cone: {
            double c[3];
            for (int i = 0; i < 3; ++i) {
                Value a = evaluate(e.args[i], row, stats);
                if (is_null(a)) return std::monostate{};
                c[i] = as_double(a);
            }
            const Value& ra = row[e.slot];
            const Value& dec = row[e.slot2];
            if (is_null(ra) || is_null(dec)) return std::monostate{};
            if (!std::isfinite(c[0]) || !(std::fabs(c[1]) <= 90.0) || !(c[2] >= 0.0 && c[2] <= 180.0))
                return std::monostate{};
            // Same operand order as the zone index so both paths agree bit for bit.
            const Vec3 center = to_unit_vector(normalize_ra(c[0]), c[1]);
            const Vec3 point = to_unit_vector(as_double(ra), as_double(dec));
            return angular_separation(center, point) <= c[2];
        }
    }
    throw Error("internal_error", "unhandled expression op");
}

}  // namespace skyfed::query
