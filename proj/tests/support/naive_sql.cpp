#include "naive_sql.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>

#include "oracles.hpp"
#include "skyfed/wire.hpp"

namespace naive {

using namespace skyfed;
using namespace skyfed::query;

namespace {

bool is_num(const Value& v) { return std::holds_alternative<std::int64_t>(v) || std::holds_alternative<double>(v); }
double num(const Value& v) {
    return std::holds_alternative<std::int64_t>(v) ? static_cast<double>(std::get<std::int64_t>(v))
                                                   : std::get<double>(v);
}
bool null(const Value& v) { return std::holds_alternative<std::monostate>(v); }

int rank(const Value& v) {
    if (null(v)) return 0;
    if (is_num(v)) return 1;
    if (std::holds_alternative<std::string>(v)) return 2;
    return 3;
}

template <typename T>
int cmp(const T& a, const T& b) {
    return a < b ? -1 : (b < a ? 1 : 0);
}

using Leaf = std::function<std::optional<Value>(const Expr&)>;

Value eval_with(const Expr& e, const Row& row, const Leaf& leaf) {
    if (leaf)
        if (auto v = leaf(e)) return *v;
    switch (e.kind) {
        case ExprKind::Literal: return e.literal;
        case ExprKind::Column: {
            const std::string key = e.qualifier.empty() ? e.name : e.qualifier + "." + e.name;
            auto it = row.find(key);
            if (it == row.end()) throw std::runtime_error("oracle: no column " + key);
            return it->second;
        }
        case ExprKind::IsNull: return null(eval_with(e.args[0], row, leaf)) != e.negated;
        case ExprKind::Unary: {
            const Value v = eval_with(e.args[0], row, leaf);
            if (null(v)) return v;
            if (e.unary == UnaryOp::Not) return !std::get<bool>(v);
            if (auto i = std::get_if<std::int64_t>(&v)) return static_cast<std::int64_t>(0 - static_cast<std::uint64_t>(*i));
            return -std::get<double>(v);
        }
        case ExprKind::Binary: {
            if (e.binary == BinaryOp::And || e.binary == BinaryOp::Or) {
                const Value a = eval_with(e.args[0], row, leaf), b = eval_with(e.args[1], row, leaf);
                const bool dominant = e.binary == BinaryOp::Or;
                if (a == Value(dominant) || b == Value(dominant)) return dominant;
                if (null(a) || null(b)) return std::monostate{};
                return !dominant;
            }
            const Value a = eval_with(e.args[0], row, leaf), b = eval_with(e.args[1], row, leaf);
            if (null(a) || null(b)) return std::monostate{};
            const bool ints = std::holds_alternative<std::int64_t>(a) && std::holds_alternative<std::int64_t>(b);
            switch (e.binary) {
                case BinaryOp::Div:
                    if (num(b) == 0.0) return std::monostate{};
                    return num(a) / num(b);
                case BinaryOp::Add:
                case BinaryOp::Sub:
                case BinaryOp::Mul: {
                    if (ints) {
                        const auto x = static_cast<std::uint64_t>(std::get<std::int64_t>(a));
                        const auto y = static_cast<std::uint64_t>(std::get<std::int64_t>(b));
                        const std::uint64_t r = e.binary == BinaryOp::Add ? x + y : e.binary == BinaryOp::Sub ? x - y : x * y;
                        return static_cast<std::int64_t>(r);
                    }
                    const double x = num(a), y = num(b);
                    return e.binary == BinaryOp::Add ? x + y : e.binary == BinaryOp::Sub ? x - y : x * y;
                }
                default: {
                    int c;
                    if (ints) c = cmp(std::get<std::int64_t>(a), std::get<std::int64_t>(b));
                    else if (is_num(a)) {
                        if (std::isnan(num(a)) || std::isnan(num(b))) return std::monostate{};
                        c = cmp(num(a), num(b));
                    } else c = cmp(std::get<std::string>(a), std::get<std::string>(b));
                    switch (e.binary) {
                        case BinaryOp::Lt: return c < 0;
                        case BinaryOp::Le: return c <= 0;
                        case BinaryOp::Eq: return c == 0;
                        case BinaryOp::Ne: return c != 0;
                        case BinaryOp::Ge: return c >= 0;
                        default: return c > 0;
                    }
                }
            }
        }
        case ExprKind::Call: {
            std::vector<Value> args;
            for (const auto& a : e.args) args.push_back(eval_with(a, row, leaf));
            for (const auto& a : args)
                if (null(a)) return std::monostate{};
            if (e.name == "ABS") {
                if (auto i = std::get_if<std::int64_t>(&args[0])) return *i < 0 ? -*i : *i;
                return std::fabs(std::get<double>(args[0]));
            }
            if (e.name == "FLOOR") {
                if (std::holds_alternative<std::int64_t>(args[0])) return args[0];
                const double f = std::floor(std::get<double>(args[0]));
                if (!std::isfinite(f) || std::fabs(f) > 9.2e18) return std::monostate{};
                return static_cast<std::int64_t>(f);
            }
            if (e.name == "SEPARATION") {
                const double ra1 = num(args[0]), dec1 = num(args[1]), ra2 = num(args[2]), dec2 = num(args[3]);
                if (!std::isfinite(ra1) || !std::isfinite(ra2) || std::fabs(dec1) > 90 || std::fabs(dec2) > 90)
                    return std::monostate{};
                return oracle::separation_deg(ra1, dec1, ra2, dec2);
            }
            if (e.name == "CONE") {
                const Value& ra = row.at("@ra");
                const Value& dec = row.at("@dec");
                if (null(ra) || null(dec)) return std::monostate{};
                const double cra = num(args[0]), cdec = num(args[1]), r = num(args[2]);
                if (!std::isfinite(cra) || !(std::fabs(cdec) <= 90) || !(r >= 0 && r <= 180)) return std::monostate{};
                return oracle::separation_deg(cra, cdec, num(ra), num(dec)) <= r;
            }
            throw std::runtime_error("oracle: unexpected call " + e.name);
        }
    }
    return std::monostate{};
}

Value aggregate(const Expr& e, const std::vector<const Row*>& rows) {
    if (e.star_arg) return static_cast<std::int64_t>(rows.size());
    std::vector<Value> vals;
    for (const Row* r : rows) {
        Value v = eval_with(e.args[0], *r, {});
        if (!null(v)) vals.push_back(std::move(v));
    }
    if (e.name == "COUNT") return static_cast<std::int64_t>(vals.size());
    if (vals.empty()) return std::monostate{};
    if (e.name == "MIN" || e.name == "MAX") {
        Value best = vals[0];
        for (const auto& v : vals)
            if (e.name == "MIN" ? order(v, best) < 0 : order(v, best) > 0) best = v;
        return best;
    }
    const bool all_int = std::all_of(vals.begin(), vals.end(), [](const Value& v) { return std::holds_alternative<std::int64_t>(v); });
    if (e.name == "SUM" && all_int) {
        std::uint64_t s = 0;
        for (const auto& v : vals) s += static_cast<std::uint64_t>(std::get<std::int64_t>(v));
        return static_cast<std::int64_t>(s);
    }
    double s = 0;
    for (const auto& v : vals) s += num(v);
    return e.name == "SUM" ? s : s / static_cast<double>(vals.size());
}

Expr resolve_alias(const Expr& e, const std::vector<SelectItem>& select) {
    if (e.kind == ExprKind::Column && e.qualifier.empty())
        for (const auto& s : select)
            if (s.alias && *s.alias == e.name) return s.expr;
    return e;
}

}  // namespace

int order(const Value& a, const Value& b) {
    if (rank(a) != rank(b)) return cmp(rank(a), rank(b));
    switch (rank(a)) {
        case 0: return 0;
        case 1:
            if (std::holds_alternative<std::int64_t>(a) && std::holds_alternative<std::int64_t>(b))
                return cmp(std::get<std::int64_t>(a), std::get<std::int64_t>(b));
            return cmp(num(a), num(b));
        case 2: return cmp(std::get<std::string>(a), std::get<std::string>(b));
        default: return cmp(std::get<bool>(a), std::get<bool>(b));
    }
}

std::vector<Row> rows_of(const Catalog& c) {
    std::vector<Row> out;
    const auto& s = c.schema;
    for (const auto& o : c.objects) {
        Row r;
        auto put = [&](const std::string& name, Value v) {
            r[s.survey_name + "." + name] = v;
            r[name] = std::move(v);
        };
        put("object_id", static_cast<std::int64_t>(o.object_id));
        put("ra", o.pos.ra_deg());
        put("dec", o.pos.dec_deg());
        put("sigma_pos", o.sigma_pos_arcsec);
        put("class", std::string(to_string(o.object_class)));
        put("extent", o.extent_arcsec ? Value(*o.extent_arcsec) : Value());
        for (const auto& b : s.bands) {
            auto it = o.mags.find(b);
            put("mag_" + b, it == o.mags.end() ? Value() : Value(it->second));
        }
        r["@ra"] = o.pos.ra_deg();
        r["@dec"] = o.pos.dec_deg();
        out.push_back(std::move(r));
    }
    return out;
}

Value eval(const Expr& e, const Row& row) { return eval_with(e, row, {}); }

bool truthy(const Expr& e, const Row& row) { return eval(e, row) == Value(true); }

Result run(const Query& q, const std::vector<Row>& rows, const std::vector<std::string>& tiebreak,
           const std::vector<std::string>& star_columns) {
    std::vector<SelectItem> select = q.select;
    if (q.select_star) {
        select.clear();
        for (const auto& c : star_columns) {
            const auto dot = c.find('.');
            select.push_back({dot == std::string::npos ? Expr::column(c) : Expr::column(c.substr(dot + 1), c.substr(0, dot)),
                              std::nullopt});
        }
    }
    Result res;
    for (std::size_t i = 0; i < select.size(); ++i) {
        const auto& s = select[i];
        if (s.alias) res.names.push_back(*s.alias);
        else if (q.select_star) res.names.push_back(star_columns[i]);
        else if (s.expr.kind == ExprKind::Column) res.names.push_back(s.expr.name);
        else res.names.push_back(to_text(s.expr));
    }

    std::vector<const Row*> kept;
    for (const auto& r : rows)
        if (!q.where || truthy(*q.where, r)) kept.push_back(&r);

    bool agg = !q.group_by.empty();
    for (const auto& s : select) agg = agg || contains_aggregate(s.expr);
    for (const auto& o : q.order_by) agg = agg || contains_aggregate(o.expr);

    struct Out {
        std::vector<Value> key;
        std::vector<Value> values;
    };
    std::vector<Out> outs;
    if (!agg) {
        for (const Row* r : kept) {
            Out o;
            for (const auto& ob : q.order_by) o.key.push_back(eval(resolve_alias(ob.expr, select), *r));
            for (const auto& t : tiebreak) o.key.push_back(r->at(t));
            for (const auto& s : select) o.values.push_back(eval(s.expr, *r));
            outs.push_back(std::move(o));
        }
    } else {
        std::vector<Expr> keys;
        for (const auto& g : q.group_by) keys.push_back(resolve_alias(g, select));
        // Groups in key order.
        std::vector<std::pair<std::vector<Value>, std::vector<const Row*>>> groups;
        for (const Row* r : kept) {
            std::vector<Value> k;
            for (const auto& e : keys) k.push_back(eval(e, *r));
            auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) {
                if (g.first.size() != k.size()) return false;
                for (std::size_t i = 0; i < k.size(); ++i)
                    if (order(g.first[i], k[i]) != 0) return false;
                return true;
            });
            if (it == groups.end()) groups.push_back({k, {r}});
            else it->second.push_back(r);
        }
        if (groups.empty() && keys.empty()) groups.push_back({{}, {}});
        std::stable_sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
            for (std::size_t i = 0; i < a.first.size(); ++i)
                if (int c = order(a.first[i], b.first[i])) return c < 0;
            return false;
        });
        for (const auto& [k, members] : groups) {
            const Row empty;
            const Leaf leaf = [&](const Expr& e) -> std::optional<Value> {
                for (std::size_t i = 0; i < keys.size(); ++i)
                    if (keys[i] == e) return k[i];
                if (e.kind == ExprKind::Call && is_aggregate_name(e.name)) return aggregate(e, members);
                return std::nullopt;
            };
            Out o;
            for (const auto& ob : q.order_by) {
                Expr target = ob.expr;
                if (target.kind == ExprKind::Column && target.qualifier.empty()) {
                    bool is_key = std::any_of(keys.begin(), keys.end(), [&](const Expr& x) { return x == target; });
                    if (!is_key) target = resolve_alias(target, select);
                }
                o.key.push_back(eval_with(target, empty, leaf));
            }
            for (const auto& s : select) o.values.push_back(eval_with(s.expr, empty, leaf));
            outs.push_back(std::move(o));
        }
    }
    std::stable_sort(outs.begin(), outs.end(), [&](const Out& a, const Out& b) {
        for (std::size_t i = 0; i < a.key.size(); ++i) {
            const int c = order(a.key[i], b.key[i]);
            if (c == 0) continue;
            const bool desc = i < q.order_by.size() && q.order_by[i].descending;
            return desc ? c > 0 : c < 0;
        }
        return false;
    });
    std::size_t n = outs.size();
    if (q.limit) n = std::min<std::size_t>(n, static_cast<std::size_t>(*q.limit));
    for (std::size_t i = 0; i < n; ++i) res.rows.push_back(std::move(outs[i].values));
    return res;
}

bool same(const Result& expected, const ResultTable& actual, std::string* why) {
    auto fail = [&](const std::string& m) {
        if (why) *why = m;
        return false;
    };
    std::vector<std::string> names;
    for (const auto& c : actual.columns()) names.push_back(c.name);
    if (names != expected.names) return fail("column names differ");
    if (expected.rows.size() != actual.rows().size())
        return fail("row count " + std::to_string(actual.rows().size()) + " vs expected " +
                    std::to_string(expected.rows.size()));
    for (std::size_t i = 0; i < expected.rows.size(); ++i) {
        for (std::size_t j = 0; j < names.size(); ++j) {
            const Value& a = expected.rows[i][j];
            const Value& b = actual.rows()[i][j];
            bool ok;
            if (std::holds_alternative<double>(a) && std::holds_alternative<double>(b)) {
                const double x = std::get<double>(a), y = std::get<double>(b);
                ok = x == y || std::fabs(x - y) <= 1e-9 * std::max({1.0, std::fabs(x), std::fabs(y)});
            } else {
                ok = a == b;
            }
            if (!ok)
                return fail("row " + std::to_string(i) + " column " + names[j] + ": " + to_display(b) + " vs expected " +
                            to_display(a));
        }
    }
    return true;
}

nlohmann::json to_json(const Result& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& v : row) out.push_back(skyfed::wire::value_to_json(v));
        rows.push_back(std::move(out));
    }
    return {{"columns", r.names}, {"rows", std::move(rows)}};
}

Result from_json(const nlohmann::json& j) {
    Result r;
    r.names = j.at("columns").get<std::vector<std::string>>();
    for (const auto& row : j.at("rows")) {
        std::vector<Value> values;
        for (const auto& v : row) {
            if (v.is_null()) values.emplace_back();
            else if (v.is_boolean()) values.emplace_back(v.get<bool>());
            else if (v.is_number_integer()) values.emplace_back(v.get<std::int64_t>());
            else if (v.is_number()) values.emplace_back(v.get<double>());
            else values.emplace_back(v.get<std::string>());
        }
        r.rows.push_back(std::move(values));
    }
    return r;
}

}  // namespace naive
