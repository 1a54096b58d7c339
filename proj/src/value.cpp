#include "skyfed/value.hpp"

#include <charconv>
#include <cmath>

#include "skyfed/error.hpp"
#include "skyfed/result_table.hpp"

namespace skyfed {

double as_double(const Value& v) {
    if (auto i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    if (auto d = std::get_if<double>(&v)) return *d;
    throw Error("type_error", "value is not numeric");
}

ValueKind kind_of(const Value& v) noexcept {
    switch (v.index()) {
        case 1: return ValueKind::Int;
        case 2: return ValueKind::Float;
        case 3: return ValueKind::Text;
        case 4: return ValueKind::Bool;
        default: return ValueKind::Null;
    }
}

const char* kind_name(ValueKind k) noexcept {
    switch (k) {
        case ValueKind::Int: return "int";
        case ValueKind::Float: return "float";
        case ValueKind::Text: return "text";
        case ValueKind::Bool: return "bool";
        case ValueKind::Null: break;
    }
    return "null";
}

namespace {
int rank(const Value& v) noexcept {
    switch (v.index()) {
        case 0: return 0;
        case 1:
        case 2: return 1;
        case 3: return 2;
        default: return 3;
    }
}

template <typename T>
int three_way(const T& a, const T& b) noexcept {
    return a < b ? -1 : (b < a ? 1 : 0);
}
}  // namespace

int compare_values(const Value& a, const Value& b) noexcept {
    const int ra = rank(a), rb = rank(b);
    if (ra != rb) return ra < rb ? -1 : 1;
    switch (ra) {
        case 0: return 0;
        case 1: {
            if (a.index() == 1 && b.index() == 1)
                return three_way(std::get<std::int64_t>(a), std::get<std::int64_t>(b));
            return three_way(as_double(a), as_double(b));
        }
        case 2: return three_way(std::get<std::string>(a), std::get<std::string>(b));
        default: return three_way(std::get<bool>(a), std::get<bool>(b));
    }
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string to_display(const Value& v) {
    switch (v.index()) {
        case 1: return std::to_string(std::get<std::int64_t>(v));
        case 2: return format_double(std::get<double>(v));
        case 3: return std::get<std::string>(v);
        case 4: return std::get<bool>(v) ? "true" : "false";
        default: return "";
    }
}

ResultTable::ResultTable(std::vector<ColumnSpec> columns) : columns_(std::move(columns)) {
    for (std::size_t i = 0; i < columns_.size(); ++i)
        for (std::size_t j = i + 1; j < columns_.size(); ++j)
            if (columns_[i].name == columns_[j].name)
                throw Error("plan_error", "duplicate output column: " + columns_[i].name);
}

void ResultTable::add_row(std::vector<Value> row) {
    if (row.size() != columns_.size())
        throw Error("internal_error", "row arity " + std::to_string(row.size()) + " != column arity " +
                                          std::to_string(columns_.size()));
    rows_.push_back(std::move(row));
    stats.row_count = rows_.size();
}

std::size_t ResultTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i)
        if (columns_[i].name == name) return i;
    throw Error("unknown_column", "no column named " + name);
}

bool ResultTable::same_contents(const ResultTable& other) const {
    return columns_ == other.columns_ && rows_ == other.rows_;
}

}  // namespace skyfed
