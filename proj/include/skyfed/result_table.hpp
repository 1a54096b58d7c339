#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "skyfed/value.hpp"

namespace skyfed {

struct ColumnSpec {
    std::string name;
    ValueKind kind = ValueKind::Float;  // Int, Float or Text; every column may hold NULL
    friend bool operator==(const ColumnSpec&, const ColumnSpec&) = default;
};

struct ResultStats {
    std::size_t row_count = 0;
    double elapsed_ms = 0.0;
    std::size_t division_by_zero = 0;
};

class ResultTable {
public:
    ResultTable() = default;
    explicit ResultTable(std::vector<ColumnSpec> columns);

    const std::vector<ColumnSpec>& columns() const noexcept { return columns_; }
    const std::vector<std::vector<Value>>& rows() const noexcept { return rows_; }
    std::vector<std::vector<Value>>& mutable_rows() noexcept { return rows_; }

    /// Throws if the arity differs from the column count.
    void add_row(std::vector<Value> row);
    std::size_t column_index(const std::string& name) const;

    ResultStats stats;

    /// Equality of schema and contents; stats are ignored.
    bool same_contents(const ResultTable& other) const;

private:
    std::vector<ColumnSpec> columns_;
    std::vector<std::vector<Value>> rows_;
};

}  // namespace skyfed
