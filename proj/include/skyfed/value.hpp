#pragma once

#include <cstdint>
#include <string>
#include <variant>

namespace skyfed {

// Scalar carried through query evaluation and result tables.
// monostate is SQL NULL; bool only appears inside predicates.
using Value = std::variant<std::monostate, std::int64_t, double, std::string, bool>;

enum class ValueKind { Null, Int, Float, Text, Bool };

inline bool is_null(const Value& v) noexcept { return std::holds_alternative<std::monostate>(v); }
inline bool is_numeric(const Value& v) noexcept {
    return std::holds_alternative<std::int64_t>(v) || std::holds_alternative<double>(v);
}
double as_double(const Value& v);

ValueKind kind_of(const Value& v) noexcept;
const char* kind_name(ValueKind k) noexcept;

/// Total order used for sorting and grouping: NULL < numbers < text < bool.
/// Ints and floats compare numerically.
int compare_values(const Value& a, const Value& b) noexcept;

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
std::string to_display(const Value& v);

}  // namespace skyfed
