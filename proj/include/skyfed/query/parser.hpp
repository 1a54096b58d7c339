#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "skyfed/error.hpp"
#include "skyfed/query/ast.hpp"
#include "skyfed/query/token.hpp"

namespace skyfed::query {

class ParseError : public Error {
public:
    ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& found);
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    std::vector<std::string> expected_;
};

Query parse(const std::vector<Token>& tokens);
/// tokenize + parse.
Query parse_query(std::string_view text);
/// Parses a standalone boolean/scalar expression (used for mining cuts).
Expr parse_expression(std::string_view text);

/// Multi-line rendering of an error with a caret under the offending byte.
std::string annotate_error(std::string_view text, const Error& e);

}  // namespace skyfed::query
