#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace skyfed::csv {

struct Record {
    std::size_t line = 0;  // 1-based physical line where the record starts
    std::vector<std::string> fields;
};

// RFC 4180 reader: quoted fields, doubled quotes, CRLF or LF, embedded newlines.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}
    std::optional<Record> next();

private:
    std::istream& in_;
    std::size_t line_ = 1;
};

std::string escape(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace skyfed::csv
