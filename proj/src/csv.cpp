#include "skyfed/csv.hpp"

#include <ostream>

#include "skyfed/error.hpp"

namespace skyfed::csv {

std::optional<Record> Reader::next() {
    Record rec;
    rec.line = line_;
    std::string field;
    bool in_quotes = false;
    bool any = false;
    int c;
    while ((c = in_.get()) != std::char_traits<char>::eof()) {
        any = true;
        const char ch = static_cast<char>(c);
        if (in_quotes) {
            if (ch == '"') {
                if (in_.peek() == '"') {
                    in_.get();
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                if (ch == '\n') ++line_;
                field.push_back(ch);
            }
            continue;
        }
        if (ch == '"') {
            in_quotes = true;
        } else if (ch == ',') {
            rec.fields.push_back(std::move(field));
            field.clear();
        } else if (ch == '\r') {
            if (in_.peek() == '\n') in_.get();
            ++line_;
            rec.fields.push_back(std::move(field));
            return rec;
        } else if (ch == '\n') {
            ++line_;
            rec.fields.push_back(std::move(field));
            return rec;
        } else {
            field.push_back(ch);
        }
    }
    if (in_quotes) throw Error("csv_error", "unterminated quoted field starting on line " + std::to_string(rec.line));
    if (!any) return std::nullopt;
    rec.fields.push_back(std::move(field));
    return rec;
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << escape(fields[i]);
    }
    out << '\n';
}

}  // namespace skyfed::csv
