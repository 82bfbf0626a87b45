#include "mobscope/csv.hpp"

namespace mobscope {

bool read_csv_row(std::istream& in, std::vector<std::string>& fields, std::size_t& line_no) {
    fields.clear();
    int c = in.get();
    if (c == EOF) return false;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    while (true) {
        if (c == EOF) {
            fields.push_back(field);
            return true;
        }
        char ch = static_cast<char>(c);
        if (in_quotes) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    field.push_back('"');
                    in.get();
                } else {
                    in_quotes = false;
                }
            } else {
                if (ch == '\n') ++line_no;
                field.push_back(ch);
            }
        } else if (ch == '"' && field.empty() && !field_started) {
            in_quotes = true;
            field_started = true;
        } else if (ch == ',') {
            fields.push_back(field);
            field.clear();
            field_started = false;
        } else if (ch == '\n') {
            ++line_no;
            if (!field.empty() && field.back() == '\r') field.pop_back();
            fields.push_back(field);
            return true;
        } else {
            field.push_back(ch);
            field_started = true;
        }
        c = in.get();
    }
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

}  // namespace mobscope
