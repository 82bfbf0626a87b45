#include "mobscope/report_json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "mobscope/errors.hpp"
#include "mobscope/rng.hpp"

namespace mobscope {

namespace {

void escape_string(std::string& out, const std::string& s) {
    out.push_back('"');
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\b': out += "\\b"; break;
            case '\f': out += "\\f"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out.push_back(static_cast<char>(c));
                }
        }
    }
    out.push_back('"');
}

void dump(std::string& out, const nlohmann::json& v, int depth) {
    const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    const std::string pad_in(static_cast<std::size_t>(depth + 1) * 2, ' ');
    switch (v.type()) {
        case nlohmann::json::value_t::null: out += "null"; break;
        case nlohmann::json::value_t::boolean: out += v.get<bool>() ? "true" : "false"; break;
        case nlohmann::json::value_t::number_integer:
            out += std::to_string(v.get<std::int64_t>());
            break;
        case nlohmann::json::value_t::number_unsigned:
            out += std::to_string(v.get<std::uint64_t>());
            break;
        case nlohmann::json::value_t::number_float: {
            const double d = v.get<double>();
            if (!std::isfinite(d)) throw InternalError("non-finite value in report");
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", d);
            out += buf;
            break;
        }
        case nlohmann::json::value_t::string: escape_string(out, v.get<std::string>()); break;
        case nlohmann::json::value_t::array: {
            if (v.empty()) {
                out += "[]";
                break;
            }
            out += "[\n";
            bool first = true;
            for (const auto& item : v) {
                if (!first) out += ",\n";
                first = false;
                out += pad_in;
                dump(out, item, depth + 1);
            }
            out += "\n" + pad + "]";
            break;
        }
        case nlohmann::json::value_t::object: {
            if (v.empty()) {
                out += "{}";
                break;
            }
            out += "{\n";
            bool first = true;
            for (auto it = v.begin(); it != v.end(); ++it) {  // nlohmann objects iterate sorted
                if (!first) out += ",\n";
                first = false;
                out += pad_in;
                escape_string(out, it.key());
                out += ": ";
                dump(out, it.value(), depth + 1);
            }
            out += "\n" + pad + "}";
            break;
        }
        default: throw InternalError("unsupported JSON value type in report");
    }
}

}  // namespace

std::string canonical_json(const nlohmann::json& doc) {
    std::string out;
    dump(out, doc, 0);
    out.push_back('\n');
    return out;
}

std::string file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::in | std::ios::binary);
    if (!in) throw FileNotFoundError(path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
        if (got < static_cast<std::streamsize>(sizeof(buf))) break;
    }
    char hex[20];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

}  // namespace mobscope
