#include "qbc/document.hpp"

#include <cmath>
#include <cstdio>

namespace qbc {

namespace {

void emit(const Document& d, std::string& out, int indent, int depth) {
    const bool pretty = indent >= 0;
    auto newline = [&](int level) {
        if (!pretty) return;
        out += '\n';
        out.append(static_cast<std::size_t>(level * indent), ' ');
    };
    switch (d.type()) {
        case Document::value_t::object: {
            if (d.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            bool first = true;
            for (const auto& [key, value] : d.items()) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                out += Document(key).dump();
                out += pretty ? ": " : ":";
                emit(value, out, indent, depth + 1);
            }
            newline(depth);
            out += '}';
            return;
        }
        case Document::value_t::array: {
            out += '[';
            bool first = true;
            for (const auto& value : d) {
                if (!first) out += pretty ? ", " : ",";
                first = false;
                emit(value, out, indent, depth + 1);
            }
            out += ']';
            return;
        }
        case Document::value_t::number_float: {
            const double x = d.get<double>();
            out += std::isfinite(x) ? format_double(x) : "null";
            return;
        }
        default:
            out += d.dump();
    }
}

void flatten(const Document& d, const std::string& prefix, std::string& out) {
    if (d.is_object()) {
        for (const auto& [key, value] : d.items())
            flatten(value, prefix.empty() ? key : prefix + "." + key, out);
        return;
    }
    out += prefix;
    out += " = ";
    if (d.is_string()) {
        out += d.get<std::string>();
    } else {
        emit(d, out, -1, 0);
    }
    out += '\n';
}

}  // namespace

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    std::string s(buf);
    // Keep floats recognisable as floats after a round trip through JSON.
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

std::string to_json_line(const Document& doc) {
    std::string out;
    emit(doc, out, -1, 0);
    return out;
}

std::string to_json_pretty(const Document& doc) {
    std::string out;
    emit(doc, out, 2, 0);
    out += '\n';
    return out;
}

std::string to_text(const Document& doc) {
    std::string out;
    flatten(doc, "", out);
    return out;
}

}  // namespace qbc
