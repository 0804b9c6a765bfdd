#include "i3kit/csv.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <system_error>

namespace i3kit::csv {

std::string escape(std::string_view field) {
    const bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!needs_quotes)
        return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out += '"';
    for (const char c : field) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string join(std::span<const std::string> fields) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i)
            line += ',';
        line += escape(fields[i]);
    }
    return line;
}

bool Reader::next(std::vector<std::string>& row) {
    row.clear();
    std::string field;
    bool in_quotes = false;
    bool any = false;
    row_start_line_ = current_line_ + 1;

    int ci;
    while ((ci = in_.get()) != std::istream::traits_type::eof()) {
        char c = static_cast<char>(ci);
        if (first_) {
            first_ = false;
            // swallow a UTF-8 BOM
            if (c == '\xef' && in_.peek() == 0xbb) {
                in_.get();
                if (in_.peek() == 0xbf)
                    in_.get();
                continue;
            }
        }
        any = true;
        if (in_quotes) {
            if (c == '"') {
                if (in_.peek() == '"') {
                    in_.get();
                    field += '"';
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n')
                    ++current_line_;
                field += c;
            }
            continue;
        }
        switch (c) {
        case '"':
            in_quotes = true;
            break;
        case ',':
            row.push_back(std::move(field));
            field.clear();
            break;
        case '\r':
            break;
        case '\n':
            ++current_line_;
            row.push_back(std::move(field));
            return true;
        default:
            field += c;
        }
    }
    if (!any)
        return false;
    ++current_line_;
    row.push_back(std::move(field));
    return true;
}

void Writer::row(std::span<const std::string> fields) {
    out_ << join(fields) << '\n';
}

std::string fmt_fixed(double v, int precision) {
    char buf[64];
    const auto res =
        std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, precision);
    return std::string(buf, res.ptr);
}

std::string fmt_shortest(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string fmt_count(double v) {
    const auto rounded = static_cast<long long>(v >= 0 ? v + 0.5 : v - 0.5);
    if (v == static_cast<double>(rounded))
        return std::to_string(rounded);
    return fmt_fixed(v, 4);
}

long long parse_int(std::string_view s) {
    s = trim(s);
    long long value = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw std::invalid_argument("not an integer: \"" + std::string(s) + "\"");
    return value;
}

double parse_double(std::string_view s) {
    s = trim(s);
    double value = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw std::invalid_argument("not a number: \"" + std::string(s) + "\"");
    return value;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string> split(std::string_view s, std::string_view sep) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = s.find(sep, pos);
        if (next == std::string_view::npos) {
            parts.emplace_back(s.substr(pos));
            return parts;
        }
        parts.emplace_back(s.substr(pos, next - pos));
        pos = next + sep.size();
    }
}

} // namespace i3kit::csv
