#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace i3kit::csv {

/// Quote a field if it contains a comma, quote, or line break (RFC 4180).
std::string escape(std::string_view field);

/// Join fields into one CSV line (no trailing newline).
std::string join(std::span<const std::string> fields);

/// Streaming CSV reader. Handles quoted fields, embedded commas/newlines,
/// CRLF input, and a UTF-8 byte-order mark on the first line.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    /// Reads the next row into `row`. Returns false at end of input.
    bool next(std::vector<std::string>& row);

    /// 1-based line number where the last returned row started.
    std::size_t line() const { return row_start_line_; }

private:
    std::istream& in_;
    std::size_t current_line_ = 0;
    std::size_t row_start_line_ = 0;
    bool first_ = true;
};

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}
    void row(std::span<const std::string> fields);

private:
    std::ostream& out_;
};

/// Fixed-point decimal with `precision` fractional digits, locale-independent.
std::string fmt_fixed(double v, int precision);

/// Shortest decimal representation that round-trips, locale-independent.
std::string fmt_shortest(double v);

/// Integer when the value is whole, otherwise fixed with 4 fractional digits.
/// Used for weighted counts, which are integral under integer counting.
std::string fmt_count(double v);

/// Strict full-string integer parse; throws std::invalid_argument on failure.
long long parse_int(std::string_view s);

/// Strict full-string double parse; throws std::invalid_argument on failure.
double parse_double(std::string_view s);

std::string_view trim(std::string_view s);

std::vector<std::string> split(std::string_view s, std::string_view sep);

} // namespace i3kit::csv
