#include "i3kit/aggregation.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "i3kit/csv.hpp"
#include "i3kit/errors.hpp"

namespace i3kit {

namespace {

std::vector<std::string> whitespace_tokens(std::string_view s) {
    std::vector<std::string> tokens;
    std::string current;
    for (const char c : s) {
        if (c == ' ' || c == '\t') {
            if (!current.empty())
                tokens.push_back(std::move(current));
            current.clear();
        } else {
            current += c;
        }
    }
    if (!current.empty())
        tokens.push_back(std::move(current));
    return tokens;
}

bool has_digit(std::string_view s) {
    return std::any_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isdigit(c) != 0; });
}

std::string join_tokens(const std::vector<std::string>& tokens, std::size_t count) {
    std::string out;
    for (std::size_t i = 0; i < count; ++i) {
        if (i)
            out += ' ';
        out += tokens[i];
    }
    return out;
}

/// Drop trailing whitespace tokens that carry digits (postal codes).
std::string strip_postal(const std::string& segment) {
    auto tokens = whitespace_tokens(segment);
    std::size_t keep = tokens.size();
    while (keep > 0 && has_digit(tokens[keep - 1]))
        --keep;
    return join_tokens(tokens, keep);
}

std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

} // namespace

ParsedAddress parse_address(const std::string& raw) {
    std::vector<std::string> segments;
    for (const auto& part : csv::split(raw, ", ")) {
        const auto trimmed = csv::trim(part);
        if (!trimmed.empty())
            segments.emplace_back(trimmed);
    }
    if (segments.size() < 2)
        throw UnparseableAddress(raw);

    ParsedAddress parsed;
    parsed.raw = raw;
    parsed.institute = segments.front();

    const std::string& last = segments.back();
    const auto last_tokens = whitespace_tokens(last);
    if (!last_tokens.empty() && last_tokens.back() == "USA")
        parsed.country = "USA";
    else
        parsed.country = last;

    parsed.city = strip_postal(segments[segments.size() - 2]);
    return parsed;
}

std::string to_string(UnitKind kind) {
    switch (kind) {
    case UnitKind::Journal: return "journal";
    case UnitKind::Country: return "country";
    case UnitKind::City: return "city";
    case UnitKind::Institute: return "institute";
    case UnitKind::Author: return "author";
    }
    return "?";
}

AssignmentResult assign_units(const RecordSet& set, UnitKind kind, Counting counting) {
    AssignmentResult result;

    for (const auto& record : set.records()) {
        // keys this record reaches, with per-source fractional weight summed
        std::map<std::string, double> keys;

        if (kind == UnitKind::Journal) {
            if (record.journal.empty()) {
                result.skipped.push_back({record.record_id, "no journal"});
                continue;
            }
            keys[record.journal] = 1.0;
        } else if (kind == UnitKind::Author) {
            if (record.authors.empty()) {
                result.skipped.push_back({record.record_id, "no authors"});
                continue;
            }
            const double share = 1.0 / static_cast<double>(record.authors.size());
            for (const auto& name : record.authors)
                keys[upper(name)] += share;
        } else {
            if (record.addresses.empty()) {
                result.skipped.push_back({record.record_id, "no address"});
                continue;
            }
            std::vector<ParsedAddress> usable;
            std::size_t unparseable = 0;
            for (const auto& raw : record.addresses) {
                ParsedAddress parsed;
                try {
                    parsed = parse_address(raw);
                } catch (const UnparseableAddress&) {
                    ++unparseable;
                    continue;
                }
                if (kind != UnitKind::Country && parsed.country_only())
                    continue;
                usable.push_back(std::move(parsed));
            }
            if (usable.empty()) {
                result.skipped.push_back(
                    {record.record_id,
                     unparseable == record.addresses.size()
                         ? "no parseable address"
                         : "no address with a " + to_string(kind) + " component"});
                continue;
            }
            const double share = 1.0 / static_cast<double>(usable.size());
            for (const auto& a : usable) {
                std::string key;
                switch (kind) {
                case UnitKind::Country:
                    key = a.country;
                    break;
                case UnitKind::City:
                    key = a.city + ", " + a.country;
                    break;
                case UnitKind::Institute:
                    key = a.institute + ", " + a.city + ", " + a.country;
                    break;
                default:
                    break;
                }
                keys[key] += share;
            }
        }

        for (const auto& [key, fractional_weight] : keys) {
            result.assignments.push_back(
                {record.record_id, kind, key,
                 counting == Counting::Integer ? 1.0 : fractional_weight});
        }
    }
    return result;
}

std::map<std::string, std::string> load_aliases(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoFailure("cannot open " + path);
    csv::Reader reader(in);
    std::vector<std::string> row;
    if (!reader.next(row))
        throw EmptyFile(path);
    if (row.size() < 2 || csv::trim(row[0]) != "from_key" || csv::trim(row[1]) != "to_key")
        throw MissingHeaderTag("from_key,to_key");
    std::map<std::string, std::string> aliases;
    while (reader.next(row)) {
        if (row.size() == 1 && csv::trim(row[0]).empty())
            continue;
        if (row.size() != 2)
            throw MalformedRow(reader.line(), "expected 2 fields");
        aliases[std::string(csv::trim(row[0]))] = std::string(csv::trim(row[1]));
    }
    return aliases;
}

AssignmentResult apply_aliases(const AssignmentResult& result,
                               const std::map<std::string, std::string>& aliases,
                               Counting counting) {
    AssignmentResult out;
    out.skipped = result.skipped;

    // (record, aliased key) -> merged weight, preserving record order
    std::vector<std::pair<std::string, std::map<std::string, double>>> per_record;
    std::map<std::string, std::size_t> record_pos;
    UnitKind kind = UnitKind::Journal;
    for (const auto& a : result.assignments) {
        kind = a.kind;
        const auto alias = aliases.find(a.unit_key);
        const std::string key = alias == aliases.end() ? a.unit_key : alias->second;
        auto [it, inserted] = record_pos.emplace(a.record_id, per_record.size());
        if (inserted)
            per_record.push_back({a.record_id, {}});
        per_record[it->second].second[key] += a.weight;
    }
    for (const auto& [record_id, keys] : per_record) {
        for (const auto& [key, weight] : keys) {
            out.assignments.push_back(
                {record_id, kind, key, counting == Counting::Integer ? 1.0 : weight});
        }
    }
    return out;
}

std::map<std::string, std::vector<WeightedRef>> unit_subsets(
    const std::vector<UnitAssignment>& assignments) {
    std::map<std::string, std::vector<WeightedRef>> subsets;
    for (const auto& a : assignments) {
        auto& members = subsets[a.unit_key];
        if (!members.empty() && members.back().record_id == a.record_id)
            members.back().weight += a.weight;
        else
            members.push_back({a.record_id, a.weight});
    }
    return subsets;
}

} // namespace i3kit
