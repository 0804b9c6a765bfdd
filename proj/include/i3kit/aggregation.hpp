#pragma once

#include <map>
#include <string>
#include <vector>

#include "i3kit/records.hpp"

namespace i3kit {

/// Address split into its evaluation-unit components. City is empty when the
/// parse degraded to country-only (e.g. the city token was all postal code).
struct ParsedAddress {
    std::string institute;
    std::string city;
    std::string country;
    std::string raw;

    bool country_only() const { return city.empty(); }
};

/// Split a raw address on ", ": country is the last segment (with US
/// state/ZIP suffixes collapsed to "USA"), city the second-to-last with
/// digit-bearing postal tokens stripped, institute the first.
ParsedAddress parse_address(const std::string& raw);

enum class UnitKind { Journal, Country, City, Institute, Author };
enum class Counting { Integer, Fractional };

std::string to_string(UnitKind kind);

struct UnitAssignment {
    std::string record_id;
    UnitKind kind = UnitKind::Journal;
    std::string unit_key;
    double weight = 1.0;
};

struct SkipEntry {
    std::string record_id;
    std::string reason;
};

struct AssignmentResult {
    std::vector<UnitAssignment> assignments;
    std::vector<SkipEntry> skipped;
};

/// Map each record to units of the given kind. Integer counting credits one
/// point per distinct unit on the record; fractional counting splits one
/// point over the record's usable addresses (authors, for the Author kind)
/// and sums over duplicate keys. Records contributing to no unit are listed
/// in the skip report, never silently dropped.
AssignmentResult assign_units(const RecordSet& set, UnitKind kind, Counting counting);

/// Alias CSV `from_key,to_key`, applied to unit keys after parsing.
std::map<std::string, std::string> load_aliases(const std::string& path);

/// Rewrite unit keys through the alias map and re-merge per record: integer
/// counting collapses merged duplicates back to one point, fractional sums
/// their weights.
AssignmentResult apply_aliases(const AssignmentResult& result,
                               const std::map<std::string, std::string>& aliases,
                               Counting counting);

struct WeightedRef {
    std::string record_id;
    double weight = 1.0;
};

/// Group assignments by unit key, preserving weights.
std::map<std::string, std::vector<WeightedRef>> unit_subsets(
    const std::vector<UnitAssignment>& assignments);

} // namespace i3kit
