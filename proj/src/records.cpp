#include "i3kit/records.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "i3kit/csv.hpp"

namespace i3kit {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 14695981039346656037ull;
    for (const unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string synth_record_id(const std::string& journal, const std::string& year,
                            const std::string& title_or_index) {
    std::string key;
    key += journal;
    key += '\x1f';
    key += year;
    key += '\x1f';
    key += title_or_index;
    std::ostringstream os;
    os << 'R' << std::hex << std::nouppercase << fnv1a64(key);
    return os.str();
}

/// Split a "; "-separated multi-value field, trimming entries and dropping
/// empties. Bracketed author-group prefixes "[...]" are removed first when
/// requested (addresses carry them, author lists do not).
std::vector<std::string> split_multi(std::string_view field, bool strip_brackets) {
    std::string cleaned;
    if (strip_brackets) {
        bool in_bracket = false;
        for (const char c : field) {
            if (c == '[') {
                in_bracket = true;
            } else if (c == ']') {
                in_bracket = false;
            } else if (!in_bracket) {
                cleaned += c;
            }
        }
        field = cleaned;
    }
    std::vector<std::string> out;
    for (const auto& part : csv::split(field, ";")) {
        const auto trimmed = csv::trim(part);
        if (!trimmed.empty())
            out.emplace_back(trimmed);
    }
    return out;
}

int parse_year(std::string_view s, std::size_t line) {
    long long year = 0;
    try {
        year = csv::parse_int(s);
    } catch (const std::invalid_argument&) {
        throw MalformedRow(line, "PY is not a year: \"" + std::string(s) + "\"");
    }
    if (year < 1900 || year > 2100)
        throw MalformedRow(line, "PY out of range [1900, 2100]: " + std::to_string(year));
    return static_cast<int>(year);
}

} // namespace

DocType DocType::from_label(std::string_view dt) {
    const std::string key = lower(csv::trim(dt));
    if (key == "article")
        return {DocKind::Article, "Article"};
    if (key == "review")
        return {DocKind::Review, "Review"};
    if (key == "proceedings paper")
        return {DocKind::ProceedingsPaper, "Proceedings Paper"};
    if (key == "letter")
        return {DocKind::Letter, "Letter"};
    return {DocKind::Other, std::string(csv::trim(dt))};
}

DocType DocType::other(std::string_view label) {
    return {DocKind::Other, std::string(label)};
}

RecordSet::RecordSet(std::vector<CitationRecord> records, Provenance provenance)
    : records_(std::move(records)), provenance_(std::move(provenance)) {
    for (std::size_t i = 0; i < records_.size(); ++i) {
        const auto [it, inserted] = by_id_.emplace(records_[i].record_id, i);
        if (!inserted)
            throw Error("duplicate record id: " + records_[i].record_id);
    }
}

std::map<std::string, std::size_t> RecordSet::counts_by_type() const {
    std::map<std::string, std::size_t> counts;
    for (const auto& r : records_)
        ++counts[r.doc_type.label];
    return counts;
}

std::size_t RecordSet::find(std::string_view record_id) const {
    const auto it = by_id_.find(record_id);
    return it == by_id_.end() ? npos : it->second;
}

RecordSet parse_export(const std::string& path, ExportFormat format) {
    (void)format; // single supported flavor
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoFailure("cannot open " + path);

    std::string header_line;
    if (!std::getline(in, header_line))
        throw EmptyFile(path);
    if (header_line.starts_with("\xef\xbb\xbf"))
        header_line.erase(0, 3);
    if (!header_line.empty() && header_line.back() == '\r')
        header_line.pop_back();

    std::map<std::string, std::size_t> col;
    {
        const auto tags = csv::split(header_line, "\t");
        for (std::size_t i = 0; i < tags.size(); ++i) {
            const auto tag = csv::trim(tags[i]);
            if (!tag.empty())
                col.emplace(std::string(tag), i);
        }
    }
    for (const char* tag : {"SO", "PY", "DT", "TC", "NR", "C1", "AU"}) {
        if (!col.contains(tag))
            throw MissingHeaderTag(tag);
    }
    const bool has_ut = col.contains("UT");
    const bool has_ti = col.contains("TI");

    auto field = [&](const std::vector<std::string>& cells, const char* tag) -> std::string {
        const auto it = col.find(tag);
        if (it == col.end() || it->second >= cells.size())
            return {};
        return std::string(csv::trim(cells[it->second]));
    };

    std::vector<CitationRecord> records;
    std::map<std::string, std::size_t> seen_ids;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (csv::trim(line).empty())
            continue;
        const auto cells = csv::split(line, "\t");

        CitationRecord r;
        r.journal = field(cells, "SO");
        r.pub_year = parse_year(field(cells, "PY"), line_no);
        r.doc_type = DocType::from_label(field(cells, "DT"));

        const std::string tc = field(cells, "TC");
        if (tc.empty())
            throw MalformedRow(line_no, "missing TC value");
        try {
            r.times_cited = csv::parse_int(tc);
        } catch (const std::invalid_argument&) {
            throw MalformedRow(line_no, "TC is not an integer: \"" + tc + "\"");
        }
        if (r.times_cited < 0)
            throw MalformedRow(line_no, "negative TC: " + tc);
        r.citation_score = static_cast<double>(r.times_cited);

        const std::string nr = field(cells, "NR");
        if (!nr.empty()) {
            try {
                r.n_refs = csv::parse_int(nr);
            } catch (const std::invalid_argument&) {
                throw MalformedRow(line_no, "NR is not an integer: \"" + nr + "\"");
            }
            if (r.n_refs < 0)
                throw MalformedRow(line_no, "negative NR: " + nr);
        }

        r.addresses = split_multi(field(cells, "C1"), /*strip_brackets=*/true);
        r.authors = split_multi(field(cells, "AU"), /*strip_brackets=*/false);

        if (has_ut && !field(cells, "UT").empty()) {
            r.record_id = field(cells, "UT");
        } else {
            const std::string title = has_ti ? field(cells, "TI") : std::string();
            r.record_id = synth_record_id(
                r.journal, field(cells, "PY"),
                title.empty() ? "#" + std::to_string(records.size()) : title);
        }
        if (const auto [it, inserted] = seen_ids.emplace(r.record_id, line_no); !inserted)
            throw MalformedRow(line_no, "duplicate record id '" + r.record_id +
                                            "' (first seen at line " +
                                            std::to_string(it->second) + ")");
        records.push_back(std::move(r));
    }

    Provenance prov;
    prov.sources.push_back(path);
    return RecordSet(std::move(records), std::move(prov));
}

RecordSet filter_citable(const RecordSet& set, const std::set<DocKind>& allowed) {
    std::vector<CitationRecord> kept;
    kept.reserve(set.size());
    for (const auto& r : set.records()) {
        if (allowed.contains(r.doc_type.kind))
            kept.push_back(r);
    }
    Provenance prov = set.provenance();
    std::string desc = "doc_type in {";
    bool first = true;
    for (const DocKind k : allowed) {
        if (!first)
            desc += ", ";
        first = false;
        switch (k) {
        case DocKind::Article: desc += "Article"; break;
        case DocKind::Review: desc += "Review"; break;
        case DocKind::ProceedingsPaper: desc += "Proceedings Paper"; break;
        case DocKind::Letter: desc += "Letter"; break;
        case DocKind::Other: desc += "Other"; break;
        }
    }
    desc += "}";
    prov.filters.push_back(desc);
    return RecordSet(std::move(kept), std::move(prov));
}

RecordSet apply_fractional_weights(const RecordSet& set, const std::vector<CitationLink>& links) {
    // group citing reference counts per cited record; sorted accumulation makes
    // the result independent of link-file order
    std::vector<std::vector<long long>> nrefs_by_record(set.size());
    for (const auto& link : links) {
        if (link.citing_n_refs < 1)
            throw ZeroNRefs(link.cited_record_id);
        const std::size_t idx = set.find(link.cited_record_id);
        if (idx == RecordSet::npos)
            throw UnknownRecordId(link.cited_record_id);
        nrefs_by_record[idx].push_back(link.citing_n_refs);
    }

    std::vector<CitationRecord> weighted = set.records();
    for (std::size_t i = 0; i < weighted.size(); ++i) {
        auto& nrefs = nrefs_by_record[i];
        std::sort(nrefs.begin(), nrefs.end());
        double score = 0.0;
        for (const long long n : nrefs)
            score += 1.0 / static_cast<double>(n);
        weighted[i].citation_score = score;
    }

    Provenance prov = set.provenance();
    prov.filters.push_back("fractional citation weighting (" + std::to_string(links.size()) +
                           " links)");
    return RecordSet(std::move(weighted), std::move(prov));
}

std::vector<CitationLink> load_links(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoFailure("cannot open " + path);
    csv::Reader reader(in);
    std::vector<std::string> row;
    if (!reader.next(row))
        throw EmptyFile(path);
    if (row.size() < 2 || csv::trim(row[0]) != "cited_id" || csv::trim(row[1]) != "citing_nrefs")
        throw MissingHeaderTag("cited_id,citing_nrefs");

    std::vector<CitationLink> links;
    while (reader.next(row)) {
        if (row.size() == 1 && csv::trim(row[0]).empty())
            continue;
        if (row.size() != 2)
            throw MalformedRow(reader.line(), "expected 2 fields, got " +
                                                  std::to_string(row.size()));
        CitationLink link;
        link.cited_record_id = std::string(csv::trim(row[0]));
        try {
            link.citing_n_refs = csv::parse_int(row[1]);
        } catch (const std::invalid_argument&) {
            throw MalformedRow(reader.line(), "citing_nrefs is not an integer");
        }
        if (link.citing_n_refs < 1)
            throw ZeroNRefs(link.cited_record_id);
        links.push_back(std::move(link));
    }
    return links;
}

namespace {

const std::vector<std::string> kRecordsHeader = {
    "record_id", "journal",        "pub_year", "doc_type", "times_cited",
    "citation_score", "n_refs",   "addresses", "authors"};

std::string join_pipe(const std::vector<std::string>& parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i)
            out += '|';
        out += parts[i];
    }
    return out;
}

std::vector<std::string> split_pipe(std::string_view s) {
    if (s.empty())
        return {};
    std::vector<std::string> out;
    for (auto& part : csv::split(s, "|")) {
        if (!part.empty())
            out.push_back(std::move(part));
    }
    return out;
}

} // namespace

void write_records_csv(const RecordSet& set, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoFailure("cannot open " + path + " for writing");
    csv::Writer w(out);
    w.row(kRecordsHeader);
    for (const auto& r : set.records()) {
        const std::vector<std::string> row = {
            r.record_id,
            r.journal,
            std::to_string(r.pub_year),
            r.doc_type.label,
            std::to_string(r.times_cited),
            csv::fmt_shortest(r.citation_score),
            std::to_string(r.n_refs),
            join_pipe(r.addresses),
            join_pipe(r.authors),
        };
        w.row(row);
    }
    if (!out)
        throw IoFailure("write failed: " + path);
}

RecordSet read_records_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoFailure("cannot open " + path);
    csv::Reader reader(in);
    std::vector<std::string> row;
    if (!reader.next(row))
        throw EmptyFile(path);
    if (row != kRecordsHeader) {
        for (const auto& want : kRecordsHeader) {
            if (std::find(row.begin(), row.end(), want) == row.end())
                throw MissingHeaderTag(want);
        }
        throw MalformedRow(1, "unexpected record CSV header");
    }

    std::vector<CitationRecord> records;
    while (reader.next(row)) {
        if (row.size() == 1 && csv::trim(row[0]).empty())
            continue;
        if (row.size() != kRecordsHeader.size())
            throw MalformedRow(reader.line(), "expected " +
                                                  std::to_string(kRecordsHeader.size()) +
                                                  " fields, got " + std::to_string(row.size()));
        CitationRecord r;
        r.record_id = row[0];
        r.journal = row[1];
        r.pub_year = parse_year(row[2], reader.line());
        r.doc_type = DocType::from_label(row[3]);
        r.times_cited = csv::parse_int(row[4]);
        r.citation_score = csv::parse_double(row[5]);
        r.n_refs = csv::parse_int(row[6]);
        if (r.times_cited < 0 || r.citation_score < 0 || r.n_refs < 0)
            throw MalformedRow(reader.line(), "negative count");
        r.addresses = split_pipe(row[7]);
        r.authors = split_pipe(row[8]);
        records.push_back(std::move(r));
    }

    Provenance prov;
    prov.sources.push_back(path);
    return RecordSet(std::move(records), std::move(prov));
}

} // namespace i3kit
