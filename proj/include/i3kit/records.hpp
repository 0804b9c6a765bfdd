#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "i3kit/errors.hpp"

namespace i3kit {

enum class DocKind { Article, Review, ProceedingsPaper, Letter, Other };

/// Document type as carried by the export's DT column. The four citable kinds
/// are normalized to canonical labels; anything else keeps its verbatim label
/// under DocKind::Other.
struct DocType {
    DocKind kind = DocKind::Other;
    std::string label;

    /// Case-insensitive mapping from a DT column value.
    static DocType from_label(std::string_view dt);

    static DocType article() { return from_label("Article"); }
    static DocType review() { return from_label("Review"); }
    static DocType proceedings_paper() { return from_label("Proceedings Paper"); }
    static DocType letter() { return from_label("Letter"); }
    static DocType other(std::string_view label);

    friend bool operator==(const DocType&, const DocType&) = default;
    auto operator<=>(const DocType& o) const {
        if (auto c = kind <=> o.kind; c != 0)
            return c;
        return label <=> o.label;
    }
};

/// One citable item from a bibliographic database export.
struct CitationRecord {
    std::string record_id;
    std::string journal;
    int pub_year = 0;
    DocType doc_type;
    long long times_cited = 0;
    /// Defaults to times_cited; replaced by apply_fractional_weights.
    double citation_score = 0.0;
    std::vector<std::string> addresses;
    std::vector<std::string> authors;
    long long n_refs = 0;
};

struct Provenance {
    std::vector<std::string> sources;
    std::vector<std::string> filters;
};

class RecordSet {
public:
    RecordSet() = default;
    RecordSet(std::vector<CitationRecord> records, Provenance provenance);

    const std::vector<CitationRecord>& records() const { return records_; }
    const Provenance& provenance() const { return provenance_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    /// Counts keyed by the canonical doc-type label; values sum to size().
    std::map<std::string, std::size_t> counts_by_type() const;

    /// Index of the record with the given id, or npos.
    std::size_t find(std::string_view record_id) const;
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    std::vector<CitationRecord> records_;
    Provenance provenance_;
    std::map<std::string, std::size_t, std::less<>> by_id_;
};

/// One citing-side link used for fractional citation weighting.
struct CitationLink {
    std::string cited_record_id;
    long long citing_n_refs = 0; // >= 1
};

enum class ExportFormat { TabDelimitedWithHeader };

/// Parse a tab-delimited export with a header row of field tags.
///
/// Required tags: SO, PY, DT, TC, NR, C1, AU. Optional: UT, TI, CU.
/// Rows missing TC or PY are rejected with a line-numbered MalformedRow;
/// missing C1/AU yield empty address/author lists. Record identity comes from
/// UT when present, otherwise a deterministic hash of (journal, year,
/// title-or-row-index).
RecordSet parse_export(const std::string& path,
                       ExportFormat format = ExportFormat::TabDelimitedWithHeader);

/// Keep only records whose doc-type kind is in `allowed`.
RecordSet filter_citable(const RecordSet& set,
                         const std::set<DocKind>& allowed = {DocKind::Article, DocKind::Review,
                                                             DocKind::ProceedingsPaper,
                                                             DocKind::Letter});

/// Replace each record's citation_score with the sum of 1/citing_n_refs over
/// its links; records without links get 0. times_cited is never touched.
RecordSet apply_fractional_weights(const RecordSet& set, const std::vector<CitationLink>& links);

/// Citation-link CSV with header `cited_id,citing_nrefs`.
std::vector<CitationLink> load_links(const std::string& path);

/// Canonical persisted form: CSV with header
/// `record_id,journal,pub_year,doc_type,times_cited,citation_score,n_refs,addresses,authors`
/// where addresses/authors are "|"-joined. parse -> write -> parse is a
/// fixpoint on these fields.
void write_records_csv(const RecordSet& set, const std::string& path);
RecordSet read_records_csv(const std::string& path);

} // namespace i3kit
