#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "i3kit/fraction.hpp"
#include "i3kit/records.hpp"

namespace i3kit {

/// Reference subpopulation: all records sharing publication year and document
/// type. Quantiles are always computed within a stratum.
struct StratumKey {
    int pub_year = 0;
    DocType doc_type;

    friend bool operator==(const StratumKey&, const StratumKey&) = default;
    auto operator<=>(const StratumKey& o) const {
        if (auto c = pub_year <=> o.pub_year; c != 0)
            return c;
        return doc_type <=> o.doc_type;
    }
};

struct Stratum {
    StratumKey key;
    std::vector<std::size_t> members; // indices into the scored RecordSet
    std::size_t size() const { return members.size(); }
};

enum class RuleVariant { StrictLess, LessOrEqual, TieAveraged };

/// Tie/counting convention for converting citation scores to quantiles.
/// The 0.9 offset is only meaningful on top of strictly-below counting.
class CountingRule {
public:
    CountingRule() = default;
    explicit CountingRule(RuleVariant variant, bool mutz_offset = false)
        : variant_(variant), mutz_offset_(mutz_offset) {
        if (mutz_offset_ && variant_ != RuleVariant::StrictLess)
            throw std::invalid_argument("mutz offset requires the strictly-less rule");
    }

    RuleVariant variant() const { return variant_; }
    bool mutz_offset() const { return mutz_offset_; }

private:
    RuleVariant variant_ = RuleVariant::StrictLess;
    bool mutz_offset_ = false;
};

enum class ScoreField { TimesCited, CitationScore };

/// A record with its quantile (exact rational in [0,100], offset rule may
/// exceed 100 on tiny strata before clamping) and PR6 class.
struct ScoredRecord {
    std::string record_id;
    StratumKey stratum;
    Fraction quantile;
    int pr6_class = 1;
    long long times_cited = 0;
    double citation_score = 0.0;
    bool small_stratum = false; // stratum had fewer than 5 members
};

using ScoredSet = std::vector<ScoredRecord>;

/// Partition the set by (pub_year, doc_type); strata ordered by key, members
/// in record order.
std::vector<Stratum> stratify(const RecordSet& set);

/// Quantile of one record within its stratum under the given rule.
Fraction quantile_of(const RecordSet& set, std::size_t record_index, const Stratum& stratum,
                     const CountingRule& rule, ScoreField field = ScoreField::TimesCited);

/// Six-class percentile-rank scheme: 6 for q >= 99, 5 for [95,99), 4 for
/// [90,95), 3 for [75,90), 2 for [50,75), 1 below 50. Values in (100, 100.9]
/// (offset rule on tiny strata) clamp to 100.
int pr6_class(double quantile);
int pr6_class(const Fraction& quantile);

struct ScoringResult {
    ScoredSet scored;                     // sorted by record_id
    std::vector<StratumKey> small_strata; // strata with fewer than 5 members
};

/// Score every record of the set. Deterministic: output is sorted by
/// record_id and independent of input order. Strata are scored independently
/// (in parallel when threads > 1).
ScoringResult score_set(const RecordSet& set, const CountingRule& rule,
                        ScoreField field = ScoreField::TimesCited, unsigned threads = 1);

/// Scored-record CSV:
/// `record_id,pub_year,doc_type,quantile,pr6_class,times_cited,citation_score`
/// with quantiles printed to 4 fractional digits.
void write_scored_csv(const ScoredSet& scored, const std::string& path);
ScoredSet read_scored_csv(const std::string& path);

} // namespace i3kit
