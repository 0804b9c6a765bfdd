#include "i3kit/quantiles.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <thread>

#include "i3kit/csv.hpp"
#include "i3kit/errors.hpp"

namespace i3kit {

namespace {

double score_value(const CitationRecord& r, ScoreField field) {
    return field == ScoreField::TimesCited ? static_cast<double>(r.times_cited)
                                           : r.citation_score;
}

Fraction quantile_from_counts(std::int64_t below, std::int64_t at_or_below, std::int64_t n,
                              const CountingRule& rule) {
    switch (rule.variant()) {
    case RuleVariant::StrictLess: {
        Fraction q(100 * below, n);
        if (rule.mutz_offset())
            q += Fraction(9, 10);
        return q;
    }
    case RuleVariant::LessOrEqual:
        return Fraction(100 * at_or_below, n);
    case RuleVariant::TieAveraged:
        // mean ascending 1-based rank of the tie group is (below+at_or_below+1)/2,
        // mapped through 100*(rank - 0.5)/n
        return Fraction(50 * (below + at_or_below), n);
    }
    throw std::logic_error("unreachable");
}

} // namespace

std::vector<Stratum> stratify(const RecordSet& set) {
    std::map<StratumKey, std::vector<std::size_t>> buckets;
    const auto& records = set.records();
    for (std::size_t i = 0; i < records.size(); ++i)
        buckets[{records[i].pub_year, records[i].doc_type}].push_back(i);

    std::vector<Stratum> strata;
    strata.reserve(buckets.size());
    for (auto& [key, members] : buckets)
        strata.push_back({key, std::move(members)});
    return strata;
}

Fraction quantile_of(const RecordSet& set, std::size_t record_index, const Stratum& stratum,
                     const CountingRule& rule, ScoreField field) {
    if (std::find(stratum.members.begin(), stratum.members.end(), record_index) ==
        stratum.members.end())
        throw RecordNotInStratum(record_index < set.size()
                                     ? set.records()[record_index].record_id
                                     : "#" + std::to_string(record_index));

    const double own = score_value(set.records()[record_index], field);
    std::int64_t below = 0;
    std::int64_t at_or_below = 0;
    for (const std::size_t m : stratum.members) {
        const double s = score_value(set.records()[m], field);
        if (s < own)
            ++below;
        if (s <= own)
            ++at_or_below;
    }
    return quantile_from_counts(below, at_or_below,
                                static_cast<std::int64_t>(stratum.size()), rule);
}

int pr6_class(const Fraction& quantile) {
    static const Fraction kZero(0, 1);
    static const Fraction kMax(1009, 10); // 100.9, offset rule on a misconfigured tiny stratum
    if (quantile < kZero || quantile > kMax)
        throw OutOfRange(quantile.value());
    Fraction q = quantile;
    if (q > Fraction(100, 1))
        q = Fraction(100, 1);
    if (q >= Fraction(99, 1))
        return 6;
    if (q >= Fraction(95, 1))
        return 5;
    if (q >= Fraction(90, 1))
        return 4;
    if (q >= Fraction(75, 1))
        return 3;
    if (q >= Fraction(50, 1))
        return 2;
    return 1;
}

int pr6_class(double quantile) {
    if (quantile < 0.0 || quantile > 100.9)
        throw OutOfRange(quantile);
    const double q = std::min(quantile, 100.0);
    if (q >= 99.0)
        return 6;
    if (q >= 95.0)
        return 5;
    if (q >= 90.0)
        return 4;
    if (q >= 75.0)
        return 3;
    if (q >= 50.0)
        return 2;
    return 1;
}

ScoringResult score_set(const RecordSet& set, const CountingRule& rule, ScoreField field,
                        unsigned threads) {
    const auto strata = stratify(set);
    const auto& records = set.records();

    ScoredSet scored(records.size());
    std::vector<StratumKey> small_strata;
    for (const auto& s : strata) {
        if (s.size() < 5)
            small_strata.push_back(s.key);
    }

    auto score_stratum = [&](const Stratum& stratum) {
        std::vector<double> sorted_scores;
        sorted_scores.reserve(stratum.size());
        for (const std::size_t m : stratum.members)
            sorted_scores.push_back(score_value(records[m], field));
        std::sort(sorted_scores.begin(), sorted_scores.end());

        const auto n = static_cast<std::int64_t>(stratum.size());
        const bool small = stratum.size() < 5;
        for (const std::size_t m : stratum.members) {
            const double own = score_value(records[m], field);
            const auto lo =
                std::lower_bound(sorted_scores.begin(), sorted_scores.end(), own) -
                sorted_scores.begin();
            const auto hi =
                std::upper_bound(sorted_scores.begin(), sorted_scores.end(), own) -
                sorted_scores.begin();
            const Fraction q = quantile_from_counts(lo, hi, n, rule);
            scored[m] = {records[m].record_id, stratum.key,          q,
                         pr6_class(q),         records[m].times_cited,
                         records[m].citation_score, small};
        }
    };

    if (threads <= 1 || strata.size() < 2) {
        for (const auto& s : strata)
            score_stratum(s);
    } else {
        const unsigned n_workers = std::min<unsigned>(threads, strata.size());
        std::vector<std::thread> workers;
        workers.reserve(n_workers);
        for (unsigned w = 0; w < n_workers; ++w) {
            workers.emplace_back([&, w] {
                for (std::size_t i = w; i < strata.size(); i += n_workers)
                    score_stratum(strata[i]);
            });
        }
        for (auto& t : workers)
            t.join();
    }

    std::sort(scored.begin(), scored.end(),
              [](const ScoredRecord& a, const ScoredRecord& b) {
                  return a.record_id < b.record_id;
              });
    return {std::move(scored), std::move(small_strata)};
}

namespace {

const std::vector<std::string> kScoredHeader = {
    "record_id", "pub_year", "doc_type", "quantile", "pr6_class", "times_cited",
    "citation_score"};

Fraction fraction_from_decimal(std::string_view s, std::size_t line) {
    s = csv::trim(s);
    const auto dot = s.find('.');
    try {
        if (dot == std::string_view::npos)
            return Fraction(csv::parse_int(s), 1);
        const std::string_view int_part = s.substr(0, dot);
        const std::string_view frac_part = s.substr(dot + 1);
        if (frac_part.empty() || frac_part.size() > 9)
            throw std::invalid_argument("bad decimal");
        std::int64_t den = 1;
        for (std::size_t i = 0; i < frac_part.size(); ++i)
            den *= 10;
        const std::int64_t whole = csv::parse_int(int_part);
        const std::int64_t frac = csv::parse_int(frac_part);
        if (frac < 0)
            throw std::invalid_argument("bad decimal");
        const std::int64_t sign = int_part.starts_with("-") ? -1 : 1;
        return Fraction(whole * den + sign * frac, den);
    } catch (const std::invalid_argument&) {
        throw MalformedRow(line, "quantile is not a decimal: \"" + std::string(s) + "\"");
    }
}

} // namespace

void write_scored_csv(const ScoredSet& scored, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoFailure("cannot open " + path + " for writing");
    csv::Writer w(out);
    w.row(kScoredHeader);
    for (const auto& r : scored) {
        const std::vector<std::string> row = {
            r.record_id,
            std::to_string(r.stratum.pub_year),
            r.stratum.doc_type.label,
            csv::fmt_fixed(r.quantile.value(), 4),
            std::to_string(r.pr6_class),
            std::to_string(r.times_cited),
            csv::fmt_shortest(r.citation_score),
        };
        w.row(row);
    }
    if (!out)
        throw IoFailure("write failed: " + path);
}

ScoredSet read_scored_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoFailure("cannot open " + path);
    csv::Reader reader(in);
    std::vector<std::string> row;
    if (!reader.next(row))
        throw EmptyFile(path);
    if (row != kScoredHeader)
        throw MalformedRow(1, "unexpected scored CSV header");

    ScoredSet scored;
    while (reader.next(row)) {
        if (row.size() == 1 && csv::trim(row[0]).empty())
            continue;
        if (row.size() != kScoredHeader.size())
            throw MalformedRow(reader.line(), "expected " +
                                                  std::to_string(kScoredHeader.size()) +
                                                  " fields, got " + std::to_string(row.size()));
        ScoredRecord r;
        r.record_id = row[0];
        r.stratum.pub_year = static_cast<int>(csv::parse_int(row[1]));
        r.stratum.doc_type = DocType::from_label(row[2]);
        r.quantile = fraction_from_decimal(row[3], reader.line());
        r.pr6_class = static_cast<int>(csv::parse_int(row[4]));
        r.times_cited = csv::parse_int(row[5]);
        r.citation_score = csv::parse_double(row[6]);
        if (r.pr6_class < 1 || r.pr6_class > 6)
            throw MalformedRow(reader.line(), "pr6_class out of range");
        scored.push_back(std::move(r));
    }
    std::sort(scored.begin(), scored.end(),
              [](const ScoredRecord& a, const ScoredRecord& b) {
                  return a.record_id < b.record_id;
              });
    for (std::size_t i = 1; i < scored.size(); ++i) {
        if (scored[i].record_id == scored[i - 1].record_id)
            throw Error("duplicate record id in " + path + ": " + scored[i].record_id);
    }
    return scored;
}

} // namespace i3kit
