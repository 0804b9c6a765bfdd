#include "i3kit/indicators.hpp"

#include <algorithm>
#include <cmath>

#include "i3kit/errors.hpp"

namespace i3kit {

double i3(const ScoredSet& scored, std::span<const WeightedMember> unit) {
    CompensatedSum sum;
    for (const auto& m : unit)
        sum.add(m.weight * scored[m.scored_index].quantile.value());
    return sum.value();
}

double i3_total(const ScoredSet& scored) {
    CompensatedSum sum;
    for (const auto& r : scored)
        sum.add(r.quantile.value());
    return sum.value();
}

double expected_i3(double i3_reference, double n_unit, double n_reference) {
    if (n_reference <= 0)
        throw EmptyReference();
    return i3_reference * n_unit / n_reference;
}

double pr6(const ScoredSet& scored, std::span<const WeightedMember> unit, Pr6Mode mode,
           std::size_t n_reference) {
    if (mode == Pr6Mode::SupersetShare && n_reference == 0)
        throw EmptyReference();
    CompensatedSum sum;
    for (const auto& m : unit) {
        double w = m.weight * scored[m.scored_index].pr6_class;
        if (mode == Pr6Mode::SupersetShare)
            w /= static_cast<double>(n_reference);
        sum.add(w);
    }
    return sum.value();
}

namespace {

struct ReferenceStats {
    double mean = 0;
    double sd = 0; // population standard deviation
    std::size_t n = 0;
};

ReferenceStats reference_quantile_stats(const ScoredSet& scored) {
    ReferenceStats stats;
    stats.n = scored.size();
    if (stats.n == 0)
        throw EmptyReference();
    CompensatedSum sum;
    for (const auto& r : scored)
        sum.add(r.quantile.value());
    stats.mean = sum.value() / static_cast<double>(stats.n);
    CompensatedSum sq;
    for (const auto& r : scored) {
        const double d = r.quantile.value() - stats.mean;
        sq.add(d * d);
    }
    stats.sd = std::sqrt(sq.value() / static_cast<double>(stats.n));
    return stats;
}

std::optional<double> ri3r_with_stats(const ScoredSet& scored,
                                      std::span<const WeightedMember> unit,
                                      const ReferenceStats& ref, int min_n) {
    if (static_cast<long long>(unit.size()) < min_n)
        return std::nullopt;
    if (ref.sd == 0.0)
        throw ZeroVariance();
    CompensatedSum wsum;
    CompensatedSum wqsum;
    for (const auto& m : unit) {
        wsum.add(m.weight);
        wqsum.add(m.weight * scored[m.scored_index].quantile.value());
    }
    if (wsum.value() <= 0)
        return std::nullopt;
    const double unit_mean = wqsum.value() / wsum.value();
    const double se = ref.sd / std::sqrt(static_cast<double>(unit.size()));
    return (unit_mean - ref.mean) / se;
}

} // namespace

std::optional<double> ri3r(const ScoredSet& scored, std::span<const WeightedMember> unit,
                           int min_n) {
    return ri3r_with_stats(scored, unit, reference_quantile_stats(scored), min_n);
}

IndicatorReport indicator_report(const ScoredSet& reference, const UnitMap& units, int min_n) {
    if (reference.empty())
        throw EmptyReference();

    IndicatorReport report;
    report.n_reference = reference.size();
    report.i3_reference = i3_total(reference);
    {
        CompensatedSum sum;
        for (const auto& r : reference)
            sum.add(r.pr6_class);
        report.pr6_reference = sum.value();
    }
    const ReferenceStats ref_stats = reference_quantile_stats(reference);

    CompensatedSum total_weight;
    report.rows.reserve(units.size());
    for (const auto& [unit_id, members] : units) {
        IndicatorResult row;
        row.unit_id = unit_id;

        CompensatedSum w;
        CompensatedSum cites;
        CompensatedSum impact;
        CompensatedSum classes;
        for (const auto& m : members) {
            const auto& r = reference[m.scored_index];
            w.add(m.weight);
            cites.add(m.weight * static_cast<double>(r.times_cited));
            impact.add(m.weight * r.quantile.value());
            classes.add(m.weight * r.pr6_class);
        }
        row.n_papers = w.value();
        row.sum_citations = cites.value();
        row.mean_citations = row.n_papers > 0 ? row.sum_citations / row.n_papers : 0.0;
        row.i3 = impact.value();
        row.pr6 = classes.value();
        row.i3_share = report.i3_reference > 0 ? row.i3 / report.i3_reference : 0.0;
        row.pr6_share = report.pr6_reference > 0 ? row.pr6 / report.pr6_reference : 0.0;
        row.expected_i3 = expected_i3(report.i3_reference, row.n_papers,
                                      static_cast<double>(report.n_reference));
        row.mean_quantile = row.n_papers > 0 ? row.i3 / row.n_papers : 0.0;
        row.ri3r_z = ri3r_with_stats(reference, members, ref_stats, min_n);

        total_weight.add(row.n_papers);
        report.rows.push_back(std::move(row));
    }
    report.overlap_multiplicity =
        total_weight.value() / static_cast<double>(report.n_reference);

    std::sort(report.rows.begin(), report.rows.end(),
              [](const IndicatorResult& a, const IndicatorResult& b) {
                  if (a.i3_share != b.i3_share)
                      return a.i3_share > b.i3_share;
                  return a.unit_id < b.unit_id;
              });
    return report;
}

} // namespace i3kit
