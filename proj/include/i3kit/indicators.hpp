#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "i3kit/quantiles.hpp"

namespace i3kit {

/// Membership of one scored record in an evaluation unit. Weight is 1 under
/// integer counting and the record's address share under fractional counting.
struct WeightedMember {
    std::size_t scored_index = 0;
    double weight = 1.0;
};

using UnitMembers = std::vector<WeightedMember>;
using UnitMap = std::map<std::string, UnitMembers>;

/// Neumaier-compensated accumulator; all indicator reductions run through it.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Sum of quantile values over a unit (the integrated impact of the unit).
double i3(const ScoredSet& scored, std::span<const WeightedMember> unit);

/// I3 of the whole reference set (every record once, weight 1).
double i3_total(const ScoredSet& scored);

/// Reference I3 scaled by the unit's publication share.
double expected_i3(double i3_reference, double n_unit, double n_reference);

enum class Pr6Mode {
    ClassSum,      // sum of class weights 1..6 over the unit's papers
    SupersetShare, // each paper contributes class/N_reference
};

double pr6(const ScoredSet& scored, std::span<const WeightedMember> unit, Pr6Mode mode,
           std::size_t n_reference = 0);

/// One-sample z of the unit's mean quantile against the reference mean, using
/// the reference's population standard deviation. Absent when the unit has
/// fewer than min_n papers.
std::optional<double> ri3r(const ScoredSet& scored, std::span<const WeightedMember> unit,
                           int min_n = 5);

struct IndicatorResult {
    std::string unit_id;
    double n_papers = 0;      // weighted; integral under integer counting
    double sum_citations = 0; // weighted times_cited
    double mean_citations = 0;
    double i3 = 0;
    double i3_share = 0;
    double expected_i3 = 0;
    double pr6 = 0; // class sum
    double pr6_share = 0;
    double mean_quantile = 0;
    std::optional<double> ri3r_z;
};

struct IndicatorReport {
    std::vector<IndicatorResult> rows; // i3_share descending, ties by unit_id
    double i3_reference = 0;
    double pr6_reference = 0;
    std::size_t n_reference = 0;
    /// Sum of weighted unit sizes over n_reference; 1 for a true partition,
    /// above 1 when integer counting assigns one record to several units.
    double overlap_multiplicity = 0;
};

IndicatorReport indicator_report(const ScoredSet& reference, const UnitMap& units,
                                 int min_n = 5);

} // namespace i3kit
