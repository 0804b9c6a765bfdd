#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace i3kit {

enum class FlagLevel { AboveP01, AboveP05, NotSignificant, BelowP05, BelowP01 };

/// "++", "+", "", "-", "--".
std::string to_string(FlagLevel level);

/// Two-sided flag from a z score: 1.96 for the 5% level, 2.576 for 1%.
FlagLevel flag_for_z(double z);

struct ZTestResult {
    double z = 0.0;
    /// Pooled proportion was 0 or 1; z is 0 by convention.
    bool degenerate = false;
};

/// Pooled two-proportion z-test, no continuity correction:
/// z = (p1 - p2) / sqrt(pbar (1 - pbar) (1/n1 + 1/n2)).
ZTestResult ztest_two_proportions(double x1, double n1, double x2, double n2);

struct FlaggedZ {
    double z = 0.0;
    FlagLevel flag = FlagLevel::NotSignificant;
    bool degenerate = false;
};

/// Observed-vs-expected test for one unit: the unit's metric total (I3 or PR6
/// points, rounded to integers) against its publication count.
FlaggedZ flag_unit(double observed_metric, double observed_total, double n_unit,
                   double n_total);

enum class ExpectMode {
    I3Points, // metric points as success counts out of the metric total
    Shares,   // unit's metric share re-expressed as publications out of n_total
};

/// Dispatches flag_unit per the expectation mode.
FlaggedZ flag_indicator(double unit_metric, double total_metric, double n_unit, double n_total,
                        ExpectMode mode);

/// Family-wise significance level for all-pairs comparison of n_units.
double bonferroni_alpha(double alpha, std::size_t n_units);

struct MannWhitneyResult {
    double u = 0.0; // U statistic of the first sample, tie-aware
    double p = 1.0; // two-sided
    bool exact = false;
};

/// Mann-Whitney U with midranks. Exact conditional permutation p when the
/// smaller sample has at most 8 values, tie-corrected normal approximation
/// (continuity-corrected) otherwise.
MannWhitneyResult mann_whitney(std::span<const double> a, std::span<const double> b);

struct ComparisonEdge {
    std::size_t a = 0;
    std::size_t b = 0; // indices into nodes, a < b
    double p = 1.0;
};

/// Undirected homogeneity graph: units whose distributions are NOT
/// significantly different at the family-wise level are connected.
struct ComparisonGraph {
    std::vector<std::string> nodes; // sorted unit keys
    std::vector<ComparisonEdge> edges;
    double alpha_family = 0.0;
    std::vector<int> core_number; // parallel to nodes
};

/// All-pairs Mann-Whitney over the units' samples with Bonferroni family-wise
/// correction; edge iff p >= alpha_family. Pairs are tested in parallel when
/// threads > 1; output is independent of thread count.
ComparisonGraph homogeneity_graph(const std::map<std::string, std::vector<double>>& units,
                                  double alpha, unsigned threads = 1);

/// Core number of every vertex by iterative minimum-degree peeling.
std::vector<int> core_numbers(std::size_t n_nodes,
                              std::span<const std::pair<std::size_t, std::size_t>> edges);

} // namespace i3kit
