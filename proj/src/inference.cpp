#include "i3kit/inference.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace i3kit {

std::string to_string(FlagLevel level) {
    switch (level) {
    case FlagLevel::AboveP01: return "++";
    case FlagLevel::AboveP05: return "+";
    case FlagLevel::NotSignificant: return "";
    case FlagLevel::BelowP05: return "-";
    case FlagLevel::BelowP01: return "--";
    }
    return "";
}

FlagLevel flag_for_z(double z) {
    if (z >= 2.576)
        return FlagLevel::AboveP01;
    if (z >= 1.96)
        return FlagLevel::AboveP05;
    if (z <= -2.576)
        return FlagLevel::BelowP01;
    if (z <= -1.96)
        return FlagLevel::BelowP05;
    return FlagLevel::NotSignificant;
}

ZTestResult ztest_two_proportions(double x1, double n1, double x2, double n2) {
    if (n1 <= 0 || n2 <= 0)
        throw std::invalid_argument("ztest: totals must be positive");
    if (x1 < 0 || x1 > n1 || x2 < 0 || x2 > n2)
        throw std::invalid_argument("ztest: counts must lie in [0, n]");
    const double pooled = (x1 + x2) / (n1 + n2);
    if (pooled <= 0.0 || pooled >= 1.0)
        return {0.0, true};
    const double p1 = x1 / n1;
    const double p2 = x2 / n2;
    const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2));
    return {(p1 - p2) / se, false};
}

FlaggedZ flag_unit(double observed_metric, double observed_total, double n_unit,
                   double n_total) {
    if (observed_total <= 0 || n_total <= 0)
        throw std::invalid_argument("flag_unit: totals must be positive");
    const double x1 = static_cast<double>(std::llround(observed_metric));
    const double n1 = static_cast<double>(std::llround(observed_total));
    const auto zt = ztest_two_proportions(std::min(x1, n1), n1, n_unit, n_total);
    return {zt.z, flag_for_z(zt.z), zt.degenerate};
}

FlaggedZ flag_indicator(double unit_metric, double total_metric, double n_unit, double n_total,
                        ExpectMode mode) {
    if (mode == ExpectMode::I3Points)
        return flag_unit(unit_metric, total_metric, n_unit, n_total);
    // shares: re-express the unit's metric share as an equivalent publication
    // count and test it against the unit's actual publication share
    const double share = total_metric > 0 ? unit_metric / total_metric : 0.0;
    return flag_unit(share * n_total, n_total, n_unit, n_total);
}

double bonferroni_alpha(double alpha, std::size_t n_units) {
    if (n_units < 2)
        throw std::invalid_argument("bonferroni_alpha: need at least 2 units");
    const double comparisons =
        static_cast<double>(n_units) * static_cast<double>(n_units - 1) / 2.0;
    return alpha / comparisons;
}

namespace {

struct RankedSamples {
    std::vector<double> midranks_a;
    double rank_sum_a = 0.0;
    std::vector<std::int64_t> doubled_ranks; // all N midranks, times 2 (integers)
    double tie_term = 0.0;                   // sum of t^3 - t over tie groups
};

RankedSamples midrank(std::span<const double> a, std::span<const double> b) {
    struct Item {
        double value;
        bool from_a;
    };
    std::vector<Item> items;
    items.reserve(a.size() + b.size());
    for (const double v : a)
        items.push_back({v, true});
    for (const double v : b)
        items.push_back({v, false});
    std::sort(items.begin(), items.end(),
              [](const Item& x, const Item& y) { return x.value < y.value; });

    RankedSamples out;
    out.doubled_ranks.reserve(items.size());
    std::size_t i = 0;
    while (i < items.size()) {
        std::size_t j = i;
        while (j < items.size() && items[j].value == items[i].value)
            ++j;
        const auto t = static_cast<double>(j - i);
        out.tie_term += t * t * t - t;
        // ranks i+1 .. j (1-based); midrank doubled is an integer
        const std::int64_t doubled = static_cast<std::int64_t>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) {
            out.doubled_ranks.push_back(doubled);
            if (items[k].from_a)
                out.rank_sum_a += static_cast<double>(doubled) / 2.0;
        }
        i = j;
    }
    return out;
}

// Conditional permutation distribution of the smaller sample's doubled rank
// sum, by subset-sum counting. Equivalent to enumerating all C(N, k)
// labelings; counts are exact integers held in doubles.
double exact_two_sided_p(const std::vector<std::int64_t>& doubled_ranks, std::size_t k,
                         double n_a, double n_b, double d_obs) {
    std::vector<std::int64_t> sorted = doubled_ranks;
    std::sort(sorted.begin(), sorted.end());
    std::int64_t max_sum = 0;
    for (std::size_t i = sorted.size() - k; i < sorted.size(); ++i)
        max_sum += sorted[i];

    std::vector<std::vector<double>> ways(k + 1,
                                          std::vector<double>(static_cast<std::size_t>(max_sum) + 1, 0.0));
    ways[0][0] = 1.0;
    for (const std::int64_t r : doubled_ranks) {
        for (std::size_t j = k; j >= 1; --j) {
            auto& dst = ways[j];
            const auto& src = ways[j - 1];
            for (std::int64_t s = max_sum - r; s >= 0; --s) {
                if (src[static_cast<std::size_t>(s)] != 0.0)
                    dst[static_cast<std::size_t>(s + r)] += src[static_cast<std::size_t>(s)];
            }
        }
    }

    const double mu = n_a * n_b / 2.0;
    const double k_offset = static_cast<double>(k) * (static_cast<double>(k) + 1.0) / 2.0;
    double total = 0.0;
    double hits = 0.0;
    for (std::int64_t s = 0; s <= max_sum; ++s) {
        const double count = ways[k][static_cast<std::size_t>(s)];
        if (count == 0.0)
            continue;
        total += count;
        const double u = static_cast<double>(s) / 2.0 - k_offset;
        if (std::abs(u - mu) >= d_obs - 1e-9)
            hits += count;
    }
    return hits / total;
}

} // namespace

MannWhitneyResult mann_whitney(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("mann_whitney: both samples must be non-empty");
    const auto n_a = static_cast<double>(a.size());
    const auto n_b = static_cast<double>(b.size());
    const double n = n_a + n_b;

    const RankedSamples ranked = midrank(a, b);
    const double u_a = ranked.rank_sum_a - n_a * (n_a + 1.0) / 2.0;
    const double mu = n_a * n_b / 2.0;
    const double d = std::abs(u_a - mu);

    MannWhitneyResult result;
    result.u = u_a;

    const std::size_t n_small = std::min(a.size(), b.size());
    // exact path: small enough for subset-sum counting to stay cheap
    if (n_small <= 8 && a.size() + b.size() <= 2000) {
        result.exact = true;
        result.p = exact_two_sided_p(ranked.doubled_ranks, n_small, n_a, n_b, d);
        return result;
    }

    double var = n_a * n_b / 12.0 * ((n + 1.0) - ranked.tie_term / (n * (n - 1.0)));
    if (var <= 0.0) {
        // every value tied: the distribution is a point mass at mu
        result.p = 1.0;
        return result;
    }
    const double z = std::max(d - 0.5, 0.0) / std::sqrt(var);
    result.p = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    return result;
}

ComparisonGraph homogeneity_graph(const std::map<std::string, std::vector<double>>& units,
                                  double alpha, unsigned threads) {
    if (units.size() < 2)
        throw std::invalid_argument("homogeneity_graph: need at least 2 units");
    for (const auto& [key, sample] : units) {
        if (sample.empty())
            throw std::invalid_argument("homogeneity_graph: unit '" + key + "' has no values");
    }

    ComparisonGraph graph;
    std::vector<const std::vector<double>*> samples;
    graph.nodes.reserve(units.size());
    for (const auto& [key, sample] : units) {
        graph.nodes.push_back(key);
        samples.push_back(&sample);
    }
    graph.alpha_family = bonferroni_alpha(alpha, graph.nodes.size());

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < graph.nodes.size(); ++i)
        for (std::size_t j = i + 1; j < graph.nodes.size(); ++j)
            pairs.emplace_back(i, j);

    std::vector<double> pvals(pairs.size());
    auto run_range = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t idx = lo; idx < hi; ++idx) {
            const auto [i, j] = pairs[idx];
            pvals[idx] = mann_whitney(*samples[i], *samples[j]).p;
        }
    };
    if (threads <= 1 || pairs.size() < 2) {
        run_range(0, pairs.size());
    } else {
        const unsigned n_workers = std::min<std::size_t>(threads, pairs.size());
        std::vector<std::thread> workers;
        const std::size_t chunk = (pairs.size() + n_workers - 1) / n_workers;
        for (unsigned w = 0; w < n_workers; ++w) {
            const std::size_t lo = w * chunk;
            const std::size_t hi = std::min(pairs.size(), lo + chunk);
            if (lo < hi)
                workers.emplace_back(run_range, lo, hi);
        }
        for (auto& t : workers)
            t.join();
    }

    std::vector<std::pair<std::size_t, std::size_t>> edge_pairs;
    for (std::size_t idx = 0; idx < pairs.size(); ++idx) {
        if (pvals[idx] >= graph.alpha_family) {
            graph.edges.push_back({pairs[idx].first, pairs[idx].second, pvals[idx]});
            edge_pairs.push_back(pairs[idx]);
        }
    }
    graph.core_number = core_numbers(graph.nodes.size(), edge_pairs);
    return graph;
}

std::vector<int> core_numbers(std::size_t n_nodes,
                              std::span<const std::pair<std::size_t, std::size_t>> edges) {
    std::vector<std::vector<std::size_t>> adj(n_nodes);
    for (const auto& [a, b] : edges) {
        if (a == b)
            continue;
        adj[a].push_back(b);
        adj[b].push_back(a);
    }

    std::vector<int> degree(n_nodes);
    for (std::size_t v = 0; v < n_nodes; ++v)
        degree[v] = static_cast<int>(adj[v].size());

    std::vector<int> core(n_nodes, 0);
    std::vector<char> removed(n_nodes, 0);
    std::size_t remaining = n_nodes;
    int k = 0;
    while (remaining > 0) {
        int min_deg = INT_MAX;
        for (std::size_t v = 0; v < n_nodes; ++v) {
            if (!removed[v])
                min_deg = std::min(min_deg, degree[v]);
        }
        k = std::max(k, min_deg);

        std::vector<std::size_t> stack;
        for (std::size_t v = 0; v < n_nodes; ++v) {
            if (!removed[v] && degree[v] <= k)
                stack.push_back(v);
        }
        while (!stack.empty()) {
            const std::size_t v = stack.back();
            stack.pop_back();
            if (removed[v])
                continue;
            removed[v] = 1;
            core[v] = k;
            --remaining;
            for (const std::size_t u : adj[v]) {
                if (!removed[u] && --degree[u] <= k)
                    stack.push_back(u);
            }
        }
    }
    return core;
}

} // namespace i3kit
