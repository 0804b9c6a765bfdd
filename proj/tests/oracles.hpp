// Independent reference implementations used only by tests. These stay
// deliberately naive (exhaustive enumeration, bitmask subsets, pair counting)
// so they share no code path with the library.
#pragma once

#include <algorithm>
#include <bit>
#include <climits>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace oracles {

struct MannWhitneyRef {
    double u = 0.0;
    double p = 1.0;
};

/// U of the labeling `is_a` over `pool`, by literal pair comparison.
inline double u_by_pairs(const std::vector<double>& pool, const std::vector<char>& is_a) {
    double u = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (!is_a[i])
            continue;
        for (std::size_t j = 0; j < pool.size(); ++j) {
            if (is_a[j])
                continue;
            if (pool[i] > pool[j])
                u += 1.0;
            else if (pool[i] == pool[j])
                u += 0.5;
        }
    }
    return u;
}

/// Exhaustive label-permutation test: every C(n, |a|) assignment of the
/// combined values, two-sided p by distance from the U mean.
inline MannWhitneyRef mann_whitney_exhaustive(const std::vector<double>& a,
                                              const std::vector<double>& b) {
    const std::size_t n = a.size() + b.size();
    std::vector<double> pool = a;
    pool.insert(pool.end(), b.begin(), b.end());

    std::vector<char> observed(n, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        observed[i] = 1;
    const double mu = static_cast<double>(a.size()) * static_cast<double>(b.size()) / 2.0;
    const double u_obs = u_by_pairs(pool, observed);
    const double d_obs = std::abs(u_obs - mu);

    std::vector<std::size_t> comb(a.size());
    for (std::size_t i = 0; i < comb.size(); ++i)
        comb[i] = i;
    double total = 0.0;
    double hits = 0.0;
    while (true) {
        std::vector<char> is_a(n, 0);
        for (const std::size_t i : comb)
            is_a[i] = 1;
        total += 1.0;
        if (std::abs(u_by_pairs(pool, is_a) - mu) >= d_obs - 1e-9)
            hits += 1.0;

        // next combination in lexicographic order
        std::size_t k = comb.size();
        while (k > 0 && comb[k - 1] == n - comb.size() + k - 1)
            --k;
        if (k == 0)
            break;
        ++comb[k - 1];
        for (std::size_t i = k; i < comb.size(); ++i)
            comb[i] = comb[i - 1] + 1;
    }
    return {u_obs, hits / total};
}

/// Tie-corrected, continuity-corrected normal approximation, computed from
/// scratch (pair-counted U, no midranks shared with the library).
inline double mann_whitney_normal_p(const std::vector<double>& a,
                                    const std::vector<double>& b) {
    const double n_a = static_cast<double>(a.size());
    const double n_b = static_cast<double>(b.size());
    const double n = n_a + n_b;

    std::vector<double> pool = a;
    pool.insert(pool.end(), b.begin(), b.end());
    std::vector<char> is_a(pool.size(), 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        is_a[i] = 1;
    const double u = u_by_pairs(pool, is_a);

    std::vector<double> sorted = pool;
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0.0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i])
            ++j;
        const auto t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        i = j;
    }
    const double var = n_a * n_b / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (var <= 0.0)
        return 1.0;
    const double z = std::max(std::abs(u - n_a * n_b / 2.0) - 0.5, 0.0) / std::sqrt(var);
    return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

/// Core numbers by maximal-subgraph search: for every vertex subset, its
/// minimum induced degree bounds the core number of every member.
inline std::vector<int> core_numbers_bruteforce(
    std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    std::vector<std::uint32_t> adj(n, 0);
    for (const auto& [a, b] : edges) {
        if (a == b)
            continue;
        adj[a] |= 1u << b;
        adj[b] |= 1u << a;
    }
    std::vector<int> best(n, 0);
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        int min_deg = INT_MAX;
        for (std::size_t v = 0; v < n; ++v) {
            if (mask & (1u << v))
                min_deg = std::min(min_deg, std::popcount(adj[v] & mask));
        }
        for (std::size_t v = 0; v < n; ++v) {
            if (mask & (1u << v))
                best[v] = std::max(best[v], min_deg);
        }
    }
    return best;
}

} // namespace oracles
