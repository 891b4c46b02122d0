// Balanced partition of a constellation into hypersymbols with large
// intra-subset minimum distance (used by reduced-state sequence estimation).
#pragma once

#include <algorithm>
#include <limits>
#include <random>
#include <vector>

#include "pskh/constellation.hpp"
#include "pskh/core.hpp"

namespace pskh {

struct HypersymbolPartition {
    std::vector<std::vector<int>> subsets;
    std::vector<double> intra_subset_dmin;  ///< +inf for singletons
    std::vector<int> label;                 ///< symbol index -> subset index

    [[nodiscard]] int count() const { return static_cast<int>(subsets.size()); }

    [[nodiscard]] double objective() const {
        return intra_subset_dmin.empty() ? 0.0 : *std::min_element(intra_subset_dmin.begin(), intra_subset_dmin.end());
    }
};

namespace detail {

inline double subset_dmin(const RealMatrix& dist, const std::vector<int>& s) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j) d = std::min(d, dist(s[i], s[j]));
    return d;
}

inline std::vector<double> sorted_objective(const std::vector<double>& v) {
    std::vector<double> s = v;
    std::sort(s.begin(), s.end());
    return s;
}

// Greedy max-min construction followed by pairwise-swap local search.
inline std::vector<std::vector<int>> partition_from_start(const RealMatrix& dist, int k, int first) {
    const int m = static_cast<int>(dist.rows());
    const int size = m / k;
    std::vector<std::vector<int>> sub(static_cast<std::size_t>(k));
    std::vector<bool> used(static_cast<std::size_t>(m), false);

    // K mutually far seeds (farthest-point traversal)
    std::vector<int> seeds{first};
    used[static_cast<std::size_t>(first)] = true;
    while (static_cast<int>(seeds.size()) < k) {
        int best = -1;
        double bd = -1.0;
        for (int p = 0; p < m; ++p) {
            if (used[static_cast<std::size_t>(p)]) continue;
            double dm = std::numeric_limits<double>::infinity();
            for (int s : seeds) dm = std::min(dm, dist(p, s));
            if (dm > bd) {
                bd = dm;
                best = p;
            }
        }
        seeds.push_back(best);
        used[static_cast<std::size_t>(best)] = true;
    }
    for (int i = 0; i < k; ++i) sub[static_cast<std::size_t>(i)].push_back(seeds[static_cast<std::size_t>(i)]);

    for (int p = 0; p < m; ++p) {
        if (used[static_cast<std::size_t>(p)]) continue;
        int target = -1;
        double bd = -1.0;
        for (int i = 0; i < k; ++i) {
            const auto& s = sub[static_cast<std::size_t>(i)];
            if (static_cast<int>(s.size()) >= size) continue;
            double dm = std::numeric_limits<double>::infinity();
            for (int q : s) dm = std::min(dm, dist(p, q));
            if (dm > bd) {
                bd = dm;
                target = i;
            }
        }
        sub[static_cast<std::size_t>(target)].push_back(p);
    }

    std::vector<double> dmins(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) dmins[static_cast<std::size_t>(i)] = subset_dmin(dist, sub[static_cast<std::size_t>(i)]);
    bool improved = true;
    while (improved) {
        improved = false;
        for (int a = 0; a < k && !improved; ++a) {
            for (int b = a + 1; b < k && !improved; ++b) {
                for (std::size_t ia = 0; ia < sub[static_cast<std::size_t>(a)].size() && !improved; ++ia) {
                    for (std::size_t ib = 0; ib < sub[static_cast<std::size_t>(b)].size() && !improved; ++ib) {
                        auto sa = sub[static_cast<std::size_t>(a)];
                        auto sb = sub[static_cast<std::size_t>(b)];
                        std::swap(sa[ia], sb[ib]);
                        std::vector<double> trial = dmins;
                        trial[static_cast<std::size_t>(a)] = subset_dmin(dist, sa);
                        trial[static_cast<std::size_t>(b)] = subset_dmin(dist, sb);
                        if (sorted_objective(dmins) < sorted_objective(trial)) {
                            sub[static_cast<std::size_t>(a)] = std::move(sa);
                            sub[static_cast<std::size_t>(b)] = std::move(sb);
                            dmins = std::move(trial);
                            improved = true;
                        }
                    }
                }
            }
        }
    }
    return sub;
}

}  // namespace detail

/// Splits A into K equal-size subsets maximising the smallest intra-subset
/// minimum distance. Several greedy starts (first seed drawn from `seed`) are
/// refined by swap local search; the lexicographically best result is kept.
inline HypersymbolPartition hypersymbol_partition(const ConstellationSet& a, int k, RngSeed seed, int starts = 8) {
    const int m = a.size();
    require(k >= 1 && k <= m && m % k == 0, "hypersymbol_partition: K must divide M");
    HypersymbolPartition out;
    out.label.assign(static_cast<std::size_t>(m), 0);
    if (k == m) {
        for (int i = 0; i < m; ++i) {
            out.subsets.push_back({i});
            out.intra_subset_dmin.push_back(std::numeric_limits<double>::infinity());
            out.label[static_cast<std::size_t>(i)] = i;
        }
        return out;
    }
    const RealMatrix dist = pairwise_distances(a.points());
    Rng rng(seed);
    std::uniform_int_distribution<int> pick(0, m - 1);
    std::vector<std::vector<int>> best;
    std::vector<double> best_obj;
    for (int s = 0; s < std::max(1, starts); ++s) {
        auto sub = detail::partition_from_start(dist, k, pick(rng));
        std::vector<double> d;
        for (const auto& v : sub) d.push_back(detail::subset_dmin(dist, v));
        auto obj = detail::sorted_objective(d);
        if (best.empty() || best_obj < obj) {
            best = std::move(sub);
            best_obj = std::move(obj);
        }
    }
    for (auto& v : best) std::sort(v.begin(), v.end());
    std::sort(best.begin(), best.end());
    out.subsets = std::move(best);
    for (int i = 0; i < k; ++i) {
        const auto& v = out.subsets[static_cast<std::size_t>(i)];
        out.intra_subset_dmin.push_back(detail::subset_dmin(dist, v));
        for (int p : v) out.label[static_cast<std::size_t>(p)] = i;
    }
    return out;
}

}  // namespace pskh
