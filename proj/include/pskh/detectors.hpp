// Detectors and sequence estimators built on the trellis engine, plus the
// branch-count complexity measure.
#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "pskh/channel.hpp"
#include "pskh/constellation.hpp"
#include "pskh/core.hpp"
#include "pskh/isi_model.hpp"
#include "pskh/partition.hpp"
#include "pskh/trellis.hpp"

namespace pskh {

enum class Estimator { Symbolwise, Va, Dfe, Ddfse, Rsse, IterVa };
enum class NeighborSource { Effective, Original };

inline std::string to_string(Estimator e) {
    switch (e) {
        case Estimator::Symbolwise: return "symbolwise";
        case Estimator::Va: return "va";
        case Estimator::Dfe: return "dfe";
        case Estimator::Ddfse: return "ddfse";
        case Estimator::Rsse: return "rsse";
        case Estimator::IterVa: return "iter";
    }
    return "va";
}

inline Estimator estimator_from_string(const std::string& s) {
    if (s == "symbolwise") return Estimator::Symbolwise;
    if (s == "va") return Estimator::Va;
    if (s == "dfe") return Estimator::Dfe;
    if (s == "ddfse") return Estimator::Ddfse;
    if (s == "rsse") return Estimator::Rsse;
    if (s == "iter") return Estimator::IterVa;
    throw DomainError("unknown estimator '" + s + "'");
}

struct TrellisDecodeConfig {
    Estimator estimator = Estimator::Va;
    int nu = 0;
    int nu_max = 2;                        ///< IterVa
    int n_nb = 4;                          ///< IterVa
    std::optional<HypersymbolPartition> partition;  ///< Rsse
    int traceback_depth = -1;              ///< -1 -> 5 (nu + 1)
    int tail = -1;                         ///< feedback intervals; -1 -> model default
    NeighborSource neighbors = NeighborSource::Effective;
    long long branch_cap = 1LL << 20;
};

inline void validate(const TrellisDecodeConfig& c) {
    require(c.nu >= 0, "decode config: nu must be >= 0");
    switch (c.estimator) {
        case Estimator::Symbolwise:
        case Estimator::Dfe:
            require(c.nu == 0, "decode config: symbolwise/DFE take nu = 0");
            break;
        case Estimator::Rsse:
            require(c.partition.has_value(), "decode config: RSSE needs a partition");
            require(c.nu >= 2, "decode config: RSSE needs nu >= 2");
            break;
        case Estimator::IterVa: require(c.nu_max >= 1 && c.n_nb >= 0, "decode config: bad iterative VA parameters"); break;
        default: break;
    }
}

/// Known symbols (pilots) and the symbol assumed before the first step.
struct FrameLayout {
    int steps = 0;
    int prehistory = 0;
    std::vector<int> known;  ///< empty, or one entry per step: symbol index or -1 for data

    [[nodiscard]] bool is_known(int k) const { return !known.empty() && known[static_cast<std::size_t>(k)] >= 0; }
};

inline FrameLayout plain_layout(const ReceivedFrame& y) {
    return FrameLayout{static_cast<int>(y.samples().cols()) + y.first_index, 0, {}};
}

// ---------------------------------------------------------------------------
// Complexity (branches per trellis step)
// ---------------------------------------------------------------------------

namespace detail {
inline long long checked_mul(long long a, long long b) {
    require(a == 0 || b <= std::numeric_limits<long long>::max() / a, "complexity: overflow");
    return a * b;
}
inline long long ipow(long long b, int e) {
    long long r = 1;
    for (int i = 0; i < e; ++i) r = checked_mul(r, b);
    return r;
}
}  // namespace detail

inline long long xi_va(long long m, int nu) { return detail::ipow(m, nu + 1); }

/// M times the product of the per-element state orders.
inline long long xi_rsse(long long m, const std::vector<long long>& orders) {
    long long r = m;
    for (long long o : orders) r = detail::checked_mul(r, o);
    return r;
}

/// M^2 for the nu = 1 pass plus (n_NB,i + 1)^(nu_i + 1) for every later pass.
inline long long xi_iterative(long long m, const std::vector<std::pair<int, int>>& passes) {
    long long r = detail::checked_mul(m, m);
    for (const auto& [nnb, nu] : passes) r += detail::ipow(nnb + 1, nu + 1);
    return r;
}

inline long long complexity_xi(const TrellisDecodeConfig& c, long long m) {
    switch (c.estimator) {
        case Estimator::Symbolwise:
        case Estimator::Dfe: return m;
        case Estimator::Va:
        case Estimator::Ddfse: return xi_va(m, c.nu);
        case Estimator::Rsse: {
            std::vector<long long> orders(static_cast<std::size_t>(c.nu), m);
            for (int i = 1; i < c.nu; ++i) orders[static_cast<std::size_t>(i)] = c.partition ? c.partition->count() : m;
            return xi_rsse(m, orders);
        }
        case Estimator::IterVa: {
            std::vector<std::pair<int, int>> passes;
            for (int i = 2; i <= c.nu_max; ++i) passes.emplace_back(c.n_nb, i);
            return xi_iterative(m, passes);
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------
// Detectors
// ---------------------------------------------------------------------------

/// argmin_j |y[k] - H a_j|^2 per column; ties to the lower index.
inline std::vector<int> detect_symbolwise(const ReceivedFrame& y, const ConstellationSet& a) {
    const ComplexMatrix ha = y.channel.H * a.points();
    const ComplexMatrix& s = y.samples();
    std::vector<int> out(static_cast<std::size_t>(s.cols()));
    for (Eigen::Index k = 0; k < s.cols(); ++k) {
        int best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (int j = 0; j < a.size(); ++j) {
            const double d = (s.col(k) - ha.col(j)).squaredNorm();
            if (d < bd) {
                bd = d;
                best = j;
            }
        }
        out[static_cast<std::size_t>(k)] = best;
    }
    return out;
}

namespace detail {

inline std::vector<std::vector<int>> full_candidates(const FrameLayout& lay, int m) {
    std::vector<int> all(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) all[static_cast<std::size_t>(i)] = i;
    std::vector<std::vector<int>> c(static_cast<std::size_t>(lay.steps));
    for (int k = 0; k < lay.steps; ++k)
        c[static_cast<std::size_t>(k)] = lay.is_known(k) ? std::vector<int>{lay.known[static_cast<std::size_t>(k)]} : all;
    return c;
}

inline int resolved_tail(const TrellisDecodeConfig& c, const BranchMetricModel& model) {
    return c.tail >= 0 ? c.tail : model.dfe_tail_taps;
}

inline TrellisSpec spec_for(const TrellisDecodeConfig& c, const BranchMetricModel& model, int nu) {
    TrellisSpec s;
    s.nu = nu;
    s.tail = resolved_tail(c, model);
    s.traceback_depth = c.traceback_depth;
    s.branch_cap = c.branch_cap;
    return s;
}

}  // namespace detail

inline DecodeResult decode_full(const ReceivedFrame& y, const ConstellationSet& a, const BranchMetricModel& model,
                                const TrellisDecodeConfig& cfg, const FrameLayout& lay,
                                const SlerpTable* st = nullptr) {
    validate(cfg);
    const auto spec = detail::spec_for(cfg, model, cfg.nu);
    const auto cand = detail::full_candidates(lay, a.size());
    if (cfg.estimator == Estimator::Rsse) {
        auto s = spec;
        s.hyper_from = 2;
        s.partition = &*cfg.partition;
        return trellis_decode(y, a, model, cand, lay.prehistory, s, st);
    }
    if (cfg.estimator != Estimator::IterVa) return trellis_decode(y, a, model, cand, lay.prehistory, spec, st);

    // iterative VA: nu = 1 over the full alphabet, then nu = 2..nu_max over
    // the previous estimate and its n_NB nearest neighbours
    auto res = trellis_decode(y, a, model, cand, lay.prehistory, detail::spec_for(cfg, model, 1), st);
    if (cfg.nu_max < 2) return res;
    const ComplexMatrix pts = cfg.neighbors == NeighborSource::Effective ? ComplexMatrix(y.channel.H * a.points())
                                                                         : a.points();
    const auto nb = neighbor_table(pairwise_distances(pts), std::min(cfg.n_nb, a.size() - 1));
    long long branches = res.max_branches;
    for (int nu = 2; nu <= cfg.nu_max; ++nu) {
        std::vector<std::vector<int>> c(static_cast<std::size_t>(lay.steps));
        for (int k = 0; k < lay.steps; ++k) {
            auto& ck = c[static_cast<std::size_t>(k)];
            if (lay.is_known(k)) {
                ck = {lay.known[static_cast<std::size_t>(k)]};
                continue;
            }
            const int x = res.decisions[static_cast<std::size_t>(k)];
            ck = nb[static_cast<std::size_t>(x)];
            ck.push_back(x);
            std::sort(ck.begin(), ck.end());
        }
        res = trellis_decode(y, a, model, c, lay.prehistory, detail::spec_for(cfg, model, nu), st);
        branches += res.max_branches;
    }
    res.max_branches = branches;
    return res;
}

inline std::vector<int> viterbi(const ReceivedFrame& y, const ConstellationSet& a, const BranchMetricModel& model,
                                const TrellisDecodeConfig& cfg) {
    return decode_full(y, a, model, cfg, plain_layout(y)).decisions;
}

inline std::vector<int> dfe(const ReceivedFrame& y, const ConstellationSet& a, const BranchMetricModel& model,
                            TrellisDecodeConfig cfg) {
    cfg.estimator = Estimator::Dfe;
    cfg.nu = 0;
    return decode_full(y, a, model, cfg, plain_layout(y)).decisions;
}

inline std::vector<int> ddfse(const ReceivedFrame& y, const ConstellationSet& a, const BranchMetricModel& model,
                              TrellisDecodeConfig cfg) {
    cfg.estimator = Estimator::Ddfse;
    return decode_full(y, a, model, cfg, plain_layout(y)).decisions;
}

inline std::vector<int> rsse(const ReceivedFrame& y, const ConstellationSet& a, const BranchMetricModel& model,
                             TrellisDecodeConfig cfg) {
    cfg.estimator = Estimator::Rsse;
    return decode_full(y, a, model, cfg, plain_layout(y)).decisions;
}

inline std::vector<int> iterative_va(const ReceivedFrame& y, const ConstellationSet& a, const BranchMetricModel& model,
                                     TrellisDecodeConfig cfg) {
    cfg.estimator = Estimator::IterVa;
    return decode_full(y, a, model, cfg, plain_layout(y)).decisions;
}

}  // namespace pskh
