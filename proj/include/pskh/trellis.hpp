// Generic per-survivor trellis search over an IsiModel.
//
// The state at step k holds labels for x[k-1..k-nu]; an element is either a
// position in that step's candidate list or (from `hyper_from` on) a
// hypersymbol label. Survivors carry the actual symbols, so every term older
// than the newest symbol (inside the state or in the feedback tail) is
// evaluated from the survivor history.
#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "pskh/channel.hpp"
#include "pskh/constellation.hpp"
#include "pskh/core.hpp"
#include "pskh/isi_model.hpp"
#include "pskh/partition.hpp"

namespace pskh {

class InfeasibleTrellis : public std::runtime_error {
  public:
    explicit InfeasibleTrellis(long long required, long long cap)
        : std::runtime_error("trellis needs " + std::to_string(required) + " branches per step (cap " +
                             std::to_string(cap) + ")"),
          required_(required) {}
    [[nodiscard]] long long required() const { return required_; }

  private:
    long long required_;
};

struct TrellisSpec {
    int nu = 0;
    int tail = 0;
    int hyper_from = 0;  ///< 1-based first hypersymbol element; 0 = none
    const HypersymbolPartition* partition = nullptr;
    int traceback_depth = -1;  ///< -1 -> 5 (nu + 1); 0 -> decide at frame end only
    long long branch_cap = 1LL << 20;
};

struct DecodeResult {
    std::vector<int> decisions;
    double path_metric = 0.0;
    long long max_branches = 0;
};

/// Per-stream observation shift s: step k reads y[k + s]. Picks the shift whose
/// retained terms (newest lag >= 0, oldest lag <= nu) carry the most energy;
/// ties go to the larger shift.
inline int stream_shift(const IsiStream& s, int nu) {
    int lo = 0, hi = 0;
    for (const auto& t : s.terms) {
        lo = std::min(lo, t.delay - nu - 1);
        hi = std::max(hi, t.delay);
    }
    int best = hi;
    double be = -1.0;
    for (int sh = hi; sh >= lo; --sh) {
        double e = 0.0;
        for (const auto& t : s.terms) {
            const int oldest = t.delay - sh, newest = oldest - (t.pair ? 1 : 0);
            if (newest >= 0 && oldest <= nu) e += t.energy();
        }
        if (e > be + 1e-15) {
            be = e;
            best = sh;
        }
    }
    return best;
}

namespace detail {

struct StreamTables {
    int shift = 0;
    int n = 0;
    // newest-lag-0 terms combined, split re/im: l0_re[(prev * n + r) * M + a]
    std::vector<double> l0_re, l0_im;
    std::vector<double> l0_norm;  // [prev * M + a]
    // older terms: newest lag, pair flag, table indexed [(new * M + old) * n] or [sym * n]
    struct Old {
        int newest_lag;
        bool pair;
        std::vector<cplx> v;
    };
    std::vector<Old> old;
};

inline StreamTables build_stream_tables(const IsiStream& s, int nu, int depth, const ConstellationSet& a,
                                        const SlerpTable* st, const ComplexMatrix& h) {
    const int n = a.n(), m = a.size();
    StreamTables tb;
    tb.shift = stream_shift(s, nu);
    tb.n = n;
    std::vector<cplx> l0(static_cast<std::size_t>(m) * m * n, cplx(0.0, 0.0));
    std::vector<cplx> raw(static_cast<std::size_t>(n));
    ComplexVector tmp(n);
    for (const auto& t : s.terms) {
        const int oldest = t.delay - tb.shift, newest = oldest - (t.pair ? 1 : 0);
        if (newest < 0 || oldest > depth) continue;
        if (newest == 0) {
            for (int prev = 0; prev < m; ++prev)
                for (int cur = 0; cur < m; ++cur) {
                    if (t.pair) term_value(t, a, st, prev, cur, raw.data());
                    else term_value(t, a, st, cur, cur, raw.data());
                    for (int r = 0; r < n; ++r) tmp(r) = raw[static_cast<std::size_t>(r)];
                    const ComplexVector hv = h * tmp;
                    cplx* dst = l0.data() + (static_cast<std::size_t>(prev) * m + cur) * n;
                    for (int r = 0; r < n; ++r) dst[r] += hv(r);
                }
        } else {
            StreamTables::Old o{newest, t.pair, {}};
            const int rows = t.pair ? m * m : m;
            o.v.resize(static_cast<std::size_t>(rows) * n);
            for (int i = 0; i < rows; ++i) {
                const int nw = t.pair ? i / m : i, od = t.pair ? i % m : i;
                term_value(t, a, st, od, nw, raw.data());
                for (int r = 0; r < n; ++r) tmp(r) = raw[static_cast<std::size_t>(r)];
                const ComplexVector hv = h * tmp;
                for (int r = 0; r < n; ++r) o.v[static_cast<std::size_t>(i) * n + r] = hv(r);
            }
            tb.old.push_back(std::move(o));
        }
    }
    tb.l0_norm.assign(static_cast<std::size_t>(m) * m, 0.0);
    tb.l0_re.resize(l0.size());
    tb.l0_im.resize(l0.size());
    for (int prev = 0; prev < m; ++prev)
        for (int cur = 0; cur < m; ++cur)
            for (int r = 0; r < n; ++r) {
                const cplx v = l0[(static_cast<std::size_t>(prev) * m + cur) * n + r];
                const std::size_t soa = (static_cast<std::size_t>(prev) * n + r) * m + cur;
                tb.l0_re[soa] = v.real();
                tb.l0_im[soa] = v.imag();
                tb.l0_norm[static_cast<std::size_t>(prev) * m + cur] += std::norm(v);
            }
    return tb;
}

}  // namespace detail

/// Runs the trellis over steps k = 0..N-1 (N = candidates.size()); symbols
/// before step 0 equal `prehistory`. Candidate lists must be sorted ascending.
inline DecodeResult trellis_decode(const ReceivedFrame& y, const ConstellationSet& a, const BranchMetricModel& model,
                                   const std::vector<std::vector<int>>& candidates, int prehistory,
                                   const TrellisSpec& spec, const SlerpTable* st = nullptr) {
    const int m = a.size(), n = a.n();
    const int nu = spec.nu;
    const int steps = static_cast<int>(candidates.size());
    require(nu >= 0 && spec.tail >= 0, "trellis: nu and tail must be >= 0");
    require(y.streams.size() == model.streams.size(), "trellis: frame/model stream count mismatch");
    require(spec.hyper_from == 0 || (spec.partition && spec.hyper_from >= 2 && spec.hyper_from <= nu),
            "trellis: hypersymbol elements need a partition and must not include element 1");
    for (const auto& c : candidates) require(!c.empty(), "trellis: empty candidate list");

    const int depth = nu + spec.tail;
    const int hlen = std::max(1, depth);
    const int kpart = spec.partition ? spec.partition->count() : 0;

    std::unique_ptr<SlerpTable> own;
    if (!st && model_fip(model) > 1) {
        own = std::make_unique<SlerpTable>(a, model_fip(model));
        st = own.get();
    }
    std::vector<detail::StreamTables> tabs;
    for (const auto& s : model.streams) tabs.push_back(detail::build_stream_tables(s, nu, depth, a, st, y.channel.H));

    auto dom = [&](int k, int i) -> int {  // element i (1-based) at step k
        const int j = k - i;
        if (j < 0) return 1;
        if (spec.hyper_from && i >= spec.hyper_from) return kpart;
        return static_cast<int>(candidates[static_cast<std::size_t>(j)].size());
    };
    auto state_count = [&](int k) {
        long long c = 1;
        for (int i = 1; i <= nu; ++i) c *= dom(k, i);
        return c;
    };

    DecodeResult res;
    for (int k = 0; k < steps; ++k) {
        const long long b = state_count(k) * static_cast<long long>(candidates[static_cast<std::size_t>(k)].size());
        res.max_branches = std::max(res.max_branches, b);
    }
    if (res.max_branches > spec.branch_cap) throw InfeasibleTrellis(res.max_branches, spec.branch_cap);

    const int tb_depth = spec.traceback_depth < 0 ? 5 * (nu + 1) : spec.traceback_depth;
    const double inf = std::numeric_limits<double>::infinity();

    std::vector<double> pm{0.0}, npm;
    std::vector<int> hist(static_cast<std::size_t>(hlen), prehistory), nhist;
    // survivor pointers for the last `ring` steps
    const int ring = tb_depth > 0 ? std::min(steps, tb_depth + 1) : steps;
    std::vector<std::vector<std::int32_t>> prev_of(static_cast<std::size_t>(ring));
    std::vector<std::vector<std::int32_t>> sym_of(static_cast<std::size_t>(ring));
    auto slot = [&](int k) { return static_cast<std::size_t>(k % ring); };
    res.decisions.assign(static_cast<std::size_t>(steps), -1);
    int decided = 0;

    std::vector<int> e(static_cast<std::size_t>(nu + 1));
    std::vector<double> base_re, base_im, met;

    for (int k = 0; k < steps; ++k) {
        const auto& cand = candidates[static_cast<std::size_t>(k)];
        const int nc = static_cast<int>(cand.size());
        bool full = nc == m;
        for (int p = 0; full && p < nc; ++p) full = cand[static_cast<std::size_t>(p)] == p;
        const long long ns_count = state_count(k + 1);
        const long long s_count = static_cast<long long>(pm.size());
        npm.assign(static_cast<std::size_t>(ns_count), inf);
        nhist.assign(static_cast<std::size_t>(ns_count) * hlen, 0);
        auto& pv = prev_of[slot(k)];
        auto& sv = sym_of[slot(k)];
        pv.assign(static_cast<std::size_t>(ns_count), -1);
        sv.assign(static_cast<std::size_t>(ns_count), -1);
        met.resize(static_cast<std::size_t>(nc));

        // radix of the next state's elements 2..nu
        std::vector<long long> nstride(static_cast<std::size_t>(nu + 2), 1);
        for (int i = 2; i <= nu; ++i) nstride[static_cast<std::size_t>(i + 1)] = nstride[static_cast<std::size_t>(i)] * dom(k + 1, i);
        std::vector<int> cur_dom(static_cast<std::size_t>(nu + 1), 1);
        for (int i = 1; i <= nu; ++i) cur_dom[static_cast<std::size_t>(i)] = dom(k, i);

        // observations for this step
        std::vector<const cplx*> obs(tabs.size(), nullptr);
        for (std::size_t si = 0; si < tabs.size(); ++si) {
            const long long col = static_cast<long long>(k) + tabs[si].shift - y.first_index;
            const auto& mat = y.streams[si];
            if (col >= 0 && col < mat.cols()) obs[si] = mat.data() + col * n;
        }
        base_re.resize(static_cast<std::size_t>(n));
        base_im.resize(static_cast<std::size_t>(n));

        for (long long s = 0; s < s_count; ++s) {
            const double p0 = pm[static_cast<std::size_t>(s)];
            if (p0 == inf) continue;
            const int* hs = hist.data() + s * hlen;

            // next-state index without the newest element
            long long r_idx = 0;
            if (nu > 1) {
                long long rem = s;
                for (int i = 1; i <= nu; ++i) {
                    const int d = cur_dom[static_cast<std::size_t>(i)];
                    e[static_cast<std::size_t>(i)] = static_cast<int>(rem % d);
                    rem /= d;
                }
                for (int i = 1; i < nu; ++i) {
                    const int j = k - i;  // symbol position held by element i, moving to element i+1
                    int lab = e[static_cast<std::size_t>(i)];
                    if (j >= 0 && spec.hyper_from && i + 1 >= spec.hyper_from && i < spec.hyper_from)
                        lab = spec.partition->label[static_cast<std::size_t>(hs[i - 1])];
                    if (j < 0) lab = 0;
                    r_idx += lab * nstride[static_cast<std::size_t>(i + 1)];
                }
            }

            // per stream: base = y - older terms; metric = |base|^2 - 2 Re<base, l0> + |l0|^2
            const int prev_sym = hs[0];
            double bm_const = 0.0;
            std::fill(met.begin(), met.end(), 0.0);
            for (std::size_t si = 0; si < tabs.size(); ++si) {
                if (!obs[si]) continue;
                const auto& tb = tabs[si];
                for (int r = 0; r < n; ++r) {
                    cplx b = obs[si][r];
                    for (const auto& o : tb.old) {
                        const int nw = hs[o.newest_lag - 1];
                        const int row = o.pair ? nw * m + hs[o.newest_lag] : nw;
                        b -= o.v[static_cast<std::size_t>(row) * n + r];
                    }
                    base_re[static_cast<std::size_t>(r)] = b.real();
                    base_im[static_cast<std::size_t>(r)] = b.imag();
                    bm_const += std::norm(b);
                }
                const double* nrm = tb.l0_norm.data() + static_cast<std::size_t>(prev_sym) * m;
                if (full) {
                    double* __restrict mt = met.data();
                    for (int a_i = 0; a_i < m; ++a_i) mt[a_i] += nrm[a_i];
                    for (int r = 0; r < n; ++r) {
                        const double br = -2.0 * base_re[static_cast<std::size_t>(r)];
                        const double bi = -2.0 * base_im[static_cast<std::size_t>(r)];
                        const double* __restrict lr = tb.l0_re.data() + (static_cast<std::size_t>(prev_sym) * n + r) * m;
                        const double* __restrict li = tb.l0_im.data() + (static_cast<std::size_t>(prev_sym) * n + r) * m;
                        for (int a_i = 0; a_i < m; ++a_i) mt[a_i] += br * lr[a_i] + bi * li[a_i];
                    }
                } else {
                    for (int p = 0; p < nc; ++p) {
                        const int sym = cand[static_cast<std::size_t>(p)];
                        double v = nrm[sym];
                        for (int r = 0; r < n; ++r) {
                            const std::size_t off = (static_cast<std::size_t>(prev_sym) * n + r) * m + sym;
                            v -= 2.0 * (base_re[static_cast<std::size_t>(r)] * tb.l0_re[off] +
                                        base_im[static_cast<std::size_t>(r)] * tb.l0_im[off]);
                        }
                        met[static_cast<std::size_t>(p)] += v;
                    }
                }
            }

            const double pb = p0 + bm_const;
            if (nu == 0) {
                for (int p = 0; p < nc; ++p) {
                    const double c = pb + met[static_cast<std::size_t>(p)];
                    if (c < npm[0]) {
                        npm[0] = c;
                        pv[0] = static_cast<std::int32_t>(s);
                        sv[0] = cand[static_cast<std::size_t>(p)];
                    }
                }
            } else {
                const std::size_t off = static_cast<std::size_t>(nc * r_idx);
                double* np_ = npm.data() + off;
                std::int32_t* pvp = pv.data() + off;
                for (int p = 0; p < nc; ++p) {
                    const double c = pb + met[static_cast<std::size_t>(p)];
                    if (c < np_[p]) {
                        np_[p] = c;
                        pvp[p] = static_cast<std::int32_t>(s);
                    }
                }
            }
        }
        if (nu > 0)
            for (long long ns = 0; ns < ns_count; ++ns)
                if (pv[static_cast<std::size_t>(ns)] >= 0) sv[static_cast<std::size_t>(ns)] = cand[static_cast<std::size_t>(ns % nc)];
        // survivor histories
        for (long long ns = 0; ns < ns_count; ++ns) {
            const int ps = pv[static_cast<std::size_t>(ns)];
            if (ps < 0) continue;
            int* dst = nhist.data() + ns * hlen;
            const int* src = hist.data() + static_cast<long long>(ps) * hlen;
            dst[0] = sv[static_cast<std::size_t>(ns)];
            for (int i = 1; i < hlen; ++i) dst[i] = src[i - 1];
        }
        pm.swap(npm);
        hist.swap(nhist);

        if (tb_depth > 0 && k - tb_depth >= decided) {
            // walk back from the best state and commit step k - tb_depth
            int st_i = static_cast<int>(std::min_element(pm.begin(), pm.end()) - pm.begin());
            for (int kk = k; kk > k - tb_depth; --kk) st_i = prev_of[slot(kk)][static_cast<std::size_t>(st_i)];
            res.decisions[static_cast<std::size_t>(k - tb_depth)] = sym_of[slot(k - tb_depth)][static_cast<std::size_t>(st_i)];
            decided = k - tb_depth + 1;
        }
    }
    if (steps > 0) {
        int st_i = static_cast<int>(std::min_element(pm.begin(), pm.end()) - pm.begin());
        res.path_metric = pm[static_cast<std::size_t>(st_i)];
        for (int k = steps - 1; k >= decided; --k) {
            res.decisions[static_cast<std::size_t>(k)] = sym_of[slot(k)][static_cast<std::size_t>(st_i)];
            st_i = prev_of[slot(k)][static_cast<std::size_t>(st_i)];
        }
    }
    return res;
}

}  // namespace pskh
