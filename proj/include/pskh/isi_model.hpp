// Discrete-time observation models seen by the sequence estimators, and a
// simulator producing noisy observations from a symbol sequence.
//
// Every model is a set of observation streams. Observation m of a stream is
//   y[m] = H * sum_terms term(x[m-d], x[m-d+1]) + noise
// where a single term is w[0] * x[m-d] and a pair term is
// sum_l w[l] * slerp(x[m-d], x[m-d+1], l/f).
#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "pskh/channel.hpp"
#include "pskh/constellation.hpp"
#include "pskh/core.hpp"
#include "pskh/pulse.hpp"
#include "pskh/slerp.hpp"
#include "pskh/wmf.hpp"

namespace pskh {

enum class MetricKind { IsiFree, Sinc2Wmf, T2Slerp, SiPhi };

inline std::string to_string(MetricKind k) {
    switch (k) {
        case MetricKind::IsiFree: return "isi_free";
        case MetricKind::Sinc2Wmf: return "sinc2_wmf";
        case MetricKind::T2Slerp: return "t2_slerp";
        case MetricKind::SiPhi: return "si_phi";
    }
    return "isi_free";
}

struct IsiTerm {
    int delay = 0;
    bool pair = false;
    std::vector<cplx> w;

    [[nodiscard]] double energy() const {
        double e = 0.0;
        for (const cplx v : w) e += std::norm(v);
        return e;
    }
};

struct IsiStream {
    std::vector<IsiTerm> terms;
};

struct BranchMetricModel {
    MetricKind kind = MetricKind::IsiFree;
    int fip = 1;
    std::vector<IsiStream> streams;
    int dfe_tail_taps = 0;
};

inline BranchMetricModel isi_free_model() {
    BranchMetricModel m;
    m.streams.push_back({{IsiTerm{0, false, {cplx(1.0, 0.0)}}}});
    return m;
}

/// h_W taps as single-symbol terms; by default every tap beyond the trellis is fed back.
inline BranchMetricModel wmf_model(const WhitenedImpulse& w) {
    BranchMetricModel m;
    m.kind = MetricKind::Sinc2Wmf;
    IsiStream s;
    for (int i = 0; i <= w.memory(); ++i) s.terms.push_back(IsiTerm{i, false, {w.h_w[static_cast<std::size_t>(i)]}});
    m.streams.push_back(std::move(s));
    m.dfe_tail_taps = w.memory();
    return m;
}

/// Two T-spaced streams: data samples and midpoint interpolants, both at half energy.
inline BranchMetricModel t2_model() {
    const double g = 1.0 / std::sqrt(2.0);
    BranchMetricModel m;
    m.kind = MetricKind::T2Slerp;
    m.fip = 2;
    m.streams.push_back({{IsiTerm{0, false, {cplx(g, 0.0)}}}});
    m.streams.push_back({{IsiTerm{0, true, {cplx(0.0, 0.0), cplx(g, 0.0)}}}});
    return m;
}

/// Matched-filter, T-sampled SI model: the pair starting at x[m-d] carries
/// gain * phi(d - l/f) for l = 0..f-1.
inline BranchMetricModel si_model(const AutocorrelationTable& phi, double gain, int tail = 2) {
    const int f = phi.fip();
    require(f >= 1, "si_model: f_IP must be >= 1");
    BranchMetricModel m;
    m.kind = MetricKind::SiPhi;
    m.fip = f;
    m.dfe_tail_taps = tail;
    const int reach = phi.max_offset() / phi.oversampling() + 2;
    IsiStream s;
    for (int d = -reach; d <= reach; ++d) {
        IsiTerm t{d, true, {}};
        for (int l = 0; l < f; ++l) t.w.push_back(cplx(gain * phi.at_fraction(d * f - l), 0.0));
        if (t.energy() > 1e-14) s.terms.push_back(std::move(t));
    }
    m.streams.push_back(std::move(s));
    return m;
}

// ---------------------------------------------------------------------------
// Slerp table and SI transmit energy
// ---------------------------------------------------------------------------

/// slerp(a_old, a_new, l/f) for all ordered pairs; l = 0 is a_old itself.
class SlerpTable {
  public:
    SlerpTable(const ConstellationSet& a, int f) : n_(a.n()), m_(a.size()), f_(f) {
        require(f >= 1, "SlerpTable: f must be >= 1");
        data_.resize(static_cast<std::size_t>(m_) * m_ * f_ * n_);
        for (int o = 0; o < m_; ++o)
            for (int nw = 0; nw < m_; ++nw)
                for (int l = 0; l < f_; ++l) {
                    ComplexVector v = l == 0 ? ComplexVector(a.points().col(o))
                                             : slerp(a.points().col(o), a.points().col(nw), static_cast<double>(l) / f_);
                    cplx* dst = slot(o, nw, l);
                    for (int r = 0; r < n_; ++r) dst[r] = v(r);
                }
    }

    [[nodiscard]] const cplx* at(int old, int nw, int l) const {
        return data_.data() + ((static_cast<std::size_t>(old) * m_ + nw) * f_ + l) * n_;
    }
    [[nodiscard]] int f() const { return f_; }
    [[nodiscard]] int n() const { return n_; }
    [[nodiscard]] int size() const { return m_; }

  private:
    cplx* slot(int old, int nw, int l) { return data_.data() + ((static_cast<std::size_t>(old) * m_ + nw) * f_ + l) * n_; }
    int n_, m_, f_;
    std::vector<cplx> data_;
};

/// Mean transmitted energy per symbol interval of an SI waveform with i.i.d.
/// uniform symbols (unit-energy pulse); equals Es for f = 1 and a sqrt-Nyquist pulse.
inline double si_energy_per_symbol(const ConstellationSet& a, const AutocorrelationTable& phi) {
    const int f = phi.fip(), m = a.size(), n = a.n();
    const SlerpTable st(a, f);
    auto dot = [n](const cplx* u, const cplx* v) {
        double s = 0.0;
        for (int r = 0; r < n; ++r) s += (std::conj(u[r]) * v[r]).real();
        return s;
    };
    // c0[l][l'] = E <v(a,b,l), v(a,b,l')>
    // head[l](b) = E_a v(a,b,l), tail[l](b) = E_c v(b,c,l), mean[l] = E v(a,b,l)
    std::vector<double> c0(static_cast<std::size_t>(f * f), 0.0);
    std::vector<ComplexVector> head(static_cast<std::size_t>(f * m), ComplexVector::Zero(n));
    std::vector<ComplexVector> tail(static_cast<std::size_t>(f * m), ComplexVector::Zero(n));
    std::vector<ComplexVector> mean(static_cast<std::size_t>(f), ComplexVector::Zero(n));
    for (int o = 0; o < m; ++o)
        for (int b = 0; b < m; ++b)
            for (int l = 0; l < f; ++l) {
                const cplx* v = st.at(o, b, l);
                const Eigen::Map<const ComplexVector> vv(v, n);
                head[static_cast<std::size_t>(l * m + b)] += vv / static_cast<double>(m);
                tail[static_cast<std::size_t>(l * m + o)] += vv / static_cast<double>(m);
                mean[static_cast<std::size_t>(l)] += vv / (static_cast<double>(m) * m);
                for (int l2 = 0; l2 < f; ++l2)
                    c0[static_cast<std::size_t>(l * f + l2)] += dot(v, st.at(o, b, l2)) / (static_cast<double>(m) * m);
            }
    double c1 = 0.0;
    std::vector<double> c1v(static_cast<std::size_t>(f * f), 0.0);
    for (int l = 0; l < f; ++l)
        for (int l2 = 0; l2 < f; ++l2) {
            c1 = 0.0;
            for (int b = 0; b < m; ++b)
                c1 += head[static_cast<std::size_t>(l * m + b)].dot(tail[static_cast<std::size_t>(l2 * m + b)]).real();
            c1v[static_cast<std::size_t>(l * f + l2)] = c1 / m;
        }
    const int reach = phi.max_offset() / phi.oversampling() + 2;
    double e = 0.0;
    for (int l = 0; l < f; ++l)
        for (int l2 = 0; l2 < f; ++l2)
            for (int dk = -reach; dk <= reach; ++dk) {
                const double w = phi.at_fraction(dk * f + l2 - l);
                if (w == 0.0) continue;
                double c = 0.0;
                if (dk == 0) c = c0[static_cast<std::size_t>(l * f + l2)];
                else if (dk == 1) c = c1v[static_cast<std::size_t>(l * f + l2)];
                else if (dk == -1) c = c1v[static_cast<std::size_t>(l2 * f + l)];
                else c = mean[static_cast<std::size_t>(l)].dot(mean[static_cast<std::size_t>(l2)]).real();
                e += w * c;
            }
    return e;
}

/// SI model scaled so the transmitted energy per symbol interval equals Es.
inline BranchMetricModel si_model_normalized(const ConstellationSet& a, const AutocorrelationTable& phi, int tail = 2) {
    const double e = si_energy_per_symbol(a, phi);
    return si_model(phi, std::sqrt(a.es() / e), tail);
}

// ---------------------------------------------------------------------------
// Observation simulator
// ---------------------------------------------------------------------------

/// Value of `t` for the symbol pair (old, nw) before the channel.
inline void term_value(const IsiTerm& t, const ConstellationSet& a, const SlerpTable* st, int old, int nw, cplx* out) {
    const int n = a.n();
    for (int r = 0; r < n; ++r) out[r] = cplx(0.0, 0.0);
    if (!t.pair) {
        for (int r = 0; r < n; ++r) out[r] = t.w[0] * a.points()(r, old);
        return;
    }
    for (std::size_t l = 0; l < t.w.size(); ++l) {
        if (t.w[l] == cplx(0.0, 0.0)) continue;
        const cplx* v = st->at(old, nw, static_cast<int>(l));
        for (int r = 0; r < n; ++r) out[r] += t.w[l] * v[r];
    }
}

inline int model_fip(const BranchMetricModel& model) {
    int f = 1;
    for (const auto& s : model.streams)
        for (const auto& t : s.terms)
            if (t.pair) f = std::max(f, static_cast<int>(t.w.size()));
    return f;
}

/// Observations y[m], m in [first, last), for the symbol sequence `idx`
/// (symbols outside the sequence equal `pad`).
inline ReceivedFrame simulate_observations(const BranchMetricModel& model, const ConstellationSet& a,
                                           const SlerpTable* st, const std::vector<int>& idx, int pad,
                                           const ChannelRealization& ch, int first, int last, Rng& rng) {
    const int n = a.n();
    const int len = last - first;
    require(len >= 0, "simulate_observations: empty range");
    auto sym = [&](long long j) {
        return (j < 0 || j >= static_cast<long long>(idx.size())) ? pad : idx[static_cast<std::size_t>(j)];
    };
    ReceivedFrame f;
    f.first_index = first;
    f.channel = ch;
    std::normal_distribution<double> g(0.0, std::sqrt(ch.sigma2 / 2.0));
    std::vector<cplx> tmp(static_cast<std::size_t>(n));
    for (const auto& s : model.streams) {
        ComplexMatrix clean = ComplexMatrix::Zero(n, len);
        for (int c = 0; c < len; ++c) {
            const long long mi = first + c;
            for (const auto& t : s.terms) {
                term_value(t, a, st, sym(mi - t.delay), sym(mi - t.delay + 1), tmp.data());
                for (int r = 0; r < n; ++r) clean(r, c) += tmp[static_cast<std::size_t>(r)];
            }
        }
        ComplexMatrix y = ch.H * clean;
        if (ch.sigma2 > 0.0)
            for (int c = 0; c < len; ++c)
                for (int r = 0; r < n; ++r) {
                    const double re = g(rng);
                    y(r, c) += cplx(re, g(rng));
                }
        f.streams.push_back(std::move(y));
    }
    return f;
}

}  // namespace pskh
