// End-to-end link experiments: random waveforms for PASPR/spectrum work and
// the batch-deterministic Monte Carlo SER harness.
#pragma once

#include <cstdlib>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "pskh/channel.hpp"
#include "pskh/constellation.hpp"
#include "pskh/core.hpp"
#include "pskh/detectors.hpp"
#include "pskh/isi_model.hpp"
#include "pskh/pulse.hpp"
#include "pskh/waveform.hpp"
#include "pskh/wmf.hpp"

namespace pskh {

enum class Signaling { Pam, T2, Si };

inline std::string to_string(Signaling s) {
    switch (s) {
        case Signaling::Pam: return "pam";
        case Signaling::T2: return "t2";
        case Signaling::Si: return "si";
    }
    return "pam";
}

inline Signaling signaling_from_string(const std::string& s) {
    if (s == "pam") return Signaling::Pam;
    if (s == "t2") return Signaling::T2;
    if (s == "si") return Signaling::Si;
    throw DomainError("unknown signaling '" + s + "'");
}

struct WaveformSpec {
    Signaling signaling = Signaling::Pam;
    PulseKind pulse = PulseKind::Rrc;
    double beta = 0.25;
    int span = 16;  ///< in pulse periods (T/2 periods for T/2 signaling)
    int q = 16;     ///< samples per symbol period T
    int fip = 4;
};

/// The pulse used by the transmitter for `w` (built at Q/2 for T/2 signaling).
inline PulseShape transmit_pulse(const WaveformSpec& w) {
    if (w.signaling == Signaling::T2) {
        require(w.q % 2 == 0, "T/2 signaling needs an even Q");
        return make_pulse(w.pulse, w.beta, w.span, w.q / 2);
    }
    return make_pulse(w.pulse, w.beta, w.span, w.q);
}

inline std::vector<int> random_indices(int m, long long count, Rng& rng) {
    std::uniform_int_distribution<int> u(0, m - 1);
    std::vector<int> idx(static_cast<std::size_t>(count));
    for (auto& v : idx) v = u(rng);
    return idx;
}

inline Waveform synthesize(const ComplexMatrix& x, const WaveformSpec& w) {
    const auto p = transmit_pulse(w);
    switch (w.signaling) {
        case Signaling::Pam: return synthesize_pam(x, p);
        case Signaling::T2: return synthesize_t2(x, p);
        case Signaling::Si: return synthesize_si(x, p, w.fip);
    }
    return synthesize_pam(x, p);
}

inline Waveform random_waveform(const ConstellationSet& a, const WaveformSpec& w, long long symbols, RngSeed seed) {
    Rng rng(seed);
    return synthesize(symbols_from_indices(a, random_indices(a.size(), symbols, rng)), w);
}

/// Default edge discard for PASPR: one pulse span (in symbol periods).
inline int pulse_span_symbols(const WaveformSpec& w) {
    return w.signaling == Signaling::T2 ? (w.span + 1) / 2 : w.span;
}

// ---------------------------------------------------------------------------
// SER harness
// ---------------------------------------------------------------------------

struct SerPoint {
    double ebn0_db = 0.0;
    double ser = 0.0;
    long long symbols = 0;
    long long errors = 0;
};

struct SerCurve {
    std::vector<SerPoint> points;
};

struct LinkConfig {
    WaveformSpec waveform;
    ChannelKind channel = ChannelKind::IdentityAwgn;
    TrellisDecodeConfig decoder{Estimator::Symbolwise};
    std::vector<double> ebn0_db;
    long long min_errors = 200;
    long long max_symbols = 1000000;
    int frame_symbols = 1000;
    int batch_frames = 16;
    int si_tail = 2;
    int workers = 0;  ///< 0 -> default_workers()
};

/// PSKH_WORKERS if set, else the hardware concurrency.
inline int default_workers() {
    if (const char* env = std::getenv("PSKH_WORKERS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

/// Observation model the receiver works with for this link.
inline BranchMetricModel link_model(const ConstellationSet& a, const LinkConfig& c) {
    const auto& w = c.waveform;
    switch (w.signaling) {
        case Signaling::T2: return t2_model();
        case Signaling::Si:
            return si_model_normalized(a, autocorr_table(make_pulse(w.pulse, w.beta, w.span, w.q), w.fip), c.si_tail);
        case Signaling::Pam:
            if (w.pulse == PulseKind::Sinc2) return wmf_model(build_wmf_sinc2(w.q, w.span));
            return isi_free_model();
    }
    return isi_free_model();
}

struct FrameOutcome {
    long long symbols = 0;
    long long errors = 0;
};

namespace detail {

inline int max_delay(const BranchMetricModel& m) {
    int r = 0;
    for (const auto& s : m.streams)
        for (const auto& t : s.terms) r = std::max(r, std::abs(t.delay) + 1);
    return r;
}

inline int trellis_memory(const TrellisDecodeConfig& c) {
    return c.estimator == Estimator::IterVa ? std::max(1, c.nu_max) : c.nu;
}

}  // namespace detail

/// One frame: fresh symbols (and channel, for fading), known symbol 0 before
/// and after the data.
inline FrameOutcome simulate_frame(const ConstellationSet& a, const LinkConfig& c, const BranchMetricModel& model,
                                   const SlerpTable* st, double sigma2, Rng rng) {
    const int n = a.n(), k = c.frame_symbols;
    const auto idx = random_indices(a.size(), k, rng);
    ChannelRealization ch = c.channel == ChannelKind::RayleighIid ? draw_rayleigh(n, rng, sigma2) : identity_channel(n, sigma2);
    FrameOutcome out;
    out.symbols = k;
    const bool plain = model.kind == MetricKind::IsiFree &&
                       (c.decoder.estimator == Estimator::Symbolwise ||
                        (c.decoder.estimator != Estimator::IterVa && c.decoder.nu == 0));
    if (plain) {
        const auto y = apply_channel(symbols_from_indices(a, idx), ch, rng);
        const auto d = detect_symbolwise(y, a);
        for (int i = 0; i < k; ++i) out.errors += d[static_cast<std::size_t>(i)] != idx[static_cast<std::size_t>(i)];
        return out;
    }
    const int tail = c.decoder.tail >= 0 ? c.decoder.tail : model.dfe_tail_taps;
    const int post = detail::trellis_memory(c.decoder) + tail + 2;
    const int reach = detail::max_delay(model) + 1;
    FrameLayout lay;
    lay.steps = k + post;
    lay.prehistory = 0;
    lay.known.assign(static_cast<std::size_t>(lay.steps), -1);
    for (int i = k; i < lay.steps; ++i) lay.known[static_cast<std::size_t>(i)] = 0;
    const auto y = simulate_observations(model, a, st, idx, 0, ch, -reach, lay.steps + reach, rng);
    auto cfg = c.decoder;
    if (cfg.estimator == Estimator::Symbolwise) cfg.estimator = Estimator::Va;
    const auto res = decode_full(y, a, model, cfg, lay, st);
    for (int i = 0; i < k; ++i) out.errors += res.decisions[static_cast<std::size_t>(i)] != idx[static_cast<std::size_t>(i)];
    return out;
}

/// Runs fixed-size batches of frames until min_errors or max_symbols is
/// reached. Frame f of grid point p always uses stream derive(p).derive(f),
/// so the result does not depend on the worker count.
inline SerCurve run_ser(const ConstellationSet& a, const LinkConfig& c, RngSeed seed,
                        const std::function<void(const SerPoint&)>& progress = {}) {
    require(c.frame_symbols >= 1 && c.batch_frames >= 1, "run_ser: bad frame configuration");
    require(c.min_errors >= 1 && c.max_symbols >= 1, "run_ser: bad stopping rule");
    validate(c.decoder);
    const auto model = link_model(a, c);
    std::unique_ptr<SlerpTable> st;
    if (model_fip(model) > 1) st = std::make_unique<SlerpTable>(a, model_fip(model));
    const int workers = c.workers > 0 ? c.workers : default_workers();
    const Rng master(seed);

    SerCurve curve;
    for (std::size_t p = 0; p < c.ebn0_db.size(); ++p) {
        const double sigma2 = sigma2_for_ebn0(c.ebn0_db[p], a.es(), a.rate(), a.n(), c.channel);
        const Rng point_rng = master.derive(p);
        SerPoint pt;
        pt.ebn0_db = c.ebn0_db[p];
        long long frame = 0;
        while (pt.errors < c.min_errors && pt.symbols < c.max_symbols) {
            std::vector<FrameOutcome> outs(static_cast<std::size_t>(c.batch_frames));
            std::exception_ptr failure;
            std::mutex fail_mu;
            auto work = [&](int w) {
                for (int f = w; f < c.batch_frames; f += workers) {
                    try {
                        outs[static_cast<std::size_t>(f)] =
                            simulate_frame(a, c, model, st.get(), sigma2, point_rng.derive(static_cast<std::uint64_t>(frame + f)));
                    } catch (...) {
                        std::lock_guard<std::mutex> lk(fail_mu);
                        if (!failure) failure = std::current_exception();
                    }
                }
            };
            if (workers == 1) {
                work(0);
            } else {
                std::vector<std::thread> pool;
                for (int w = 0; w < std::min(workers, c.batch_frames); ++w) pool.emplace_back(work, w);
                for (auto& t : pool) t.join();
            }
            if (failure) std::rethrow_exception(failure);
            for (const auto& o : outs) {
                pt.symbols += o.symbols;
                pt.errors += o.errors;
            }
            frame += c.batch_frames;
        }
        pt.ser = static_cast<double>(pt.errors) / static_cast<double>(pt.symbols);
        if (progress) progress(pt);
        curve.points.push_back(pt);
    }
    return curve;
}

}  // namespace pskh
