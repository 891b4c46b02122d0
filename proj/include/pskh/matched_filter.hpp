// Receive matched filter followed by symbol-rate (or half-symbol-rate) sampling.
#pragma once

#include "pskh/channel.hpp"
#include "pskh/core.hpp"
#include "pskh/pulse.hpp"
#include "pskh/waveform.hpp"

namespace pskh {

enum class SampleRate { T, THalf };

/// z[k] = (1/Q_p) sum_i s[k*step + i] h[i], so a sqrt-Nyquist chain returns the
/// transmitted points. T_half expects a pulse built at Q/2 samples per period.
inline ReceivedFrame matched_filter_downsample(const Waveform& w, const PulseShape& p, SampleRate rate) {
    const int qp = p.oversampling_Q;
    if (rate == SampleRate::T) require(qp == w.oversampling_Q, "matched_filter: pulse Q differs from waveform Q");
    else require(2 * qp == w.oversampling_Q, "matched_filter: T/2 sampling needs a pulse at Q/2");
    const int step = qp;
    const Eigen::Index taps = p.length();
    const Eigen::Index len = w.length();
    const Eigen::Index count = len >= taps ? (len - taps) / step + 1 : 0;
    const Eigen::Index n = w.n();
    ComplexMatrix z = ComplexMatrix::Zero(n, count);
    for (Eigen::Index k = 0; k < count; ++k) {
        for (Eigen::Index i = 0; i < taps; ++i) {
            const double h = p.taps[static_cast<std::size_t>(i)];
            if (h == 0.0) continue;
            z.col(k) += h * w.samples.col(k * step + i);
        }
    }
    z /= static_cast<double>(qp);
    ReceivedFrame f;
    f.channel = identity_channel(static_cast<int>(n), 0.0);
    f.streams.push_back(std::move(z));
    return f;
}

}  // namespace pskh
