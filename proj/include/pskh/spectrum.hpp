// PASPR and Welch power spectral density with fractional-energy bandwidths.
#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "pskh/core.hpp"
#include "pskh/waveform.hpp"

namespace pskh {

/// Peak over mean of the instantaneous sum power, in dB, ignoring
/// `discard_edge_symbols` symbol intervals at each end.
inline double paspr_db(const Waveform& w, int discard_edge_symbols) {
    require(discard_edge_symbols >= 0, "paspr: negative edge discard");
    const Eigen::Index edge = static_cast<Eigen::Index>(discard_edge_symbols) * w.oversampling_Q;
    require(w.length() > 2 * edge, "paspr: waveform shorter than the discarded edges");
    double peak = 0.0, sum = 0.0;
    for (Eigen::Index c = edge; c < w.length() - edge; ++c) {
        const double p = w.samples.col(c).squaredNorm();
        peak = std::max(peak, p);
        sum += p;
    }
    require(sum > 0.0, "paspr: zero-energy waveform");
    return linear_to_db(peak / (sum / static_cast<double>(w.length() - 2 * edge)));
}

inline double ebmax_n0(double ebn0_db, double paspr) { return ebn0_db + paspr; }

struct SpectrumEstimate {
    std::vector<double> freqs;  ///< cycles per symbol period, ascending
    std::vector<double> psd;    ///< sums to 1
    std::map<double, double> bandwidth;  ///< fraction x -> B_x
};

/// Relative level (to the PSD peak) below which bins do not count towards B_1.0.
inline constexpr double kFullBandFloor = 1e-4;

/// Smallest symmetric band around the power centroid holding fraction x of
/// the power; each bin counts its full width. x = 1 counts the bins within
/// kFullBandFloor of the peak (and is never narrower than the other fractions).
inline std::map<double, double> fractional_bandwidths(const std::vector<double>& freqs, const std::vector<double>& psd,
                                                      const std::vector<double>& fractions) {
    require(freqs.size() == psd.size() && freqs.size() >= 2, "bandwidth: bad spectrum");
    const double df = freqs[1] - freqs[0];
    double fc = 0.0;
    for (std::size_t i = 0; i < psd.size(); ++i) fc += freqs[i] * psd[i];
    std::vector<std::size_t> order(psd.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return std::abs(freqs[a] - fc) < std::abs(freqs[b] - fc); });
    std::map<double, double> out;
    double widest = 0.0;
    std::vector<double> sorted = fractions;
    std::sort(sorted.begin(), sorted.end());
    for (double x : sorted) {
        if (x >= 1.0) continue;
        double acc = 0.0, d = 0.0;
        for (std::size_t i : order) {
            acc += psd[i];
            d = std::abs(freqs[i] - fc);
            if (acc >= x) break;
        }
        out[x] = 2.0 * d + df;
        widest = std::max(widest, out[x]);
    }
    if (std::find_if(sorted.begin(), sorted.end(), [](double x) { return x >= 1.0; }) != sorted.end()) {
        const double peak = *std::max_element(psd.begin(), psd.end());
        double d = 0.0;
        for (std::size_t i = 0; i < psd.size(); ++i)
            if (psd[i] >= kFullBandFloor * peak) d = std::max(d, std::abs(freqs[i] - fc));
        out[1.0] = std::max(2.0 * d + df, widest);
    }
    return out;
}

inline const std::vector<double>& default_fractions() {
    static const std::vector<double> f{0.99, 0.999, 0.9999, 1.0};
    return f;
}

/// Welch estimate: Hann window, 50% overlap, per-antenna periodograms summed.
inline SpectrumEstimate psd_estimate(const Waveform& w, int segment_symbols,
                                     const std::vector<double>& fractions = default_fractions()) {
    require(segment_symbols >= 1, "psd: segment length must be positive");
    const Eigen::Index seg = static_cast<Eigen::Index>(segment_symbols) * w.oversampling_Q;
    const Eigen::Index hop = seg / 2;
    require(hop >= 1 && w.length() >= seg + 7 * hop, "psd: waveform shorter than 8 segments");
    const Eigen::Index nseg = (w.length() - seg) / hop + 1;

    std::vector<double> win(static_cast<std::size_t>(seg));
    for (Eigen::Index i = 0; i < seg; ++i)
        win[static_cast<std::size_t>(i)] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(seg));

    Eigen::FFT<double> fft;
    std::vector<cplx> in(static_cast<std::size_t>(seg)), out;
    std::vector<double> acc(static_cast<std::size_t>(seg), 0.0);
    for (Eigen::Index s = 0; s < nseg; ++s)
        for (Eigen::Index r = 0; r < w.n(); ++r) {
            for (Eigen::Index i = 0; i < seg; ++i)
                in[static_cast<std::size_t>(i)] = w.samples(r, s * hop + i) * win[static_cast<std::size_t>(i)];
            fft.fwd(out, in);
            for (Eigen::Index i = 0; i < seg; ++i) acc[static_cast<std::size_t>(i)] += std::norm(out[static_cast<std::size_t>(i)]);
        }
    const double total = std::accumulate(acc.begin(), acc.end(), 0.0);
    require(total > 0.0, "psd: zero-energy waveform");

    SpectrumEstimate est;
    est.freqs.resize(static_cast<std::size_t>(seg));
    est.psd.resize(static_cast<std::size_t>(seg));
    const Eigen::Index half = seg / 2;
    for (Eigen::Index j = 0; j < seg; ++j) {
        const Eigen::Index src = (j + half) % seg;  // fftshift
        const Eigen::Index signed_bin = src >= seg - half ? src - seg : src;
        est.freqs[static_cast<std::size_t>(j)] =
            static_cast<double>(signed_bin) * w.oversampling_Q / static_cast<double>(seg);
        est.psd[static_cast<std::size_t>(j)] = acc[static_cast<std::size_t>(src)] / total;
    }
    est.bandwidth = fractional_bandwidths(est.freqs, est.psd, fractions);
    return est;
}

}  // namespace pskh
