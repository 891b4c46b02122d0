// Transmit waveform synthesis: conventional PAM, T/2 signaling and SI signaling.
#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <vector>

#include "pskh/constellation.hpp"
#include "pskh/core.hpp"
#include "pskh/pulse.hpp"
#include "pskh/slerp.hpp"

namespace pskh {

/// n x (K*Q) samples; K counts symbol intervals including the pulse tails.
struct Waveform {
    ComplexMatrix samples;
    int oversampling_Q = 1;
    int symbols_K = 0;

    [[nodiscard]] int n() const { return static_cast<int>(samples.rows()); }
    [[nodiscard]] Eigen::Index length() const { return samples.cols(); }
};

/// Columns are the constellation points selected by `idx`.
inline ComplexMatrix symbols_from_indices(const ConstellationSet& a, const std::vector<int>& idx) {
    ComplexMatrix x(a.n(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) x.col(static_cast<Eigen::Index>(k)) = a.points().col(idx[k]);
    return x;
}

namespace detail {

// Superposition of `points` spaced `step` samples apart, each shaped by `taps`.
inline ComplexMatrix superpose(const ComplexMatrix& points, int step, const std::vector<double>& taps) {
    const Eigen::Index n = points.rows();
    const Eigen::Index np = points.cols();
    const Eigen::Index nt = static_cast<Eigen::Index>(taps.size());
    ComplexMatrix out = ComplexMatrix::Zero(n, np * step + nt - 1);
    cplx* o = out.data();
    const cplx* x = points.data();
    for (Eigen::Index p = 0; p < np; ++p) {
        const cplx* xp = x + p * n;
        cplx* base = o + p * step * n;
        for (Eigen::Index i = 0; i < nt; ++i) {
            const double h = taps[static_cast<std::size_t>(i)];
            if (h == 0.0) continue;
            cplx* col = base + i * n;
            for (Eigen::Index r = 0; r < n; ++r) col[r] += h * xp[r];
        }
    }
    return out;
}

}  // namespace detail

/// Output length (K + span) * Q.
inline Waveform synthesize_pam(const ComplexMatrix& symbols, const PulseShape& pulse) {
    require(symbols.cols() >= 1, "synthesize_pam: empty symbol sequence");
    Waveform w;
    w.oversampling_Q = pulse.oversampling_Q;
    w.samples = detail::superpose(symbols, pulse.oversampling_Q, pulse.taps);
    w.symbols_K = static_cast<int>(w.samples.cols() / w.oversampling_Q);
    return w;
}

/// `pulse` is sampled at Q' samples per T/2, so the waveform runs at Q = 2Q' per T.
/// Data and midpoint interpolants are both scaled by 1/sqrt(2).
inline Waveform synthesize_t2(const ComplexMatrix& symbols, const PulseShape& pulse) {
    require(symbols.cols() >= 1, "synthesize_t2: empty symbol sequence");
    require(pulse.span_symbols % 2 == 0, "synthesize_t2: pulse span (in T/2 units) must be even");
    const Eigen::Index k = symbols.cols();
    const double g = 1.0 / std::sqrt(2.0);
    ComplexMatrix pts(symbols.rows(), 2 * k);
    for (Eigen::Index j = 0; j < k; ++j) {
        const Eigen::Index nxt = std::min(j + 1, k - 1);
        pts.col(2 * j) = g * symbols.col(j);
        pts.col(2 * j + 1) = g * slerp(symbols.col(j), symbols.col(nxt), 0.5);
    }
    Waveform w;
    w.oversampling_Q = 2 * pulse.oversampling_Q;
    w.samples = detail::superpose(pts, pulse.oversampling_Q, pulse.taps);
    w.symbols_K = static_cast<int>(w.samples.cols() / w.oversampling_Q);
    return w;
}

/// f_IP points per symbol interval (the datum plus f_IP - 1 slerp interpolants) with the T-rate pulse.
inline Waveform synthesize_si(const ComplexMatrix& symbols, const PulseShape& pulse, int fip) {
    require(symbols.cols() >= 1, "synthesize_si: empty symbol sequence");
    require(fip >= 1 && pulse.oversampling_Q % fip == 0, "synthesize_si: Q must be divisible by f_IP");
    if (fip == 1) return synthesize_pam(symbols, pulse);
    const Eigen::Index k = symbols.cols();
    ComplexMatrix pts(symbols.rows(), fip * k);
    for (Eigen::Index j = 0; j < k; ++j) {
        const Eigen::Index nxt = std::min(j + 1, k - 1);
        pts.col(fip * j) = symbols.col(j);
        for (int l = 1; l < fip; ++l)
            pts.col(fip * j + l) = slerp(symbols.col(j), symbols.col(nxt), static_cast<double>(l) / fip);
    }
    Waveform w;
    w.oversampling_Q = pulse.oversampling_Q;
    w.samples = detail::superpose(pts, pulse.oversampling_Q / fip, pulse.taps);
    w.symbols_K = static_cast<int>(w.samples.cols() / w.oversampling_Q);
    return w;
}

// ---------------------------------------------------------------------------
// Binary dump: u32 n, K, Q (little endian), then per antenna K*Q (re, im) f64 pairs.
// ---------------------------------------------------------------------------

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    require(is.gcount() == 4, "waveform file: truncated header");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline void put_f64(std::ostream& os, double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(u >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

inline double get_f64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    require(is.gcount() == 8, "waveform file: truncated sample data");
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &u, 8);
    return v;
}

}  // namespace detail

inline void write_waveform(std::ostream& os, const Waveform& w) {
    require(w.length() == static_cast<Eigen::Index>(w.symbols_K) * w.oversampling_Q,
            "write_waveform: sample count must equal K*Q");
    detail::put_u32(os, static_cast<std::uint32_t>(w.n()));
    detail::put_u32(os, static_cast<std::uint32_t>(w.symbols_K));
    detail::put_u32(os, static_cast<std::uint32_t>(w.oversampling_Q));
    for (int r = 0; r < w.n(); ++r)
        for (Eigen::Index c = 0; c < w.length(); ++c) {
            detail::put_f64(os, w.samples(r, c).real());
            detail::put_f64(os, w.samples(r, c).imag());
        }
}

inline Waveform read_waveform(std::istream& is) {
    Waveform w;
    const auto n = detail::get_u32(is);
    w.symbols_K = static_cast<int>(detail::get_u32(is));
    w.oversampling_Q = static_cast<int>(detail::get_u32(is));
    require(n >= 1 && w.oversampling_Q >= 1, "waveform file: bad header");
    const Eigen::Index len = static_cast<Eigen::Index>(w.symbols_K) * w.oversampling_Q;
    w.samples.resize(n, len);
    for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(n); ++r)
        for (Eigen::Index c = 0; c < len; ++c) {
            const double re = detail::get_f64(is);
            w.samples(r, c) = cplx(re, detail::get_f64(is));
        }
    return w;
}

}  // namespace pskh
