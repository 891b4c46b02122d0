// Flat MIMO channel: Rayleigh draws, noise injection and the singular-value distortion ratio.
#pragma once

#include <limits>
#include <random>
#include <vector>

#include <Eigen/SVD>

#include "pskh/core.hpp"

namespace pskh {

struct ChannelRealization {
    ComplexMatrix H;
    double sigma2 = 0.0;
    ChannelKind kind = ChannelKind::IdentityAwgn;

    [[nodiscard]] int n() const { return static_cast<int>(H.rows()); }
};

/// One or more T-spaced observation streams; column j of every stream is index first_index + j.
struct ReceivedFrame {
    std::vector<ComplexMatrix> streams;
    int first_index = 0;
    ChannelRealization channel;

    [[nodiscard]] const ComplexMatrix& samples() const { return streams.front(); }
};

inline ChannelRealization identity_channel(int n, double sigma2) {
    require(n >= 1 && sigma2 >= 0.0, "identity_channel: bad parameters");
    return {ComplexMatrix::Identity(n, n), sigma2, ChannelKind::IdentityAwgn};
}

/// CN(0, sigma2) vector of length n.
inline ComplexVector complex_gaussian(int n, double sigma2, Rng& rng) {
    std::normal_distribution<double> g(0.0, std::sqrt(sigma2 / 2.0));
    ComplexVector v(n);
    for (int i = 0; i < n; ++i) {
        const double re = g(rng);
        v(i) = cplx(re, g(rng));
    }
    return v;
}

inline ChannelRealization draw_rayleigh(int n, Rng& rng, double sigma2 = 0.0) {
    require(n >= 1, "draw_rayleigh: n must be >= 1");
    ChannelRealization ch;
    ch.kind = ChannelKind::RayleighIid;
    ch.sigma2 = sigma2;
    ch.H.resize(n, n);
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r) {
            const double re = g(rng);
            ch.H(r, c) = cplx(re, g(rng));
        }
    return ch;
}

inline ChannelRealization draw_rayleigh(int n, RngSeed seed, double sigma2 = 0.0) {
    Rng rng(seed);
    return draw_rayleigh(n, rng, sigma2);
}

/// y[k] = H x[k] + n[k] over the columns of x.
inline ReceivedFrame apply_channel(const ComplexMatrix& x, const ChannelRealization& ch, Rng& rng) {
    require(ch.H.rows() == ch.H.cols() && ch.H.cols() == x.rows(), "apply_channel: dimension mismatch");
    ReceivedFrame f;
    f.channel = ch;
    ComplexMatrix y = ch.H * x;
    if (ch.sigma2 > 0.0) {
        std::normal_distribution<double> g(0.0, std::sqrt(ch.sigma2 / 2.0));
        for (Eigen::Index c = 0; c < y.cols(); ++c)
            for (Eigen::Index r = 0; r < y.rows(); ++r) {
                const double re = g(rng);
                y(r, c) += cplx(re, g(rng));
            }
    }
    f.streams.push_back(std::move(y));
    return f;
}

inline ReceivedFrame apply_channel(const ComplexMatrix& x, const ChannelRealization& ch, RngSeed seed) {
    Rng rng(seed);
    return apply_channel(x, ch, rng);
}

/// [[Re H, -Im H], [Im H, Re H]]
inline RealMatrix real_representation(const ComplexMatrix& h) {
    const auto n = h.rows(), m = h.cols();
    RealMatrix r(2 * n, 2 * m);
    r.topLeftCorner(n, m) = h.real();
    r.topRightCorner(n, m) = -h.imag();
    r.bottomLeftCorner(n, m) = h.imag();
    r.bottomRightCorner(n, m) = h.real();
    return r;
}

/// sigma_max / sigma_min of the real representation; +inf when H is singular.
inline double svd_distortion_ratio(const ChannelRealization& ch) {
    require(ch.H.size() > 0, "svd_distortion_ratio: empty channel");
    Eigen::JacobiSVD<RealMatrix> svd(real_representation(ch.H));
    const auto& s = svd.singularValues();
    const double smax = s(0), smin = s(s.size() - 1);
    if (smax == 0.0 || smin <= smax * 1e-14) return std::numeric_limits<double>::infinity();
    return smax / smin;
}

}  // namespace pskh
