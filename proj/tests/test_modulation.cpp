#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

using namespace pskh;

namespace {

double tap_energy(const PulseShape& p) {
    double e = 0.0;
    for (double v : p.taps) e += v * v;
    return e / p.oversampling_Q;
}

ComplexMatrix random_symbols(const ConstellationSet& a, int k, std::uint64_t seed) {
    Rng rng(RngSeed{seed});
    return symbols_from_indices(a, random_indices(a.size(), k, rng));
}

// s[i] = sum_j p_j h[i - j step], evaluated one output sample at a time
ComplexMatrix direct_convolution(const ComplexMatrix& pts, int step, const std::vector<double>& h) {
    const Eigen::Index len = pts.cols() * step + static_cast<Eigen::Index>(h.size()) - 1;
    ComplexMatrix out = ComplexMatrix::Zero(pts.rows(), len);
    for (Eigen::Index i = 0; i < len; ++i)
        for (Eigen::Index j = 0; j < pts.cols(); ++j) {
            const Eigen::Index t = i - j * step;
            if (t >= 0 && t < static_cast<Eigen::Index>(h.size())) out.col(i) += h[static_cast<std::size_t>(t)] * pts.col(j);
        }
    return out;
}

}  // namespace

TEST(Pulse, UnitEnergyAllKinds) {
    for (auto kind : {PulseKind::Rrc, PulseKind::Sinc2, PulseKind::Rect})
        for (int q : {4, 8, 16}) {
            const auto p = make_pulse(kind, 0.25, 16, q);
            EXPECT_NEAR(tap_energy(p), 1.0, 1e-12) << to_string(kind) << " Q=" << q;
            EXPECT_EQ(p.length(), 16 * q + 1);
        }
}

TEST(Pulse, Sinc2ZerosAtIntegerOffsets) {
    const auto p = make_pulse(PulseKind::Sinc2, 0.0, 16, 16);
    for (int k = -8; k <= 8; ++k) {
        if (k == 0) continue;
        EXPECT_EQ(p.taps[static_cast<std::size_t>(p.center() + k * 16)], 0.0);
    }
    EXPECT_GT(p.taps[static_cast<std::size_t>(p.center())], 0.0);
}

TEST(Pulse, RrcEvenAndFiniteAtSingularity) {
    // beta = 0.25 puts t = 1/(4 beta) = 1 on the grid
    const auto p = make_pulse(PulseKind::Rrc, 0.25, 16, 16);
    for (int i = 0; i < p.length(); ++i) {
        EXPECT_TRUE(std::isfinite(p.taps[static_cast<std::size_t>(i)]));
        EXPECT_EQ(p.taps[static_cast<std::size_t>(i)], p.taps[static_cast<std::size_t>(p.length() - 1 - i)]);
    }
    const double limit = rrc_value(1.0, 0.25);
    EXPECT_NEAR(limit, 0.5 * (rrc_value(1.0 - 1e-6, 0.25) + rrc_value(1.0 + 1e-6, 0.25)), 1e-6);
    EXPECT_NEAR(rrc_value(0.0, 0.25), 1.0 - 0.25 + 4.0 * 0.25 / kPi, 1e-15);
}

TEST(Pulse, RejectsBadParameters) {
    EXPECT_THROW(make_pulse(PulseKind::Rrc, 0.25, 16, 2), DomainError);
    EXPECT_THROW(make_pulse(PulseKind::Rrc, 1.5, 16, 16), DomainError);
    EXPECT_THROW(make_pulse(PulseKind::Rrc, -0.1, 16, 16), DomainError);
    EXPECT_THROW(make_pulse(PulseKind::Sinc2, 0.0, 4, 16), DomainError);
    EXPECT_THROW(make_pulse(PulseKind::Rect, 0.0, 1, 5), DomainError);
    EXPECT_THROW(pulse_kind_from_string("gauss"), DomainError);
}

TEST(Autocorr, UnitPeakEvenAndNyquist) {
    const auto p = make_pulse(PulseKind::Rrc, 0.25, 16, 16);
    const auto phi = autocorr_table(p, 4);
    EXPECT_NEAR(phi.at(0), 1.0, 1e-12);
    for (int k = 1; k < 100; ++k) EXPECT_EQ(phi.at(k), phi.at(-k));
    for (int k = 1; k <= 8; ++k) EXPECT_LT(std::abs(phi.at(16 * k)), 1e-3) << k;
    EXPECT_DOUBLE_EQ(phi.at_fraction(3), phi.at(12));
    EXPECT_EQ(phi.at(phi.max_offset() + 1), 0.0);
    EXPECT_THROW(autocorr_table(p, 3), DomainError);
}

TEST(Slerp, ExamplesAndEndpoints) {
    Rng rng(RngSeed{1});
    const auto x = test::random_unit(3, rng), y = test::random_unit(3, rng);
    EXPECT_EQ(slerp(x, y, 0.0), x);
    EXPECT_EQ(slerp(x, y, 1.0), y);
    ComplexVector e1 = ComplexVector::Zero(2), e2 = ComplexVector::Zero(2);
    e1(0) = 1.0;
    e2(1) = 1.0;
    EXPECT_TRUE(slerp(e1, e2, 0.5).isApprox((e1 + e2) / std::sqrt(2.0), 1e-15));
    const auto mid = slerp(x, y, 0.5);
    EXPECT_NEAR((mid - x).norm(), (mid - y).norm(), 1e-12);
    EXPECT_NEAR(mid.norm(), 1.0, 1e-12);
}

TEST(Slerp, DegenerateCases) {
    Rng rng(RngSeed{2});
    const auto x = test::random_unit(2, rng);
    EXPECT_TRUE(slerp(x, x, 0.3).isApprox(x, 1e-15));
    EXPECT_THROW(slerp(x, ComplexVector(-x), 0.5), AntipodalPoints);
    // a complex phase flip is antipodal in the real geometry as well
    EXPECT_THROW(slerp(x, ComplexVector(x * cplx(-1.0, 0.0)), 0.5), AntipodalPoints);
    EXPECT_THROW(slerp(x, ComplexVector(2.0 * x), 0.5), DomainError);
}

TEST(Slerp, NormAndGeodesicProperties) {
    Rng rng(RngSeed{3});
    std::uniform_real_distribution<double> u(0.0, 1.0), rad(0.1, 10.0);
    for (int i = 0; i < 10000; ++i) {
        const int n = 1 + i % 4;
        const double r = rad(rng);
        const ComplexVector x = r * test::random_unit(n, rng), y = r * test::random_unit(n, rng);
        const double tau = u(rng);
        const double theta = real_angle(x, y);
        if (kPi - theta < 1e-3) continue;
        const auto s = slerp(x, y, tau);
        ASSERT_NEAR(s.norm(), r, 1e-9 * r);
        ASSERT_NEAR(real_angle(x, s), tau * theta, 1e-9);
    }
}

TEST(Synthesis, PamMatchesDirectConvolution) {
    const auto a = gen_papsk(2, 16);
    const auto x = random_symbols(a, 12, 1);
    for (auto kind : {PulseKind::Rrc, PulseKind::Sinc2}) {
        const auto p = make_pulse(kind, 0.25, 8, 8);
        const auto w = synthesize_pam(x, p);
        EXPECT_EQ(w.length(), (12 + 8) * 8);
        EXPECT_EQ(w.symbols_K, 20);
        EXPECT_TRUE(w.samples.isApprox(direct_convolution(x, 8, p.taps), 1e-14));
    }
}

TEST(Synthesis, ConstantSequenceFollowsAutocorrSum) {
    const auto a = gen_papsk(1, 4);
    const ComplexMatrix x = a.point(1).replicate(1, 40);
    const auto p = make_pulse(PulseKind::Rrc, 0.25, 16, 16);
    const auto w = synthesize_pam(x, p);
    // mid-sequence, a symbol instant sees sum_k h(kT) of the pulse
    double hsum = 0.0;
    for (int k = -8; k <= 8; ++k) hsum += p.taps[static_cast<std::size_t>(p.center() + 16 * k)];
    const Eigen::Index at = 20 * 16 + p.center();
    EXPECT_TRUE(w.samples.col(at).isApprox(hsum * a.point(1), 1e-12));
}

TEST(Synthesis, RectSingleSymbolConstantNorm) {
    const auto a = gen_papsk(3, 64);
    const auto p = make_pulse(PulseKind::Rect, 0.0, 2, 15);
    const auto w = synthesize_pam(a.point(5), p);
    int nonzero = 0;
    for (Eigen::Index c = 0; c < w.length(); ++c) {
        const double e = w.samples.col(c).squaredNorm();
        if (e == 0.0) continue;
        ++nonzero;
        EXPECT_NEAR(e, 1.0, 1e-12);
    }
    EXPECT_EQ(nonzero, 15);
}

TEST(Synthesis, SiUnitInterpolationIsPamBitExact) {
    const auto a = gen_pm(3, 64, 1.0, PmOptions{2.0, 200}, RngSeed{1});
    const auto x = random_symbols(a, 200, 2);
    const auto p = make_pulse(PulseKind::Rrc, 0.25, 16, 16);
    const auto s = synthesize_si(x, p, 1), q = synthesize_pam(x, p);
    ASSERT_EQ(s.samples.cols(), q.samples.cols());
    EXPECT_EQ(std::memcmp(s.samples.data(), q.samples.data(), sizeof(cplx) * static_cast<std::size_t>(q.samples.size())), 0);
}

TEST(Synthesis, SiMatchesSlerpOracle) {
    const auto a = gen_pm(2, 16, 1.0, PmOptions{2.0, 200}, RngSeed{1});
    const auto x = random_symbols(a, 10, 3);
    const auto p = make_pulse(PulseKind::Rrc, 0.25, 8, 16);
    for (int f : {2, 4, 8}) {
        ComplexMatrix pts(2, 10 * f);
        for (int j = 0; j < 10; ++j)
            for (int l = 0; l < f; ++l) {
                const ComplexVector nxt = x.col(std::min(j + 1, 9));
                pts.col(j * f + l) = slerp(x.col(j), nxt, static_cast<double>(l) / f);
            }
        EXPECT_TRUE(synthesize_si(x, p, f).samples.isApprox(direct_convolution(pts, 16 / f, p.taps), 1e-13)) << f;
    }
}

TEST(Synthesis, ConstantSequenceSiIsDenseConstantPam) {
    const auto a = gen_papsk(2, 16);
    const ComplexMatrix x = a.point(3).replicate(1, 6);
    const auto p = make_pulse(PulseKind::Rrc, 0.25, 8, 16);
    const ComplexMatrix dense = a.point(3).replicate(1, 24);
    EXPECT_TRUE(synthesize_si(x, p, 4).samples.isApprox(direct_convolution(dense, 4, p.taps), 1e-13));
}

TEST(Synthesis, T2ConstantSequenceIsDoubleRatePam) {
    const auto a = gen_papsk(2, 16);
    const ComplexMatrix x = a.point(7).replicate(1, 5);
    const auto p = make_pulse(PulseKind::Rrc, 0.25, 16, 8);
    const auto w = synthesize_t2(x, p);
    EXPECT_EQ(w.oversampling_Q, 16);
    const ComplexMatrix dense = a.point(7).replicate(1, 10) / std::sqrt(2.0);
    EXPECT_TRUE(w.samples.isApprox(direct_convolution(dense, 8, p.taps), 1e-13));
    EXPECT_THROW(synthesize_t2(x, make_pulse(PulseKind::Rect, 0.0, 1, 8)), DomainError);
}

TEST(Synthesis, ScaleEquivariance) {
    const auto a = gen_pm(3, 16, 1.0, PmOptions{2.0, 200}, RngSeed{4});
    const auto x = random_symbols(a, 30, 5);
    const auto p = make_pulse(PulseKind::Rrc, 0.25, 8, 16);
    const auto p2 = make_pulse(PulseKind::Rrc, 0.25, 8, 8);
    EXPECT_TRUE(synthesize_pam(ComplexMatrix(3.0 * x), p).samples.isApprox(3.0 * synthesize_pam(x, p).samples, 1e-13));
    EXPECT_TRUE(synthesize_si(ComplexMatrix(3.0 * x), p, 4).samples.isApprox(3.0 * synthesize_si(x, p, 4).samples, 1e-12));
    EXPECT_TRUE(synthesize_t2(ComplexMatrix(3.0 * x), p2).samples.isApprox(3.0 * synthesize_t2(x, p2).samples, 1e-12));
}

TEST(MatchedFilter, PamRecoversSymbols) {
    const auto a = gen_pm(3, 64, 1.0, PmOptions{2.0, 200}, RngSeed{1});
    const auto x = random_symbols(a, 64, 6);
    const auto p = make_pulse(PulseKind::Rrc, 0.25, 32, 16);
    const auto z = matched_filter_downsample(synthesize_pam(x, p), p, SampleRate::T);
    ASSERT_EQ(z.samples().cols(), 64);
    for (int k = 0; k < 64; ++k) EXPECT_LT((z.samples().col(k) - x.col(k)).norm(), 1e-3 * x.col(k).norm()) << k;
}

TEST(MatchedFilter, TwoSymbolPam) {
    const auto a = gen_papsk(3, 64);
    ComplexMatrix x(3, 2);
    x << a.point(0), a.point(41);
    const auto p = make_pulse(PulseKind::Rrc, 0.25, 32, 16);
    const auto z = matched_filter_downsample(synthesize_pam(x, p), p, SampleRate::T);
    for (int k = 0; k < 2; ++k) EXPECT_LT((z.samples().col(k) - x.col(k)).norm(), 1e-3);
}

TEST(MatchedFilter, HalfRateChainIsIsiFree) {
    const auto a = gen_pm(3, 64, 1.0, PmOptions{2.0, 200}, RngSeed{1});
    const auto x = random_symbols(a, 40, 7);
    const auto p = make_pulse(PulseKind::Rrc, 0.25, 64, 8);
    const auto z = matched_filter_downsample(synthesize_t2(x, p), p, SampleRate::THalf);
    ASSERT_EQ(z.samples().cols(), 80);
    const double g = 1.0 / std::sqrt(2.0);
    double energy = 0.0;
    for (int j = 0; j < 40; ++j) {
        const ComplexVector mid = g * slerp(x.col(j), x.col(std::min(j + 1, 39)), 0.5);
        EXPECT_LT((z.samples().col(2 * j) - g * x.col(j)).norm(), 1e-3);
        EXPECT_LT((z.samples().col(2 * j + 1) - mid).norm(), 1e-3);
        energy += z.samples().col(2 * j).squaredNorm() + z.samples().col(2 * j + 1).squaredNorm();
    }
    // half energy per transmitted point: Es per symbol after the matched filter
    EXPECT_NEAR(energy / 40.0, 1.0, 2e-3);
}

TEST(MatchedFilter, ZeroInAndRateChecks) {
    const auto p = make_pulse(PulseKind::Rrc, 0.25, 16, 16);
    Waveform w;
    w.oversampling_Q = 16;
    w.samples = ComplexMatrix::Zero(2, 40 * 16);
    w.symbols_K = 40;
    EXPECT_EQ(matched_filter_downsample(w, p, SampleRate::T).samples().norm(), 0.0);
    EXPECT_THROW(matched_filter_downsample(w, p, SampleRate::THalf), DomainError);
}

TEST(WaveformFile, RoundTripAndLayout) {
    const auto a = gen_papsk(2, 16);
    const auto w = synthesize_pam(random_symbols(a, 5, 8), make_pulse(PulseKind::Rrc, 0.25, 8, 4));
    std::stringstream ss;
    write_waveform(ss, w);
    const std::string bytes = ss.str();
    ASSERT_EQ(bytes.size(), 12 + 16 * static_cast<std::size_t>(w.samples.size()));
    EXPECT_EQ(static_cast<unsigned char>(bytes[0]), 2);
    EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 13);
    EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 4);
    double first_re = 0.0;
    std::memcpy(&first_re, bytes.data() + 12, 8);
    EXPECT_EQ(first_re, w.samples(0, 0).real());
    double second_antenna = 0.0;
    std::memcpy(&second_antenna, bytes.data() + 12 + 16 * w.length(), 8);
    EXPECT_EQ(second_antenna, w.samples(1, 0).real());
    const auto r = read_waveform(ss);
    EXPECT_EQ(r.samples, w.samples);
    EXPECT_EQ(r.symbols_K, w.symbols_K);
}
