#include <gtest/gtest.h>

#include "support.hpp"

using namespace pskh;

namespace {

const ConstellationSet& pm364() {
    static const ConstellationSet a = gen_pm(3, 64, 1.0, {}, RngSeed{7});
    return a;
}

double paspr_of(const ConstellationSet& a, const WaveformSpec& w, long long k, std::uint64_t seed) {
    return paspr_db(random_waveform(a, w, k, RngSeed{seed}), pulse_span_symbols(w));
}

}  // namespace

TEST(Paspr, RectIsZeroDb) {
    WaveformSpec w;
    w.pulse = PulseKind::Rect;
    w.span = 2;
    w.q = 15;
    EXPECT_NEAR(paspr_of(pm364(), w, 2000, 1), 0.0, 1e-12);
}

TEST(Paspr, Sinc2NearTheory) {
    WaveformSpec w;
    w.pulse = PulseKind::Sinc2;
    for (int n : {1, 3}) {
        const auto a = gen_pm(n, 64, 1.0, PmOptions{2.0, 500}, RngSeed{3});
        EXPECT_NEAR(paspr_of(a, w, 20000, 2), 1.76, 0.05) << "n=" << n;
    }
}

TEST(Paspr, InterpolationLowersPeakOnSameSymbols) {
    WaveformSpec pam, si;
    si.signaling = Signaling::Si;
    EXPECT_LT(paspr_of(pm364(), si, 20000, 4) + 0.3, paspr_of(pm364(), pam, 20000, 4));
}

TEST(Paspr, ErrorsAndRelation) {
    Waveform w;
    w.oversampling_Q = 4;
    w.samples = ComplexMatrix::Zero(2, 40);
    EXPECT_THROW(paspr_db(w, 1), DomainError);
    EXPECT_THROW(paspr_db(w, 5), DomainError);
    EXPECT_DOUBLE_EQ(ebmax_n0(19.64 - 1.76, 1.76), 19.64);
    EXPECT_DOUBLE_EQ(ebmax_n0(20.3 - 2.4, 2.4), 20.3);
    EXPECT_DOUBLE_EQ(ebmax_n0(7.0, 0.0), 7.0);
}

TEST(Bandwidth, FlatBandOracle) {
    // 100 bins of width 0.01 from -0.5, power only on [-0.2, 0.2)
    std::vector<double> f, p;
    for (int i = 0; i < 100; ++i) {
        f.push_back(-0.5 + 0.01 * i);
        p.push_back(std::abs(f.back()) < 0.2 - 1e-9 || std::abs(f.back() + 0.2) < 1e-9 ? 1.0 : 0.0);
    }
    double tot = 0.0;
    for (double v : p) tot += v;
    for (double& v : p) v /= tot;
    const auto b = fractional_bandwidths(f, p, {0.5, 1.0});
    EXPECT_NEAR(b.at(1.0), 0.40, 1e-9);
    EXPECT_NEAR(b.at(0.5), 0.20, 1e-9);
}

TEST(Psd, RrcBandwidthsAndNormalization) {
    WaveformSpec w;
    w.span = 32;
    const auto est = psd_estimate(random_waveform(pm364(), w, 20000, RngSeed{5}), 64);
    double tot = 0.0;
    for (double v : est.psd) {
        EXPECT_GE(v, 0.0);
        tot += v;
    }
    EXPECT_NEAR(tot, 1.0, 1e-9);
    EXPECT_TRUE(std::is_sorted(est.freqs.begin(), est.freqs.end()));
    EXPECT_LE(est.bandwidth.at(0.99), est.bandwidth.at(0.999));
    EXPECT_LE(est.bandwidth.at(0.999), est.bandwidth.at(0.9999));
    EXPECT_LE(est.bandwidth.at(0.9999), est.bandwidth.at(1.0));
    EXPECT_NEAR(est.bandwidth.at(1.0), 1.25, 0.05 * 1.25);
}

TEST(Psd, HalfRateDoublesAndInterpolationKeepsBandwidth) {
    WaveformSpec pam, t2, si;
    pam.span = 32;
    t2.signaling = Signaling::T2;
    t2.span = 64;
    si.signaling = Signaling::Si;
    si.span = 32;
    const double b_pam = psd_estimate(random_waveform(pm364(), pam, 20000, RngSeed{6}), 64).bandwidth.at(1.0);
    const double b_t2 = psd_estimate(random_waveform(pm364(), t2, 20000, RngSeed{6}), 64).bandwidth.at(1.0);
    const double b_si = psd_estimate(random_waveform(pm364(), si, 20000, RngSeed{6}), 64).bandwidth.at(1.0);
    EXPECT_NEAR(b_t2 / b_pam, 2.0, 0.1);
    EXPECT_GT(b_t2, b_pam);
    EXPECT_NEAR(b_si / b_pam, 1.0, 0.05);
}

TEST(Psd, RejectsShortInput) {
    WaveformSpec w;
    const auto wf = random_waveform(pm364(), w, 100, RngSeed{1});
    EXPECT_THROW(psd_estimate(wf, 64), DomainError);
}

TEST(MutualInformation, Limits) {
    const auto a = gen_papsk(3, 64);
    EXPECT_NEAR(mi_constellation(a, 1e-4, 2000, RngSeed{1}), 6.0, 1e-6);
    EXPECT_NEAR(mi_constellation(a, 1e4, 20000, RngSeed{1}), 0.0, 0.01);
    EXPECT_THROW(mi_constellation(a, 0.0, 10, RngSeed{1}), DomainError);
}

TEST(MutualInformation, MonotoneInNoise) {
    const auto& a = pm364();
    const int draws = 20000;
    double prev = 7.0;
    for (int i = 0; i < 10; ++i) {
        const double s2 = 0.02 * std::pow(2.0, i);
        const double v = mi_constellation(a, s2, draws, RngSeed{9});
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 6.0);
        // per-draw information density has spread below 3 bit
        EXPECT_LE(v, prev + 3.0 * 3.0 / std::sqrt(draws)) << s2;
        prev = v;
    }
}

TEST(MutualInformation, CapacityCurvePoint) {
    const double c = mi_constellation(pm364(), 0.1, 40000, RngSeed{2});
    EXPECT_NEAR(c, 5.43, 0.05);
    EXPECT_NEAR(linear_to_db(ebn0_at_capacity(1.0, c, 0.1)), 2.65, 0.05);
}

TEST(Ser, NoiselessLimitHasNoErrors) {
    LinkConfig c;
    c.ebn0_db = {60.0};
    c.max_symbols = 20000;
    const auto curve = run_ser(pm364(), c, RngSeed{1});
    ASSERT_EQ(curve.points.size(), 1u);
    EXPECT_EQ(curve.points[0].errors, 0);
    EXPECT_EQ(curve.points[0].symbols, 32000);
}

TEST(Ser, StoppingRuleAndExactRatio) {
    LinkConfig c;
    c.ebn0_db = {4.0, 6.0};
    c.min_errors = 200;
    const auto curve = run_ser(pm364(), c, RngSeed{2});
    for (const auto& p : curve.points) {
        EXPECT_GE(p.errors, 200);
        EXPECT_EQ(p.symbols % (c.frame_symbols * c.batch_frames), 0);
        EXPECT_EQ(p.ser, static_cast<double>(p.errors) / static_cast<double>(p.symbols));
    }
    EXPECT_GT(curve.points[0].ser, curve.points[1].ser);
}

TEST(Ser, WorkerCountDoesNotChangeResults) {
    const auto a = gen_pm(3, 16, 1.0, PmOptions{2.0, 300}, RngSeed{3});
    LinkConfig c;
    c.channel = ChannelKind::RayleighIid;
    c.waveform.signaling = Signaling::Si;
    c.decoder = TrellisDecodeConfig{Estimator::IterVa};
    c.decoder.nu_max = 2;
    c.ebn0_db = {6.0};
    c.min_errors = 50;
    c.frame_symbols = 200;
    c.batch_frames = 8;
    c.workers = 1;
    const auto one = run_ser(a, c, RngSeed{4});
    c.workers = 3;
    const auto three = run_ser(a, c, RngSeed{4});
    EXPECT_EQ(one.points[0].errors, three.points[0].errors);
    EXPECT_EQ(one.points[0].symbols, three.points[0].symbols);
    EXPECT_GT(one.points[0].errors, 0);
}

TEST(Ser, InfeasibleConfigPropagates) {
    LinkConfig c;
    c.waveform.signaling = Signaling::Si;
    c.decoder = TrellisDecodeConfig{Estimator::Va, 3};
    c.ebn0_db = {10.0};
    EXPECT_THROW(run_ser(pm364(), c, RngSeed{1}), InfeasibleTrellis);
}

TEST(Ser, LinkModelSelection) {
    LinkConfig c;
    EXPECT_EQ(link_model(pm364(), c).kind, MetricKind::IsiFree);
    c.waveform.pulse = PulseKind::Sinc2;
    EXPECT_EQ(link_model(pm364(), c).kind, MetricKind::Sinc2Wmf);
    c.waveform.signaling = Signaling::T2;
    EXPECT_EQ(link_model(pm364(), c).kind, MetricKind::T2Slerp);
    c.waveform.signaling = Signaling::Si;
    EXPECT_EQ(link_model(pm364(), c).kind, MetricKind::SiPhi);
    EXPECT_EQ(signaling_from_string("t2"), Signaling::T2);
    EXPECT_THROW(signaling_from_string("ofdm"), DomainError);
}
