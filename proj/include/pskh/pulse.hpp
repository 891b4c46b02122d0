// Sampled pulse shapes and their deterministic autocorrelation.
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "pskh/core.hpp"

namespace pskh {

enum class PulseKind { Rrc, Sinc2, Rect };

inline std::string to_string(PulseKind k) {
    switch (k) {
        case PulseKind::Rrc: return "rrc";
        case PulseKind::Sinc2: return "sinc2";
        case PulseKind::Rect: return "rect";
    }
    return "rrc";
}

inline PulseKind pulse_kind_from_string(const std::string& s) {
    if (s == "rrc" || s == "RRC") return PulseKind::Rrc;
    if (s == "sinc2" || s == "SINC2") return PulseKind::Sinc2;
    if (s == "rect" || s == "RECT") return PulseKind::Rect;
    throw DomainError("unknown pulse kind '" + s + "'");
}

/// Even pulse sampled at Q samples per pulse period; tap i sits at t = (i - span*Q/2) / Q.
struct PulseShape {
    PulseKind kind = PulseKind::Rrc;
    double rolloff_beta = 0.0;
    int span_symbols = 0;
    int oversampling_Q = 0;
    std::vector<double> taps;

    [[nodiscard]] int center() const { return span_symbols * oversampling_Q / 2; }
    [[nodiscard]] int length() const { return static_cast<int>(taps.size()); }
};

inline double sinc(double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    return std::sin(kPi * x) / (kPi * x);
}

inline double rrc_value(double t, double beta) {
    if (beta == 0.0) return sinc(t);
    if (std::abs(t) < 1e-12) return 1.0 - beta + 4.0 * beta / kPi;
    const double edge = 1.0 / (4.0 * beta);
    if (std::abs(std::abs(t) - edge) < 1e-9) {
        const double a = kPi / (4.0 * beta);
        return beta / std::sqrt(2.0) * ((1.0 + 2.0 / kPi) * std::sin(a) + (1.0 - 2.0 / kPi) * std::cos(a));
    }
    const double num = std::sin(kPi * t * (1.0 - beta)) + 4.0 * beta * t * std::cos(kPi * t * (1.0 + beta));
    const double den = kPi * t * (1.0 - 16.0 * beta * beta * t * t);
    return num / den;
}

/// RECT is 1 on |t| < 1/2; a sample landing exactly on the edge (even Q) gets 1/2.
inline PulseShape make_pulse(PulseKind kind, double beta, int span_symbols, int q) {
    require(q >= 4, "make_pulse: Q must be >= 4");
    require(span_symbols >= 1, "make_pulse: span must be >= 1");
    if (kind != PulseKind::Rect) require(span_symbols >= 8, "make_pulse: span must be >= 8 for RRC/sinc2");
    if (kind == PulseKind::Rrc) require(beta >= 0.0 && beta <= 1.0, "make_pulse: beta must lie in [0, 1]");
    require((span_symbols * q) % 2 == 0, "make_pulse: span*Q must be even");

    PulseShape p;
    p.kind = kind;
    p.rolloff_beta = kind == PulseKind::Rrc ? beta : 0.0;
    p.span_symbols = span_symbols;
    p.oversampling_Q = q;
    const int len = span_symbols * q + 1;
    const int c = span_symbols * q / 2;
    p.taps.resize(static_cast<std::size_t>(len));
    for (int i = 0; i < len; ++i) {
        const int off = i - c;
        const double t = static_cast<double>(off) / q;
        double v = 0.0;
        switch (kind) {
            case PulseKind::Rrc: v = rrc_value(t, beta); break;
            case PulseKind::Sinc2: {
                const double s = (off % q == 0 && off != 0) ? 0.0 : sinc(t);
                v = s * s;
                break;
            }
            case PulseKind::Rect:
                if (2 * std::abs(off) < q) v = 1.0;
                else if (2 * std::abs(off) == q) v = 0.5;
                break;
        }
        p.taps[static_cast<std::size_t>(i)] = v;
    }
    double e = 0.0;
    for (double v : p.taps) e += v * v;
    const double g = 1.0 / std::sqrt(e / q);
    for (double& v : p.taps) v *= g;
    return p;
}

/// Discrete autocorrelation of the taps at resolution T/Q (phi[0] = 1 for a normalized pulse).
class AutocorrelationTable {
  public:
    AutocorrelationTable(std::vector<double> one_sided, int q, int fip)
        : phi_(std::move(one_sided)), q_(q), fip_(fip) {}

    [[nodiscard]] int fip() const { return fip_; }
    [[nodiscard]] int oversampling() const { return q_; }
    [[nodiscard]] int max_offset() const { return static_cast<int>(phi_.size()) - 1; }

    /// phi at a sample offset; zero outside the support.
    [[nodiscard]] double at(int k) const {
        k = std::abs(k);
        return k < static_cast<int>(phi_.size()) ? phi_[static_cast<std::size_t>(k)] : 0.0;
    }

    /// phi(num / fip) in units of T.
    [[nodiscard]] double at_fraction(int num) const { return at(num * (q_ / fip_)); }

  private:
    std::vector<double> phi_;
    int q_;
    int fip_;
};

inline AutocorrelationTable autocorr_table(const PulseShape& p, int fip = 1) {
    require(fip >= 1 && p.oversampling_Q % fip == 0, "autocorr_table: Q must be divisible by f_IP");
    const int len = p.length();
    std::vector<double> phi(static_cast<std::size_t>(len));
    for (int k = 0; k < len; ++k) {
        double s = 0.0;
        for (int i = 0; i + k < len; ++i) s += p.taps[static_cast<std::size_t>(i)] * p.taps[static_cast<std::size_t>(i + k)];
        phi[static_cast<std::size_t>(k)] = s / p.oversampling_Q;
    }
    return AutocorrelationTable(std::move(phi), p.oversampling_Q, fip);
}

}  // namespace pskh
