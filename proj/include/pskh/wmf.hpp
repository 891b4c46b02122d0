// Whitened matched filter for sinc^2 pulse shaping: minimum-phase spectral factor
// of the T-spaced pulse autocorrelation.
#pragma once

#include <algorithm>
#include <vector>

#include <unsupported/Eigen/Polynomials>

#include "pskh/core.hpp"
#include "pskh/pulse.hpp"

namespace pskh {

class FactorizationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct WhitenedImpulse {
    std::vector<cplx> h_w;       ///< causal taps h_W[0..L]
    std::vector<cplx> zeros;     ///< zeros of sum h_W[i] z^-i
    std::vector<double> phi;     ///< phi[0..L] of the T-spaced autocorrelation

    [[nodiscard]] int memory() const { return static_cast<int>(h_w.size()) - 1; }
};

/// Minimum-phase factor of the Laurent polynomial sum_k phi[k] z^-k (phi real and even).
inline WhitenedImpulse spectral_factor(const std::vector<double>& phi_one_sided) {
    const int l = static_cast<int>(phi_one_sided.size()) - 1;
    require(l >= 0 && phi_one_sided[0] > 0.0, "spectral_factor: phi[0] must be positive");
    WhitenedImpulse w;
    w.phi = phi_one_sided;
    if (l == 0) {
        w.h_w = {cplx(std::sqrt(phi_one_sided[0]), 0.0)};
        return w;
    }
    Eigen::VectorXd coeffs(2 * l + 1);
    for (int k = -l; k <= l; ++k) coeffs(l + k) = phi_one_sided[static_cast<std::size_t>(std::abs(k))];
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(coeffs);
    const auto& roots = solver.roots();
    for (Eigen::Index i = 0; i < roots.size(); ++i) {
        const double m = std::abs(roots(i));
        if (!std::isfinite(m)) throw FactorizationError("spectral_factor: root finding failed");
        if (std::abs(m - 1.0) < 1e-9) throw FactorizationError("spectral_factor: root on the unit circle");
        if (m < 1.0) w.zeros.push_back(roots(i));
    }
    if (static_cast<int>(w.zeros.size()) != l)
        throw FactorizationError("spectral_factor: roots do not split into reciprocal pairs");
    std::sort(w.zeros.begin(), w.zeros.end(), [](cplx a, cplx b) {
        if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
        return std::arg(a) < std::arg(b);
    });
    std::vector<cplx> b{cplx(1.0, 0.0)};
    for (const cplx r : w.zeros) {
        std::vector<cplx> nb(b.size() + 1, cplx(0.0, 0.0));
        for (std::size_t j = 0; j < b.size(); ++j) {
            nb[j] += b[j];
            nb[j + 1] -= r * b[j];
        }
        b = std::move(nb);
    }
    double e = 0.0;
    for (const cplx v : b) e += std::norm(v);
    const double g = std::sqrt(phi_one_sided[0] / e);
    for (cplx& v : b) {
        v *= g;
        if (std::abs(v.imag()) < 1e-12 * g) v = cplx(v.real(), 0.0);
    }
    w.h_w = std::move(b);
    return w;
}

/// T-spaced autocorrelation of a normalized pulse, phi[0..span].
inline std::vector<double> symbol_spaced_autocorr(const PulseShape& p) {
    const auto table = autocorr_table(p, 1);
    std::vector<double> phi;
    for (int k = 0; k * p.oversampling_Q <= table.max_offset(); ++k) phi.push_back(table.at(k * p.oversampling_Q));
    while (phi.size() > 1 && std::abs(phi.back()) < 1e-12 * phi.front()) phi.pop_back();
    return phi;
}

inline WhitenedImpulse build_wmf_sinc2(int q, int span) {
    const auto p = make_pulse(PulseKind::Sinc2, 0.0, span, q);
    return spectral_factor(symbol_spaced_autocorr(p));
}

}  // namespace pskh
