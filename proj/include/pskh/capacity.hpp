// Constellation-constrained mutual information over the vector AWGN channel.
#pragma once

#include <cmath>
#include <vector>

#include "pskh/channel.hpp"
#include "pskh/constellation.hpp"
#include "pskh/core.hpp"

namespace pskh {

/// Monte Carlo estimate of I(X;Y) in bit per channel use for equiprobable
/// points and CN(0, sigma2) noise per component. Draw d uses point d mod M.
inline double mi_constellation(const ConstellationSet& a, double sigma2, long long n_noise_draws, RngSeed seed) {
    require(sigma2 > 0.0, "mi_constellation: sigma2 must be positive");
    require(n_noise_draws >= 1, "mi_constellation: need at least one draw");
    const int m = a.size(), n = a.n();
    const ComplexMatrix& pts = a.points();
    Rng rng(seed);
    std::vector<double> ex(static_cast<std::size_t>(m));
    double sum = 0.0;
    for (long long d = 0; d < n_noise_draws; ++d) {
        const int i = static_cast<int>(d % m);
        const ComplexVector noise = complex_gaussian(n, sigma2, rng);
        const double nn = noise.squaredNorm();
        double mx = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < m; ++j) {
            const double v = (nn - (pts.col(i) + noise - pts.col(j)).squaredNorm()) / sigma2;
            ex[static_cast<std::size_t>(j)] = v;
            mx = std::max(mx, v);
        }
        double s = 0.0;
        for (double v : ex) s += std::exp(v - mx);
        sum += (mx + std::log(s)) / std::log(2.0);
    }
    return std::log2(static_cast<double>(m)) - sum / static_cast<double>(n_noise_draws);
}

/// Eb/N0 (linear) at which a code achieving `capacity` bits per use operates: Es / (C sigma2).
inline double ebn0_at_capacity(double es, double capacity, double sigma2) {
    require(capacity > 0.0 && sigma2 > 0.0, "ebn0_at_capacity: bad parameters");
    return es / (capacity * sigma2);
}

}  // namespace pskh
