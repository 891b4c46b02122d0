#pragma once

#include <random>

#include "pskh/pskh.hpp"

namespace pskh::test {

/// M uniformly random points of norm sqrt(es) in C^n.
inline ConstellationSet random_set(int n, int m, std::uint64_t seed, double es = 1.0) {
    Rng rng(RngSeed{seed});
    std::normal_distribution<double> g;
    ComplexMatrix pts(n, m);
    for (int c = 0; c < m; ++c) {
        for (int r = 0; r < n; ++r) pts(r, c) = cplx(g(rng), g(rng));
        pts.col(c) *= std::sqrt(es) / pts.col(c).norm();
    }
    return ConstellationSet(pts, es, GeneratorTag::External);
}

inline ComplexVector random_unit(int n, Rng& rng) {
    std::normal_distribution<double> g;
    ComplexVector v(n);
    for (int r = 0; r < n; ++r) v(r) = cplx(g(rng), g(rng));
    return v / v.norm();
}

}  // namespace pskh::test
