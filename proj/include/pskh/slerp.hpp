// Spherical linear interpolation of equal-norm complex vectors (real 2n-dim geometry).
#pragma once

#include <cmath>

#include "pskh/core.hpp"

namespace pskh {

class AntipodalPoints : public DomainError {
  public:
    AntipodalPoints() : DomainError("slerp: antipodal inputs, great circle undefined") {}
};

/// Angle between x1 and x2 in the real representation.
inline double real_angle(const ComplexVector& x1, const ComplexVector& x2) {
    return 2.0 * std::atan2((x1 - x2).norm(), (x1 + x2).norm());
}

inline ComplexVector slerp(const ComplexVector& x1, const ComplexVector& x2, double tau) {
    require(x1.size() == x2.size(), "slerp: dimension mismatch");
    require(tau >= 0.0 && tau <= 1.0, "slerp: tau must lie in [0, 1]");
    const double r1 = x1.norm(), r2 = x2.norm();
    require(std::abs(r1 - r2) <= 1e-9 * std::max(r1, r2), "slerp: inputs must have equal norm");
    if (tau == 0.0) return x1;
    if (tau == 1.0) return x2;
    const double theta = real_angle(x1, x2);
    if (kPi - theta < 1e-6) throw AntipodalPoints();
    if (theta < 1e-6) {
        ComplexVector v = (1.0 - tau) * x1 + tau * x2;
        const double nv = v.norm();
        return nv > 0.0 ? ComplexVector(v * (r1 / nv)) : x1;
    }
    const double s = std::sin(theta);
    return (std::sin((1.0 - tau) * theta) / s) * x1 + (std::sin(tau * theta) / s) * x2;
}

}  // namespace pskh
