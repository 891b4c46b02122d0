// Shared numeric types, deterministic randomness and energy bookkeeping.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace pskh {

using cplx = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;

/// Raised on invalid arguments (non-positive energies, bad sizes, ...).
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw DomainError(what);
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

// ---------------------------------------------------------------------------
// Randomness
// ---------------------------------------------------------------------------

struct RngSeed {
    std::uint64_t seed = 0;
};

namespace detail {
inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}
}  // namespace detail

/// Counter-based generator: the i-th output is a pure function of (key, i).
/// Satisfies UniformRandomBitGenerator so it plugs into <random> distributions.
/// Sub-streams are obtained with derive(); nothing is shared between streams.
class Rng {
  public:
    using result_type = std::uint64_t;

    explicit Rng(RngSeed seed) : key_(detail::mix64(seed.seed ^ 0x5851F42D4C957F2DULL)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        ++counter_;
        return detail::mix64(key_ + counter_ * detail::kGolden);
    }

    /// Independent child stream identified by `stream`. Does not advance *this.
    [[nodiscard]] Rng derive(std::uint64_t stream) const {
        Rng child;
        child.key_ = detail::mix64(key_ ^ detail::mix64(stream + detail::kGolden));
        return child;
    }

    [[nodiscard]] std::uint64_t counter() const { return counter_; }

  private:
    Rng() = default;
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

// ---------------------------------------------------------------------------
// Energy / SNR
// ---------------------------------------------------------------------------

enum class ChannelKind { IdentityAwgn, RayleighIid, Explicit };

/// Eb/N0 on a unitary (vector AWGN) channel: Es / (Rm sigma^2).
inline double ebn0_awgn(double es, int rm, double sigma2) {
    require(es > 0.0, "ebn0_awgn: Es must be positive");
    require(rm >= 1, "ebn0_awgn: Rm must be >= 1");
    require(sigma2 > 0.0, "ebn0_awgn: sigma2 must be positive");
    return es / (static_cast<double>(rm) * sigma2);
}

/// Average received Eb/N0 on flat Rayleigh fading with n receive antennas.
inline double ebn0_fading(double es, int rm, double sigma2, int n) {
    require(n >= 1, "ebn0_fading: n must be >= 1");
    return static_cast<double>(n) * ebn0_awgn(es, rm, sigma2);
}

/// Noise variance per complex component that yields the requested Eb/N0.
inline double sigma2_for_ebn0(double target_ebn0_db, double es, int rm, int n, ChannelKind kind) {
    require(std::isfinite(target_ebn0_db), "sigma2_for_ebn0: target must be finite");
    require(es > 0.0 && rm >= 1 && n >= 1, "sigma2_for_ebn0: bad parameters");
    const double gain = (kind == ChannelKind::RayleighIid) ? static_cast<double>(n) : 1.0;
    return gain * es / (static_cast<double>(rm) * db_to_linear(target_ebn0_db));
}

}  // namespace pskh
