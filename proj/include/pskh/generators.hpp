// Constellation generators: equal-area partition (EQPA), spherical k-means (kMC),
// Riesz potential minimisation (PM) and per-antenna PSK (PA-PSK).
//
// All numerical generators work on the real sphere S^{2n-1} with the complex
// pairing (re_1, im_1, ..., re_n, im_n).
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "pskh/constellation.hpp"
#include "pskh/core.hpp"

namespace pskh {

namespace detail {

inline ComplexMatrix real_columns_to_complex(const RealMatrix& xr, double radius) {
    const auto n = xr.rows() / 2;
    ComplexMatrix pts(n, xr.cols());
    for (Eigen::Index c = 0; c < xr.cols(); ++c) {
        const double s = radius / xr.col(c).norm();
        for (Eigen::Index r = 0; r < n; ++r) pts(r, c) = cplx(xr(2 * r, c) * s, xr(2 * r + 1, c) * s);
    }
    return pts;
}

inline RealMatrix uniform_sphere_samples(int dim_real, int count, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    RealMatrix x(dim_real, count);
    for (int c = 0; c < count; ++c) {
        double nrm = 0.0;
        do {
            for (int r = 0; r < dim_real; ++r) x(r, c) = g(rng);
            nrm = x.col(c).norm();
        } while (nrm < 1e-12);
        x.col(c) /= nrm;
    }
    return x;
}

// ---- recursive zonal equal-area partition of S^dim ------------------------

inline double area_of_sphere(int dim) {
    const double p = 0.5 * (dim + 1);
    return 2.0 * std::pow(kPi, p) / std::tgamma(p);
}

// integral_0^s sin^k(t) dt
inline double sin_power_integral(int k, double s) {
    if (k == 0) return s;
    if (k == 1) return 1.0 - std::cos(s);
    return -std::pow(std::sin(s), k - 1) * std::cos(s) / k + (k - 1.0) / k * sin_power_integral(k - 2, s);
}

inline double area_of_cap(int dim, double s) {
    return area_of_sphere(dim - 1) * sin_power_integral(dim - 1, s);
}

inline double sradius_of_cap(int dim, double area) {
    double lo = 0.0, hi = kPi;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (area_of_cap(dim, mid) < area ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline double circle_offset(int n_top, int n_bot) {
    return (1.0 / n_bot - 1.0 / n_top) / 2.0 + std::gcd(n_top, n_bot) / (2.0 * n_top * n_bot);
}

/// Region centres in spherical polar coordinates: one column of `dim` angles per
/// point, the last angle being the colatitude.
inline RealMatrix eq_point_set_polar(int dim, int count) {
    RealMatrix pts = RealMatrix::Zero(dim, count);
    if (count == 1) return pts;
    if (dim == 1) {
        for (int k = 0; k < count; ++k) pts(0, k) = (k + 0.5) * 2.0 * kPi / count;
        return pts;
    }
    const double ideal_area = area_of_sphere(dim) / count;
    const double c_polar = (count == 2) ? kPi / 2.0 : sradius_of_cap(dim, ideal_area);
    int n_collars = 0;
    const double a_ideal = std::pow(ideal_area, 1.0 / dim);
    if (count > 2 && a_ideal > 0.0)
        n_collars = std::max(1, static_cast<int>(std::lround((kPi - 2.0 * c_polar) / a_ideal)));

    // ideal (fractional) region counts per zone, then rounded with carried discrepancy
    std::vector<double> ideal(static_cast<std::size_t>(n_collars + 2), 1.0);
    if (n_collars > 0) {
        const double a_fit = (kPi - 2.0 * c_polar) / n_collars;
        for (int k = 1; k <= n_collars; ++k) {
            const double top = c_polar + (k - 1) * a_fit, bot = c_polar + k * a_fit;
            ideal[static_cast<std::size_t>(k)] = (area_of_cap(dim, bot) - area_of_cap(dim, top)) / ideal_area;
        }
    }
    std::vector<int> regions(ideal.size());
    double discrepancy = 0.0;
    for (std::size_t k = 0; k < ideal.size(); ++k) {
        regions[k] = static_cast<int>(std::lround(ideal[k] + discrepancy));
        discrepancy += ideal[k] - regions[k];
    }
    std::vector<double> caps(ideal.size());
    caps[0] = c_polar;
    int subtotal = 1;
    for (int k = 1; k <= n_collars; ++k) {
        subtotal += regions[static_cast<std::size_t>(k)];
        caps[static_cast<std::size_t>(k)] = sradius_of_cap(dim, subtotal * ideal_area);
    }
    caps.back() = kPi;

    int col = 1;  // column 0 is the north pole (all zeros)
    double offset = 0.0;
    for (int k = 1; k <= n_collars; ++k) {
        const double top = caps[static_cast<std::size_t>(k - 1)], bot = caps[static_cast<std::size_t>(k)];
        const int in_collar = regions[static_cast<std::size_t>(k)];
        RealMatrix sub = eq_point_set_polar(dim - 1, in_collar);
        if (dim == 2) {
            for (int c = 0; c < in_collar; ++c) sub(0, c) = std::fmod(sub(0, c) + 2.0 * kPi * offset, 2.0 * kPi);
            offset += circle_offset(in_collar, regions[static_cast<std::size_t>(k + 1)]);
            offset -= std::floor(offset);
        }
        const double colat = 0.5 * (top + bot);
        for (int c = 0; c < in_collar; ++c, ++col) {
            pts.block(0, col, dim - 1, 1) = sub.col(c);
            pts(dim - 1, col) = colat;
        }
    }
    pts(dim - 1, count - 1) = kPi;  // south pole
    return pts;
}

inline RealVector polar_to_cartesian(const RealVector& s) {
    const auto dim = s.size();
    RealVector x(dim + 1);
    double sinprod = 1.0;
    for (Eigen::Index k = dim - 1; k >= 1; --k) {
        x(k + 1) = sinprod * std::cos(s(k));
        sinprod *= std::sin(s(k));
    }
    x(1) = sinprod * std::sin(s(0));
    x(0) = sinprod * std::cos(s(0));
    return x;
}

}  // namespace detail

/// Centres of a recursive zonal equal-area partition of S^{2n-1}. Deterministic.
inline ConstellationSet gen_eqpa(int n, int m, double es = 1.0) {
    require(n >= 1, "gen_eqpa: n must be >= 1");
    require(m >= 2 && is_power_of_two(m), "gen_eqpa: M must be a power of two >= 2");
    const int dim = 2 * n - 1;
    const RealMatrix polar = detail::eq_point_set_polar(dim, m);
    RealMatrix xr(2 * n, m);
    for (int c = 0; c < m; ++c) xr.col(c) = detail::polar_to_cartesian(polar.col(c));
    return ConstellationSet(detail::real_columns_to_complex(xr, std::sqrt(es)), es, GeneratorTag::Eqpa);
}

struct KmcOptions {
    int n_samples = 0;  ///< 0 selects max(200 M, 100000)
    int max_iters = 200;
};

/// Spherical k-means (cosine similarity) over uniform samples of S^{2n-1}.
/// An empty cluster is re-seeded with the sample least similar to its centroid.
inline ConstellationSet gen_kmc(int n, int m, double es, KmcOptions opt, RngSeed seed) {
    require(n >= 1, "gen_kmc: n must be >= 1");
    require(m >= 2 && is_power_of_two(m), "gen_kmc: M must be a power of two >= 2");
    if (opt.n_samples == 0) opt.n_samples = std::max(200 * m, 100000);
    require(opt.n_samples >= 100 * m, "gen_kmc: need n_samples >= 100 M");
    Rng rng(seed);
    const int d = 2 * n;
    const RealMatrix samples = detail::uniform_sphere_samples(d, opt.n_samples, rng);

    // initial centroids: M distinct random samples
    std::vector<int> perm(static_cast<std::size_t>(opt.n_samples));
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = 0; i < m; ++i) {
        std::uniform_int_distribution<int> pick(i, opt.n_samples - 1);
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(pick(rng))]);
    }
    RealMatrix centroids(d, m);
    for (int i = 0; i < m; ++i) centroids.col(i) = samples.col(perm[static_cast<std::size_t>(i)]);

    std::vector<int> assign(static_cast<std::size_t>(opt.n_samples), -1);
    std::vector<double> best_sim(static_cast<std::size_t>(opt.n_samples));
    for (int iter = 0; iter < opt.max_iters; ++iter) {
        const RealMatrix sim = centroids.transpose() * samples;  // m x N
        bool changed = false;
        for (int s = 0; s < opt.n_samples; ++s) {
            Eigen::Index best = 0;
            best_sim[static_cast<std::size_t>(s)] = sim.col(s).maxCoeff(&best);
            if (assign[static_cast<std::size_t>(s)] != static_cast<int>(best)) {
                assign[static_cast<std::size_t>(s)] = static_cast<int>(best);
                changed = true;
            }
        }
        RealMatrix sums = RealMatrix::Zero(d, m);
        std::vector<int> counts(static_cast<std::size_t>(m), 0);
        for (int s = 0; s < opt.n_samples; ++s) {
            sums.col(assign[static_cast<std::size_t>(s)]) += samples.col(s);
            ++counts[static_cast<std::size_t>(assign[static_cast<std::size_t>(s)])];
        }
        for (int c = 0; c < m; ++c) {
            if (counts[static_cast<std::size_t>(c)] == 0) {
                const auto far = std::min_element(best_sim.begin(), best_sim.end()) - best_sim.begin();
                centroids.col(c) = samples.col(far);
                best_sim[static_cast<std::size_t>(far)] = std::numeric_limits<double>::infinity();
                changed = true;
                continue;
            }
            const double nrm = sums.col(c).norm();
            if (nrm > 0.0) centroids.col(c) = sums.col(c) / nrm;
        }
        if (!changed) break;
    }
    return ConstellationSet(detail::real_columns_to_complex(centroids, std::sqrt(es)), es, GeneratorTag::Kmc);
}

struct PmOptions {
    double riesz_exponent = 2.0;
    int steps = 5000;
    double step_size = 0.01;  ///< initial maximum per-step displacement on the unit sphere
    double decay = 0.999;
};

/// Riesz s-energy sum_{i<j} |a_i - a_j|^{-s} evaluated on the columns of xr.
inline double riesz_energy(const RealMatrix& xr, double s) {
    double e = 0.0;
    for (Eigen::Index i = 0; i < xr.cols(); ++i)
        for (Eigen::Index j = i + 1; j < xr.cols(); ++j) e += std::pow((xr.col(i) - xr.col(j)).squaredNorm(), -0.5 * s);
    return e;
}

/// Projected gradient descent on the Riesz energy over S^{2n-1}. Returns the
/// lowest-energy iterate. Coincident points are jittered apart.
inline ConstellationSet gen_pm(int n, int m, double es, PmOptions opt, RngSeed seed) {
    require(n >= 1, "gen_pm: n must be >= 1");
    require(m >= 2 && is_power_of_two(m), "gen_pm: M must be a power of two >= 2");
    require(opt.riesz_exponent > 0.0, "gen_pm: riesz exponent must be positive");
    require(opt.steps >= 1, "gen_pm: steps must be >= 1");
    Rng rng(seed);
    const int d = 2 * n;
    RealMatrix x = detail::uniform_sphere_samples(d, m, rng);
    RealMatrix force(d, m);
    RealMatrix best = x;
    double best_energy = std::numeric_limits<double>::infinity();
    const double s = opt.riesz_exponent;
    std::normal_distribution<double> jitter(0.0, 1e-6);
    double eta = opt.step_size;

    std::vector<double> diff(static_cast<std::size_t>(d));
    for (int step = 0; step < opt.steps; ++step) {
        force.setZero();
        double energy = 0.0;
        for (int i = 0; i < m; ++i) {
            double* fi = force.col(i).data();
            for (int j = i + 1; j < m; ++j) {
                double r2 = 0.0;
                for (int r = 0; r < d; ++r) {
                    diff[static_cast<std::size_t>(r)] = x(r, i) - x(r, j);
                    r2 += diff[static_cast<std::size_t>(r)] * diff[static_cast<std::size_t>(r)];
                }
                if (r2 < 1e-24) {
                    for (int r = 0; r < d; ++r) x(r, j) += jitter(rng);
                    x.col(j).normalize();
                    r2 = 0.0;
                    for (int r = 0; r < d; ++r) {
                        diff[static_cast<std::size_t>(r)] = x(r, i) - x(r, j);
                        r2 += diff[static_cast<std::size_t>(r)] * diff[static_cast<std::size_t>(r)];
                    }
                }
                const double inv = (s == 2.0) ? 1.0 / r2 : std::pow(r2, -0.5 * s);
                energy += inv;
                const double w = s * inv / r2;
                double* fj = force.col(j).data();
                for (int r = 0; r < d; ++r) {
                    fi[r] += w * diff[static_cast<std::size_t>(r)];
                    fj[r] -= w * diff[static_cast<std::size_t>(r)];
                }
            }
        }
        if (energy < best_energy) {
            best_energy = energy;
            best = x;
        }
        double fmax = 0.0;
        for (int i = 0; i < m; ++i) {
            force.col(i) -= force.col(i).dot(x.col(i)) * x.col(i);
            fmax = std::max(fmax, force.col(i).norm());
        }
        if (fmax <= 0.0) break;
        for (int i = 0; i < m; ++i) {
            x.col(i) += (eta / fmax) * force.col(i);
            x.col(i).normalize();
        }
        eta *= opt.decay;
    }
    if (riesz_energy(x, s) < best_energy) best = x;
    return ConstellationSet(detail::real_columns_to_complex(best, std::sqrt(es)), es, GeneratorTag::Pm);
}

/// Per-antenna PSK orders: log2 M bits spread as evenly as possible, extra bits
/// on the lower antenna indices.
inline std::vector<int> papsk_orders(int n, int m) {
    require(n >= 1, "papsk: n must be >= 1");
    require(m >= 2 && is_power_of_two(m), "papsk: M must be a power of two >= 2");
    const int rm = log2_exact(m);
    std::vector<int> orders(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) orders[static_cast<std::size_t>(i)] = 1 << (rm / n + (i < rm % n ? 1 : 0));
    return orders;
}

/// Cartesian product of per-antenna PSK, energy Es/n per antenna. Labels are
/// row-major with antenna 0 as the most significant digit.
inline ConstellationSet gen_papsk(int n, int m, double es = 1.0) {
    const std::vector<int> orders = papsk_orders(n, m);
    const double amp = std::sqrt(es / n);
    ComplexMatrix pts(n, m);
    for (int label = 0; label < m; ++label) {
        int rest = label;
        for (int a = n - 1; a >= 0; --a) {
            const int mi = orders[static_cast<std::size_t>(a)];
            const int digit = rest % mi;
            rest /= mi;
            const double phase = mi == 1 ? 0.0 : (2.0 * digit + 1.0) * kPi / mi;
            pts(a, label) = std::polar(amp, phase);
        }
    }
    return ConstellationSet(std::move(pts), es, GeneratorTag::Papsk);
}

}  // namespace pskh
