// PSKH constellation container, distance structure and the text file format.
#pragma once

#include <algorithm>
#include <cstdio>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "pskh/core.hpp"

namespace pskh {

enum class GeneratorTag { Eqpa, Kmc, Pm, Papsk, External };

inline std::string to_string(GeneratorTag tag) {
    switch (tag) {
        case GeneratorTag::Eqpa: return "EQPA";
        case GeneratorTag::Kmc: return "KMC";
        case GeneratorTag::Pm: return "PM";
        case GeneratorTag::Papsk: return "PAPSK";
        case GeneratorTag::External: return "EXTERNAL";
    }
    return "EXTERNAL";
}

inline GeneratorTag generator_tag_from_string(const std::string& s) {
    if (s == "EQPA") return GeneratorTag::Eqpa;
    if (s == "KMC") return GeneratorTag::Kmc;
    if (s == "PM") return GeneratorTag::Pm;
    if (s == "PAPSK") return GeneratorTag::Papsk;
    if (s == "EXTERNAL") return GeneratorTag::External;
    throw DomainError("unknown generator tag '" + s + "'");
}

/// (re_1, im_1, ..., re_n, im_n)
inline RealVector to_real(const ComplexVector& x) {
    RealVector r(2 * x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        r(2 * i) = x(i).real();
        r(2 * i + 1) = x(i).imag();
    }
    return r;
}

inline ComplexVector from_real(const RealVector& r) {
    ComplexVector x(r.size() / 2);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = cplx(r(2 * i), r(2 * i + 1));
    return x;
}

inline bool is_power_of_two(long long m) { return m > 0 && (m & (m - 1)) == 0; }

inline int log2_exact(long long m) {
    int r = 0;
    while ((1LL << r) < m) ++r;
    return r;
}

/// M complex n-vectors of norm sqrt(Es). Points are the columns of an n x M matrix.
class ConstellationSet {
  public:
    static constexpr double kNormTolerance = 1e-9;

    ConstellationSet(ComplexMatrix points, double es, GeneratorTag tag)
        : points_(std::move(points)), es_(es), tag_(tag) {
        const auto m = points_.cols();
        require(points_.rows() >= 1, "constellation: need n >= 1");
        require(m >= 2 && is_power_of_two(m), "constellation: M must be a power of two >= 2");
        require(es > 0.0, "constellation: Es must be positive");
        rate_ = log2_exact(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            const double e = points_.col(i).squaredNorm();
            require(std::abs(e - es) <= kNormTolerance * es,
                    "constellation: point " + std::to_string(i) + " is off the sphere");
        }
        require(all_distinct(), "constellation: points must be pairwise distinct");
    }

    [[nodiscard]] int n() const { return static_cast<int>(points_.rows()); }
    [[nodiscard]] int size() const { return static_cast<int>(points_.cols()); }
    [[nodiscard]] int rate() const { return rate_; }
    [[nodiscard]] double es() const { return es_; }
    [[nodiscard]] GeneratorTag tag() const { return tag_; }
    [[nodiscard]] const ComplexMatrix& points() const { return points_; }
    [[nodiscard]] ComplexVector point(int i) const { return points_.col(i); }

  private:
    bool all_distinct() const {
        const auto m = points_.cols();
        std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        auto key_less = [this](Eigen::Index a, Eigen::Index b) {
            for (Eigen::Index r = 0; r < points_.rows(); ++r) {
                const cplx x = points_(r, a), y = points_(r, b);
                if (x.real() != y.real()) return x.real() < y.real();
                if (x.imag() != y.imag()) return x.imag() < y.imag();
            }
            return false;
        };
        std::sort(order.begin(), order.end(), key_less);
        for (std::size_t i = 1; i < order.size(); ++i)
            if (points_.col(order[i - 1]) == points_.col(order[i])) return false;
        return true;
    }

    ComplexMatrix points_;
    double es_;
    int rate_ = 0;
    GeneratorTag tag_;
};

// ---------------------------------------------------------------------------
// Distance structure
// ---------------------------------------------------------------------------

struct DistanceProfile {
    double d_min = 0.0;
    double d_nb_avg = 0.0;
    std::vector<int> nearest_neighbor_index;
    /// n_NB -> for each point, its n_NB nearest indices (ascending distance, ties to lower index).
    std::map<int, std::vector<std::vector<int>>> neighbor_tables;
};

/// Pairwise Euclidean distance matrix of the columns of `pts`.
inline RealMatrix pairwise_distances(const ComplexMatrix& pts) {
    const auto m = pts.cols();
    RealMatrix d(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        d(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < m; ++j) {
            const double v = (pts.col(i) - pts.col(j)).norm();
            d(i, j) = v;
            d(j, i) = v;
        }
    }
    return d;
}

/// n_nb nearest neighbours of every column of `pts`, self excluded.
inline std::vector<std::vector<int>> neighbor_table(const RealMatrix& dist, int n_nb) {
    const int m = static_cast<int>(dist.rows());
    require(n_nb >= 0 && n_nb <= m - 1, "neighbor_table: n_NB out of range");
    std::vector<std::vector<int>> table(static_cast<std::size_t>(m));
    std::vector<int> idx(static_cast<std::size_t>(m - 1));
    for (int i = 0; i < m; ++i) {
        int w = 0;
        for (int j = 0; j < m; ++j)
            if (j != i) idx[static_cast<std::size_t>(w++)] = j;
        std::partial_sort(idx.begin(), idx.begin() + n_nb, idx.end(), [&](int a, int b) {
            if (dist(i, a) != dist(i, b)) return dist(i, a) < dist(i, b);
            return a < b;
        });
        table[static_cast<std::size_t>(i)].assign(idx.begin(), idx.begin() + n_nb);
    }
    return table;
}

inline DistanceProfile distance_profile(const ComplexMatrix& pts, int n_nb) {
    const int m = static_cast<int>(pts.cols());
    require(m >= 2, "distance_profile: need at least two points");
    const RealMatrix dist = pairwise_distances(pts);
    DistanceProfile p;
    p.nearest_neighbor_index.resize(static_cast<std::size_t>(m));
    p.d_min = std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (int i = 0; i < m; ++i) {
        int best = -1;
        double bd = std::numeric_limits<double>::infinity();
        for (int j = 0; j < m; ++j) {
            if (j == i) continue;
            if (dist(i, j) < bd) {
                bd = dist(i, j);
                best = j;
            }
        }
        p.nearest_neighbor_index[static_cast<std::size_t>(i)] = best;
        p.d_min = std::min(p.d_min, bd);
        sum += bd;
    }
    p.d_nb_avg = sum / m;
    if (n_nb > 0) p.neighbor_tables[n_nb] = neighbor_table(dist, n_nb);
    return p;
}

inline DistanceProfile distance_profile(const ConstellationSet& a, int n_nb = 0) {
    return distance_profile(a.points(), n_nb);
}

// ---------------------------------------------------------------------------
// Text file format:
//   PSKH v1 n=<n> M=<M> Es=<Es> gen=<tag>
//   M lines of 2n floats (re/im interleaved, 17 significant digits)
// ---------------------------------------------------------------------------

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_constellation(std::ostream& os, const ConstellationSet& a) {
    os << "PSKH v1 n=" << a.n() << " M=" << a.size() << " Es=" << format_g17(a.es())
       << " gen=" << to_string(a.tag()) << '\n';
    for (int i = 0; i < a.size(); ++i) {
        for (int r = 0; r < a.n(); ++r) {
            const cplx v = a.points()(r, i);
            os << (r == 0 ? "" : " ") << format_g17(v.real()) << ' ' << format_g17(v.imag());
        }
        os << '\n';
    }
}

inline ConstellationSet read_constellation(std::istream& is) {
    std::string line;
    require(static_cast<bool>(std::getline(is, line)), "constellation file: missing header");
    std::istringstream hs(line);
    std::string magic, version;
    hs >> magic >> version;
    require(magic == "PSKH" && version == "v1", "constellation file: bad header '" + line + "'");
    int n = -1;
    long long m = -1;
    double es = -1.0;
    std::string gen;
    std::string field;
    while (hs >> field) {
        const auto eq = field.find('=');
        require(eq != std::string::npos, "constellation file: malformed field '" + field + "'");
        const std::string key = field.substr(0, eq), val = field.substr(eq + 1);
        try {
            if (key == "n") n = std::stoi(val);
            else if (key == "M") m = std::stoll(val);
            else if (key == "Es") es = std::stod(val);
            else if (key == "gen") gen = val;
            else throw DomainError("constellation file: unknown field '" + key + "'");
        } catch (const std::logic_error&) {
            throw DomainError("constellation file: bad value in '" + field + "'");
        }
    }
    require(n >= 1 && m >= 2 && es > 0.0 && !gen.empty(), "constellation file: incomplete header");
    ComplexMatrix pts(n, m);
    for (long long i = 0; i < m; ++i) {
        for (int r = 0; r < n; ++r) {
            double re = 0.0, im = 0.0;
            require(static_cast<bool>(is >> re >> im), "constellation file: truncated point data");
            pts(r, i) = cplx(re, im);
        }
    }
    return ConstellationSet(std::move(pts), es, generator_tag_from_string(gen));
}

}  // namespace pskh
