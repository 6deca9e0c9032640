#pragma once

#include "sigma2/run.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

namespace t {

using s2::Mat;
using s2::Vec;
using s2::pi;

inline double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

inline Vec v(std::initializer_list<double> xs) {
    Vec r(static_cast<int>(xs.size()));
    int i = 0;
    for (double x : xs) r[i++] = x;
    return r;
}

inline double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// interior points of a chart, seeded
inline std::vector<Vec> points(const s2::Chart& c, int n, std::uint64_t seed, double margin = 0.08) {
    std::mt19937_64 rng(seed);
    std::vector<Vec> out;
    for (int i = 0; i < n; ++i) out.push_back(s2::random_point(c, rng, margin));
    return out;
}

// Levi-Civita Christoffels Gamma^a_{bc} from central differences of the metric only.
inline std::array<Mat, 4> christoffel_oracle(const s2::Chart& c, const Vec& x, double h = 1e-5) {
    const int d = c.dim;
    std::array<Mat, 4> dg;
    for (int k = 0; k < d; ++k) {
        Vec p = x, m = x;
        p[k] += h;
        m[k] -= h;
        dg[k] = (c.metric(p) - c.metric(m)) / (2 * h);
    }
    Mat gi = c.metric(x).inverse();
    std::array<Mat, 4> G;
    for (int a = 0; a < d; ++a) {
        G[a] = Mat::Zero(d, d);
        for (int b = 0; b < d; ++b)
            for (int e = 0; e < d; ++e)
                for (int l = 0; l < d; ++l)
                    G[a](b, e) += 0.5 * gi(a, l) * (dg[b](l, e) + dg[e](l, b) - dg[l](b, e));
    }
    return G;
}

// Ricci tensor R_{bc} = d_a G^a_bc - d_c G^a_ab + G^a_ae G^e_bc - G^a_ce G^e_ab, nested differences.
inline Mat ricci_oracle(const s2::Chart& c, const Vec& x) {
    const int d = c.dim;
    const double h = 1e-4;
    auto G = christoffel_oracle(c, x);
    std::array<std::array<Mat, 4>, 4> dG;  // dG[k][a] = d_k Gamma^a
    for (int k = 0; k < d; ++k) {
        Vec p = x, m = x;
        p[k] += h;
        m[k] -= h;
        auto Gp = christoffel_oracle(c, p), Gm = christoffel_oracle(c, m);
        for (int a = 0; a < d; ++a) dG[k][a] = (Gp[a] - Gm[a]) / (2 * h);
    }
    Mat R = Mat::Zero(d, d);
    for (int b = 0; b < d; ++b)
        for (int e = 0; e < d; ++e) {
            double s = 0;
            for (int a = 0; a < d; ++a) {
                s += dG[a][a](b, e) - dG[e][a](a, b);
                for (int l = 0; l < d; ++l) s += G[a](a, l) * G[l](b, e) - G[a](e, l) * G[l](a, b);
            }
            R(b, e) = s;
        }
    return R;
}

}  // namespace t
