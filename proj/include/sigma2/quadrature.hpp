#pragma once

#include "sigma2/geometry.hpp"

namespace s2 {

struct GaussLegendre {
    std::vector<double> x, w;  // on [-1, 1]
};

// Cached n-point rule (GSL tables), safe to call concurrently.
const GaussLegendre& gauss_legendre(int n);

double integrate_gl(const std::function<double(double)>& f, double a, double b, int n = 32);

struct QuadratureRule {
    std::string kind;  // "product-gauss" or "reduced-1d"
    int order = 0;
    std::vector<Vec> nodes;
    std::vector<double> w_nu;     // weights including the volume density
    std::vector<double> w_coord;  // plain coordinate measure
    std::vector<int> passive_axes;
    double volume() const { return pairwise_sum(w_nu); }
};

// Product Gauss-Legendre on the chart box; passive axes are collapsed to a single
// node whose weight carries the density integrated over those axes (order
// `passive_order`).
QuadratureRule product_gauss(const Chart& chart, int order, const std::vector<int>& passive_axes = {},
                             int passive_order = 64);
// Per-axis orders.
QuadratureRule product_gauss(const Chart& chart, const std::vector<int>& orders,
                             const std::vector<int>& passive_axes, int passive_order = 64);

}  // namespace s2
