#include "sigma2/quadrature.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <map>
#include <mutex>

namespace s2 {

const GaussLegendre& gauss_legendre(int n) {
    static std::mutex m;
    static std::map<int, GaussLegendre> cache;
    std::lock_guard<std::mutex> lk(m);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    if (n < 1) fail(Errc::invalid_argument, "Gauss-Legendre order must be positive");
    gsl_set_error_handler_off();
    gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(n);
    if (!t) fail(Errc::numerical, "cannot build Gauss-Legendre table");
    GaussLegendre r;
    for (int i = 0; i < n; ++i) {
        double xi, wi;
        gsl_integration_glfixed_point(-1.0, 1.0, i, &xi, &wi, t);
        r.x.push_back(xi);
        r.w.push_back(wi);
    }
    gsl_integration_glfixed_table_free(t);
    return cache.emplace(n, std::move(r)).first->second;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b, int n) {
    const auto& g = gauss_legendre(n);
    double h = 0.5 * (b - a), c = 0.5 * (a + b);
    std::vector<double> terms(n);
    for (int i = 0; i < n; ++i) terms[i] = g.w[i] * f(c + h * g.x[i]);
    return h * pairwise_sum(terms);
}

QuadratureRule product_gauss(const Chart& chart, int order, const std::vector<int>& passive_axes, int passive_order) {
    return product_gauss(chart, std::vector<int>(chart.dim, order), passive_axes, passive_order);
}

QuadratureRule product_gauss(const Chart& chart, const std::vector<int>& orders, const std::vector<int>& passive,
                             int passive_order) {
    const int d = chart.dim;
    auto is_passive = [&](int a) { return std::find(passive.begin(), passive.end(), a) != passive.end(); };
    std::vector<std::vector<double>> ax(d), aw(d);
    for (int a = 0; a < d; ++a) {
        int n = is_passive(a) ? 1 : orders[a];
        const auto& g = gauss_legendre(n);
        double lo = chart.ranges[a].lo, hi = chart.ranges[a].hi;
        double h = 0.5 * (hi - lo), c = 0.5 * (hi + lo);
        if (is_passive(a)) {
            // any interior value works; the integrand does not see it
            ax[a].push_back(lo + 0.3719 * (hi - lo));
            aw[a].push_back(hi - lo);
        } else {
            for (int i = 0; i < n; ++i) {
                ax[a].push_back(c + h * g.x[i]);
                aw[a].push_back(h * g.w[i]);
            }
        }
    }
    // density integrated over the passive block, per active node
    std::vector<Vec> pnodes;
    std::vector<double> pw;
    if (!passive.empty()) {
        const auto& g = gauss_legendre(passive_order);
        std::vector<int> idx(passive.size(), 0);
        for (;;) {
            Vec off = Vec::Zero(d);
            double w = 1;
            for (std::size_t j = 0; j < passive.size(); ++j) {
                int a = passive[j];
                double lo = chart.ranges[a].lo, hi = chart.ranges[a].hi;
                double h = 0.5 * (hi - lo), c = 0.5 * (hi + lo);
                off[a] = c + h * g.x[idx[j]];
                w *= h * g.w[idx[j]];
            }
            pnodes.push_back(off);
            pw.push_back(w);
            int j = static_cast<int>(passive.size()) - 1;
            while (j >= 0 && ++idx[j] == passive_order) idx[j--] = 0;
            if (j < 0) break;
        }
    }
    QuadratureRule r;
    r.kind = passive.empty() ? "product-gauss" : "reduced-1d";
    r.order = *std::max_element(orders.begin(), orders.end());
    r.passive_axes = passive;
    std::vector<int> idx(d, 0);
    for (;;) {
        Vec x(d);
        double wc = 1;
        for (int a = 0; a < d; ++a) {
            x[a] = ax[a][idx[a]];
            wc *= aw[a][idx[a]];
        }
        double wn;
        if (passive.empty()) {
            wn = wc * chart.density(x);
        } else {
            double act = 1;
            for (int a = 0; a < d; ++a)
                if (!is_passive(a)) act *= aw[a][idx[a]];
            std::vector<double> t(pnodes.size());
            for (std::size_t p = 0; p < pnodes.size(); ++p) {
                Vec y = x;
                for (int a : passive) y[a] = pnodes[p][a];
                t[p] = pw[p] * chart.density(y);
            }
            wn = act * pairwise_sum(t);
        }
        r.nodes.push_back(x);
        r.w_coord.push_back(wc);
        r.w_nu.push_back(wn);
        int a = d - 1;
        while (a >= 0 && ++idx[a] == static_cast<int>(ax[a].size())) idx[a--] = 0;
        if (a < 0) break;
    }
    return r;
}

}  // namespace s2
