#include "sigma2/energy.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_min.h>

#include <cmath>
#include <sstream>

namespace s2 {

namespace {

bool is_s3(const Chart& c) {
    return c.family == "s3_join" || c.family == "s3_suspension" || c.family == "s3_unit_tangent";
}

// undeformed round chart (deformations append "+..." to the name)
bool is_round(const Chart& c) { return c.name.find('+') == std::string::npos; }

std::string where(const Vec& x) {
    std::ostringstream os;
    os << "(";
    for (int i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
    os << ")";
    return os.str();
}

double snap_to(double v, double step, double tol, bool& ok) {
    double s = std::round(v / step) * step;
    ok = std::abs(v - s) < tol;
    return ok ? s : v;
}

}  // namespace

QuadratureRule default_rule(const MapFamily& map, const QuadOrders& q) {
    const Chart& c = *map.domain;
    const auto& passive = map.passive_axes;
    int active = c.dim - static_cast<int>(passive.size());
    if (c.family == "r3_spherical") {
        std::vector<int> orders{q.order_radial, q.order_3d, q.order_3d};
        return product_gauss(c, orders, passive);
    }
    if (!passive.empty() && active == 1) return product_gauss(c, q.order_1d, passive);
    int o = c.dim <= 2 ? q.order_1d : c.dim == 3 ? q.order_3d : q.order_4d;
    return product_gauss(c, o, passive);
}

EnergyReport integrate_energy(const MapFamily& map, const QuadratureRule& rule, double kappa) {
    if (!(kappa >= 0)) fail(Errc::invalid_argument, "integrate_energy: kappa must be nonnegative");
    const std::size_t N = rule.nodes.size();
    std::vector<double> t1(N), t2(N), t4(N);
    const int n = map.codomain->dim;
    parallel_for(N, [&](std::size_t i) {
        DistortionData d = analyze_point(map, rule.nodes[i]);
        double w = rule.w_nu[i];
        t1[i] = 0.5 * w * d.s1();
        t2[i] = 0.5 * w * d.s2();
        t4[i] = w * four_energy_density(d);
        if (!std::isfinite(t1[i]) || !std::isfinite(t2[i]))
            fail(Errc::numerical, "integrate_energy: non-finite density at node " + where(rule.nodes[i]));
    });
    EnergyReport r;
    r.map = map.spec;
    r.rule = rule.kind;
    r.order = rule.order;
    r.nodes = static_cast<int>(N);
    r.kappa = kappa;
    r.e_sigma1 = pairwise_sum(t1);
    r.e_sigma2 = pairwise_sum(t2);
    r.e_4 = pairwise_sum(t4);
    r.e_total = r.e_sigma1 + kappa * r.e_sigma2;
    r.volume = rule.volume();
    int rk = std::min(map.domain->dim, n);
    r.newton_gap = (rk >= 2 ? (rk - 1.0) / rk * r.e_4 : 0.0) - r.e_sigma2;
    r.charge.kind = "none";
    r.bound.kind = "none";
    return r;
}

Charge degree(const MapFamily& map, const QuadratureRule& rule) {
    Charge c;
    c.kind = "degree";
    const Chart& M = *map.domain;
    const Chart& N = *map.codomain;
    if (M.dim != N.dim) fail(Errc::domain, "degree: domain and codomain dimensions differ");
    if (!M.compact || !N.compact || !std::isfinite(N.volume))
        fail(Errc::domain, "degree: needs compact domain and codomain ('" + M.name + "' -> '" + N.name +
                               "'); the integral of the Jacobian over a non-compact chart is not a topological charge");
    const std::size_t K = rule.nodes.size();
    std::vector<double> t(K);
    parallel_for(K, [&](std::size_t i) {
        const Vec& x = rule.nodes[i];
        Mat J = jacobian(map, x);
        // signed volume ratio times nu: a scalar, so passive-axis collapse stays exact
        t[i] = rule.w_nu[i] * J.determinant() * N.density(map.eval(x)) / M.density(x);
    });
    c.raw = pairwise_sum(t) * M.orientation * N.orientation / N.volume;
    c.snapped = snap_to(c.raw, 1.0, 1e-4, c.snapped_ok);
    return c;
}

PotentialCheck verify_potential(const MapFamily& map, int n_grid) {
    if (!map.hopf_potential) fail(Errc::domain, "hopf_invariant: family '" + map.name + "' supplies no potential");
    PotentialCheck pc;
    for (const Vec& x : sample_grid(*map.domain, n_grid, 0.1)) {
        Mat dA = exterior_derivative(map.hopf_potential, x, map.domain->dim);
        Mat F = pullback_area_form(map, x);
        double e = (dA - F).cwiseAbs().maxCoeff();
        if (pc.where.size() == 0 || e > pc.max_defect) {
            pc.max_defect = std::max(pc.max_defect, e);
            pc.where = x;
        }
    }
    pc.ok = pc.max_defect < 1e-7;
    return pc;
}

Charge hopf_invariant(const MapFamily& map, const QuadratureRule& rule) {
    if (map.domain->dim != 3 || map.codomain->family != "s2")
        fail(Errc::domain, "hopf_invariant: needs a map from a 3-manifold to s2");
    PotentialCheck pc = verify_potential(map);
    if (!pc.ok) {
        std::ostringstream os;
        os << "hopf_invariant: potential check failed, |dA - phi^*Omega| = " << pc.max_defect << " at "
           << where(pc.where);
        fail(Errc::numerical, os.str());
    }
    const std::size_t K = rule.nodes.size();
    std::vector<double> t(K);
    parallel_for(K, [&](std::size_t i) {
        const Vec& x = rule.nodes[i];
        Vec A = map.hopf_potential(x);
        Mat F = pullback_area_form(map, x);
        t[i] = rule.w_nu[i] * (A[0] * F(1, 2) + A[1] * F(2, 0) + A[2] * F(0, 1)) / map.domain->density(x);
    });
    Charge c;
    c.kind = "hopf";
    c.raw = pairwise_sum(t) * map.domain->orientation / (4 * pi * pi);
    c.snapped = snap_to(c.raw, 0.25, 1e-4, c.snapped_ok);
    return c;
}

void bounds_report(const MapFamily& map, EnergyReport& r, const QuadratureRule& rule) {
    const Chart& M = *map.domain;
    const Chart& N = *map.codomain;
    Bound& b = r.bound;
    if (M.dim == 3 && N.family == "s2") {
        try {
            r.charge = hopf_invariant(map, rule);
        } catch (const Error& e) {
            r.charge = Charge{"hopf", 0, 0, false, e.what()};
            return;
        }
        double q = std::abs(r.charge.snapped);
        std::ostringstream os;
        os << "E >= c |Q|^(3/4), |Q|^(3/4) = " << std::pow(q, 0.75) << ", c not determined";
        b.vakulenko = os.str();
        if (!(is_s3(M) && is_round(M) && M.radius == 1.0)) return;
        b.kind = "faddeev";
        b.value = 16 * pi * pi * q;
        b.energy = r.e_sigma2;
    } else if (M.dim == N.dim) {
        try {
            r.charge = degree(map, rule);
        } catch (const Error& e) {
            r.charge = Charge{"degree", 0, 0, false, e.what()};
            return;
        }
        if (!(M.dim == 3 && is_s3(N) && is_round(N) && N.radius == 1.0)) return;
        b.kind = "skyrme";
        // 6 pi^2 |deg| needs kappa >= 1; for smaller kappa AM-GM gives sqrt(kappa) in front
        b.value = 6 * pi * pi * std::abs(r.charge.snapped) * std::min(1.0, std::sqrt(r.kappa));
        b.energy = r.e_total;
    } else {
        return;
    }
    b.slack = b.energy - b.value;
    double sc = std::max(b.value, 1e-300);
    b.satisfied = b.slack >= -1e-9 * sc;
    b.attained = std::abs(b.slack) < 1e-6 * sc;
}

namespace {

struct GsCtx {
    const MapFamily* map;
    double kappa;
    double r0;
    const QuadOrders* q;
};

double energy_at_radius(double R, void* p) {
    auto* c = static_cast<GsCtx*>(p);
    auto base = std::make_shared<MapFamily>(*c->map);
    MapPtr m = with_domain(base, radius_scale(c->map->domain, R / c->r0));
    return integrate_energy(*m, default_rule(*m, *c->q), c->kappa).e_total;
}

}  // namespace

RadiusOpt minimize_over_radius(const MapFamily& map, double kappa, const QuadOrders& q) {
    if (!is_s3(*map.domain))
        fail(Errc::domain, "minimize_over_radius: domain '" + map.domain->name + "' is not a 3-sphere family");
    if (!(kappa > 0)) fail(Errc::invalid_argument, "minimize_over_radius: kappa must be positive");
    QuadratureRule rule = default_rule(map, q);
    EnergyReport e = integrate_energy(map, rule, kappa);
    RadiusOpt o;
    double R0 = map.domain->radius;
    o.a = e.e_sigma1 / R0;
    o.b = e.e_sigma2 * R0;
    if (!(o.a > 0) || !(o.b > 0)) fail(Errc::domain, "minimize_over_radius: degenerate map (E_sigma1 or E_sigma2 is 0)");
    o.r_star = std::sqrt(kappa * o.b / o.a);
    o.e_min = 2 * std::sqrt(kappa * o.a * o.b);
    double deg = 1;
    if (map.codomain->dim == 3 && map.domain->compact && map.codomain->compact) {
        Charge c = degree(map, rule);
        if (c.snapped_ok && c.snapped != 0) deg = std::abs(c.snapped);
    }
    o.ratio_total = o.e_min / (12 * pi * pi);
    o.ratio = o.ratio_total / deg;

    // golden-section pass with genuine quadrature on rescaled domains
    GsCtx ctx{&map, kappa, R0, &q};
    int jbest = 0;
    double ebest = std::numeric_limits<double>::infinity();
    for (int j = -6; j <= 6; ++j) {
        double v = energy_at_radius(R0 * std::ldexp(1.0, j), &ctx);
        if (v < ebest) {
            ebest = v;
            jbest = j;
        }
    }
    if (jbest == -6 || jbest == 6) fail(Errc::numerical, "minimize_over_radius: minimum outside the scan range");
    gsl_set_error_handler_off();
    gsl_function F{&energy_at_radius, &ctx};
    gsl_min_fminimizer* s = gsl_min_fminimizer_alloc(gsl_min_fminimizer_goldensection);
    double lo = R0 * std::ldexp(1.0, jbest - 1), hi = R0 * std::ldexp(1.0, jbest + 1), mid = R0 * std::ldexp(1.0, jbest);
    if (gsl_min_fminimizer_set(s, &F, mid, lo, hi) != GSL_SUCCESS) {
        gsl_min_fminimizer_free(s);
        fail(Errc::numerical, "minimize_over_radius: golden-section bracket rejected");
    }
    for (int it = 0; it < 300; ++it) {
        gsl_min_fminimizer_iterate(s);
        if (gsl_min_test_interval(gsl_min_fminimizer_x_lower(s), gsl_min_fminimizer_x_upper(s), 0.0, 1e-10) ==
            GSL_SUCCESS)
            break;
    }
    o.gs_r = gsl_min_fminimizer_x_minimum(s);
    o.gs_e = gsl_min_fminimizer_f_minimum(s);
    gsl_min_fminimizer_free(s);
    o.gs_rel_err = std::abs(o.gs_e - o.e_min) / o.e_min;
    return o;
}

}  // namespace s2
