#include "sigma2/euler_lagrange.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace s2 {

namespace {

// Eigenframe near x continued from the reference frame at x: each reference vector is
// projected onto the eigenspace of its cluster at y, then orthonormalised in g(y).
Mat continued_frame(const MapFamily& map, const DistortionData& ref, const Vec& y) {
    if ((y - ref.x).cwiseAbs().maxCoeff() == 0) return ref.frame;
    DistortionData dy = analyze_point(map, y);
    const int m = ref.lambda2.size();
    Mat g = map.domain->metric(y);
    Mat E(m, m);
    for (int i = 0; i < m; ++i) {
        Vec v = Vec::Zero(m);
        for (int j = 0; j < m; ++j)
            if (ref.cluster[j] == ref.cluster[i]) v += dy.frame.col(j) * dy.frame.col(j).dot(g * ref.frame.col(i));
        E.col(i) = v;
    }
    gram_schmidt_columns(g, E);
    return E;
}

std::string pt(const Vec& x) {
    std::ostringstream os;
    os << "(";
    for (int i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
    os << ")";
    return os.str();
}

double default_tol(const MapFamily& map, const ResidualOptions& o) {
    if (o.tol >= 0) return o.tol;
    return map.analytic() ? 1e-6 : 1e-4;
}

ResidualReport start(const std::string& system, const MapFamily& map, const ResidualOptions& o) {
    ResidualReport r;
    r.system = system;
    r.map = map.spec;
    r.grid = o.grid.empty() ? default_residual_grid(map) : o.grid;
    r.tol = default_tol(map, o);
    return r;
}

void require_rank(const PointGeometry& p, int want, const std::string& who) {
    if (p.rank < want) fail(Errc::domain, who + ": rank drop (map not submersive) at " + pt(p.d.x));
}

// fills residuals with fn(geometry) -> per-equation vector, point-parallel
template <class Fn>
void evaluate(ResidualReport& r, const MapFamily& map, const ResidualOptions& o, Fn fn) {
    r.residuals.assign(r.grid.size(), {});
    parallel_for(r.grid.size(), [&](std::size_t i) {
        PointGeometry p = point_geometry(map, r.grid[i], o.flip_mask);
        r.residuals[i] = fn(p);
    });
    r.finalize();
}

std::vector<std::string> numbered(const std::string& base, int n) {
    std::vector<std::string> v;
    for (int i = 1; i <= n; ++i) v.push_back(base + std::to_string(i));
    return v;
}

}  // namespace

double PointGeometry::vertical_trace(int k) const {
    double s = 0;
    for (int g = rank; g < G.dim; ++g) s += G(g, g, k);
    return s;
}

PointGeometry point_geometry(const MapFamily& map, const Vec& x, unsigned flip_mask) {
    PointGeometry p;
    p.d = analyze_point(map, x);
    const int m = p.d.lambda2.size();
    for (int i = 0; i < m; ++i)
        if (flip_mask & (1u << i)) p.d.frame.col(i) *= -1;
    double sc = p.d.scale();
    p.rank = 0;
    for (int i = 0; i < m; ++i)
        if (p.d.lambda2[i] > 1e-8 * sc && p.d.s1() > 0) ++p.rank;
    const DistortionData& ref = p.d;
    FrameField F{map.domain, [&map, &ref](const Vec& y) { return continued_frame(map, ref, y); }};
    p.G = connection_coeffs(*map.domain, F, x);
    p.dl = Mat::Zero(m, m);
    const double h = fd_step2;
    for (int k = 0; k < m; ++k) {
        Vec e = p.d.frame.col(k);
        Vec lp = analyze_point(map, x + h * e).lambda2;
        Vec lm = analyze_point(map, x - h * e).lambda2;
        for (int i = 0; i < m; ++i) p.dl(k, i) = (lp[i] - lm[i]) / (2 * h);
    }
    return p;
}

double harmonic_component(const PointGeometry& p, int k) {
    const Vec& l = p.d.lambda2;
    const int m = l.size();
    double Ee = 0.5 * p.dl.row(k).sum();
    double s = p.dl(k, k) - Ee;
    for (int i = 0; i < m; ++i)
        if (i != k) s += (l[i] - l[k]) * p.G(i, i, k);
    return s;
}

double sigma2_component(const PointGeometry& p, int k) {
    const Vec& l = p.d.lambda2;
    const int r = p.rank;
    double e = 0.5 * p.d.s1();
    double Ee = 0.5 * p.dl.row(k).sum();
    double S = 0;
    for (int i = 0; i < r; ++i)
        if (i != k) S += (l[i] - l[k]) * p.G(i, i, k);
    double V = p.vertical_trace(k);
    double lk = l[k], Ek = p.dl(k, k);
    double harm = Ek - Ee + S - lk * V;
    double P = 2 * e * harm + 2 * lk * Ee - 0.5 * lk * Ek;
    for (int i = 0; i < r; ++i)
        if (i != k) P -= l[i] * (-0.5 * p.dl(k, i) + (l[i] - lk) * p.G(i, i, k));
    P -= lk * (Ek + S - lk * V);
    return P;
}

void ResidualReport::finalize() {
    std::size_t ne = equations.size();
    sup.assign(ne, 0.0);
    l2.assign(ne, 0.0);
    for (const auto& row : residuals)
        for (std::size_t j = 0; j < ne && j < row.size(); ++j) {
            double a = std::abs(row[j]);
            if (!(a <= sup[j])) sup[j] = std::isnan(a) ? std::numeric_limits<double>::infinity() : a;
            l2[j] += row[j] * row[j];
        }
    for (auto& v : l2) v = residuals.empty() ? 0.0 : std::sqrt(v / residuals.size());
    critical = true;
    for (double v : sup) critical = critical && v < tol;
}

double ResidualReport::sup_all() const {
    double s = 0;
    for (double v : sup) s = std::max(s, v);
    return s;
}

std::vector<Vec> default_residual_grid(const MapFamily& map) {
    const Chart& c = *map.domain;
    int active = c.dim - static_cast<int>(map.passive_axes.size());
    if (!map.passive_axes.empty() && active == 1) {
        int a = 0;
        while (std::find(map.passive_axes.begin(), map.passive_axes.end(), a) != map.passive_axes.end()) ++a;
        std::vector<Vec> g;
        const int n = 64;
        for (int i = 0; i < n; ++i) {
            Vec x(c.dim);
            for (int b = 0; b < c.dim; ++b) x[b] = c.ranges[b].lo + 0.3719 * c.ranges[b].length();
            double lo = c.ranges[a].lo, L = c.ranges[a].length();
            double m = c.periodic[a] ? 0.0 : 0.1;
            x[a] = lo + L * (m + (1 - 2 * m) * (i + 0.5) / n);
            g.push_back(x);
        }
        return g;
    }
    int n = c.dim <= 2 ? 8 : c.dim == 3 ? 4 : 3;
    return sample_grid(c, n, 0.1);
}

ResidualReport residual_2target(const MapFamily& map, const ResidualOptions& o) {
    if (map.codomain->dim != 2) fail(Errc::domain, "residual_2target: codomain must be 2-dimensional");
    ResidualReport r = start("fh", map, o);
    const int m = map.domain->dim;
    r.equations = {"E1", "E2"};
    evaluate(r, map, o, [&](const PointGeometry& p) {
        require_rank(p, 2, "residual_2target");
        if (p.d.lambda2[1] <= 1e-10) fail(Errc::domain, "residual_2target: lambda_2^2 <= 1e-10 at " + pt(p.d.x));
        std::vector<double> v(2);
        for (int k = 0; k < 2; ++k) {
            double dln = 0.5 * (p.dl(k, 0) / p.d.lambda2[0] + p.dl(k, 1) / p.d.lambda2[1]);
            v[k] = dln - (m > 2 ? p.vertical_trace(k) : 0.0);
        }
        return v;
    });
    return r;
}

ResidualReport residual_area2d(const MapFamily& map, const ResidualOptions& o) {
    if (map.domain->dim != 2 || map.codomain->dim != 2)
        fail(Errc::domain, "residual_area2d: needs a map between surfaces");
    ResidualReport r = residual_2target(map, o);
    r.system = "area2d";
    return r;
}

ResidualReport residual_3target(const MapFamily& map, const ResidualOptions& o) {
    if (map.codomain->dim != 3) fail(Errc::domain, "residual_3target: codomain must be 3-dimensional");
    ResidualReport r = start("sig3", map, o);
    const int m = map.domain->dim;
    r.equations = numbered("E", 3);
    ResidualReport harm = start("harmonic", map, o);
    harm.equations = numbered("E", 3);
    harm.residuals.assign(harm.grid.size(), {});
    r.residuals.assign(r.grid.size(), {});
    parallel_for(r.grid.size(), [&](std::size_t n) {
        PointGeometry p = point_geometry(map, r.grid[n], o.flip_mask);
        require_rank(p, 3, "residual_3target");
        const Vec& l = p.d.lambda2;
        std::vector<double> v(3), hv(3);
        for (int k = 0; k < 3; ++k) {
            int a = (k + 1) % 3, b = (k + 2) % 3;
            double Ek = 0.5 * (p.dl(k, k) * l[a] + l[k] * p.dl(k, a) + p.dl(k, k) * l[b] + l[k] * p.dl(k, b) -
                               p.dl(k, a) * l[b] - l[a] * p.dl(k, b));
            v[k] = Ek + l[b] * (l[a] - l[k]) * p.G(a, a, k) + l[a] * (l[b] - l[k]) * p.G(b, b, k) -
                   (m > 3 ? l[k] * (l[a] + l[b]) * p.vertical_trace(k) : 0.0);
            hv[k] = harmonic_component(p, k);
        }
        r.residuals[n] = v;
        harm.residuals[n] = hv;
    });
    r.finalize();
    harm.finalize();
    r.companions.push_back(harm);
    return r;
}

ResidualReport residual_contact(const MapFamily& map, const ResidualOptions& o) {
    if (map.domain->dim != 3 || map.codomain->dim != 3)
        fail(Errc::domain, "residual_contact: needs a map between 3-manifolds");
    ResidualReport r = start("contactsig3", map, o);
    r.equations = {"E1", "E2", "E3"};
    ResidualReport cond = start("condition_c", map, o);
    cond.equations = {"E1", "E2", "E3"};
    ResidualReport harm = start("harmonic", map, o);
    harm.equations = {"E1", "E2", "E3"};
    const std::size_t N = r.grid.size();
    r.residuals.assign(N, {});
    cond.residuals.assign(N, {});
    harm.residuals.assign(N, {});
    std::vector<int> reeb(N);
    parallel_for(N, [&](std::size_t n) {
        PointGeometry p = point_geometry(map, r.grid[n], o.flip_mask);
        require_rank(p, 3, "residual_contact");
        const Vec& l = p.d.lambda2;
        int q1 = reeb_eigen_index(*map.domain, p.d);
        if (q1 < 0) q1 = product_eigen_index(p.d);
        int q2 = (q1 + 1) % 3, q3 = (q1 + 2) % 3;
        if (l[q3] > l[q2]) std::swap(q2, q3);
        double dev = std::abs(l[q1] - l[q2] * l[q3]) / std::max(l[q1], 1e-300);
        if (dev > 1e-8)
            fail(Errc::domain, "residual_contact: spectrum is not of contact type at " + pt(p.d.x));
        reeb[n] = q1;
        double L = l[q2], K = l[q1];
        // E_j of lambda^2 and of k^2 / lambda^2
        auto dL = [&](int j) { return p.dl(j, q2); };
        auto dQ = [&](int j) { return p.dl(j, q1) / L - K * p.dl(j, q2) / (L * L); };
        double Q = K / L;
        std::vector<double> v(3);
        v[0] = 0.5 * (dL(q1) + dQ(q1)) + (L - K) / L * p.G(q2, q2, q1) + L * (1 / L - 1) * p.G(q3, q3, q1);
        v[1] = 0.5 * (dL(q2) - dQ(q2)) + (Q - L) * p.G(q3, q3, q2) + (K - L) / L * p.G(q1, q1, q2);
        v[2] = 0.5 * (dQ(q3) - dL(q3)) + L * (1 - 1 / L) * p.G(q1, q1, q3) + (L - Q) * p.G(q2, q2, q3);
        r.residuals[n] = v;
        std::vector<double> c(3), h(3);
        int ord[3] = {q1, q2, q3};
        for (int j = 0; j < 3; ++j) {
            int J = ord[j];
            c[j] = 0.5 * (p.dl(J, q2) - p.dl(J, q3)) - (l[q2] - l[q3]) * (p.G(q2, q2, J) + p.G(q3, q3, J));
            h[j] = harmonic_component(p, J);
        }
        cond.residuals[n] = c;
        harm.residuals[n] = h;
    });
    r.finalize();
    cond.finalize();
    harm.finalize();
    int first = reeb.empty() ? -1 : reeb[0];
    for (int q : reeb)
        if (q != first) first = -1;
    r.info["reeb_index"] = first;
    r.companions.push_back(cond);
    r.companions.push_back(harm);
    return r;
}

ResidualReport residual_4harmonic(const MapFamily& map, const ResidualOptions& o) {
    const int m = map.domain->dim, n = map.codomain->dim;
    ResidualReport r = start("fourharm", map, o);
    r.equations = numbered("E", n);
    evaluate(r, map, o, [&](const PointGeometry& p) {
        require_rank(p, n, "residual_4harmonic");
        const Vec& l = p.d.lambda2;
        double hwc = (l[0] - l[n - 1]) / p.d.scale();
        if (hwc > 1e-8) fail(Errc::domain, "residual_4harmonic: map is not horizontally conformal at " + pt(p.d.x));
        std::vector<double> v(n);
        double s1 = p.d.s1();
        for (int k = 0; k < n; ++k) {
            double dlnl = 0.5 * p.dl.row(k).sum() / s1;  // E_k ln(lambda), lambda^2 = sigma_1 / n
            v[k] = (n - 4) * dlnl + (m - n) * (m > n ? p.vertical_trace(k) / (m - n) : 0.0);
        }
        return v;
    });
    return r;
}

ResidualReport residual_harmonic(const MapFamily& map, const ResidualOptions& o) {
    const int n = std::min(map.domain->dim, map.codomain->dim);
    ResidualReport r = start("harmonic", map, o);
    r.equations = numbered("E", n);
    evaluate(r, map, o, [&](const PointGeometry& p) {
        std::vector<double> v(n);
        for (int k = 0; k < n; ++k) v[k] = k < p.rank ? harmonic_component(p, k) : 0.0;
        return v;
    });
    return r;
}

ResidualReport residual_sigma2(const MapFamily& map, const ResidualOptions& o) {
    const int n = std::min(map.domain->dim, map.codomain->dim);
    ResidualReport r = start("sigma2", map, o);
    r.equations = numbered("E", n);
    evaluate(r, map, o, [&](const PointGeometry& p) {
        std::vector<double> v(n);
        for (int k = 0; k < n; ++k) v[k] = k < p.rank ? sigma2_component(p, k) : 0.0;
        return v;
    });
    return r;
}

ResidualReport residual_coupled(const MapFamily& map, const ResidualOptions& o) {
    const int n = std::min(map.domain->dim, map.codomain->dim);
    ResidualReport r = start("coupled", map, o);
    r.equations = numbered("E", n);
    r.info["kappa"] = o.kappa;
    evaluate(r, map, o, [&](const PointGeometry& p) {
        std::vector<double> v(n);
        for (int k = 0; k < n; ++k)
            v[k] = k < p.rank ? harmonic_component(p, k) + o.kappa * sigma2_component(p, k) : 0.0;
        return v;
    });
    return r;
}

ResidualReport residual_by_name(const std::string& s, const MapFamily& map, const ResidualOptions& o) {
    if (s == "fh") return residual_2target(map, o);
    if (s == "area2d") return residual_area2d(map, o);
    if (s == "sig3") return residual_3target(map, o);
    if (s == "contactsig3") return residual_contact(map, o);
    if (s == "fourharm") return residual_4harmonic(map, o);
    if (s == "harmonic") return residual_harmonic(map, o);
    if (s == "sigma2") return residual_sigma2(map, o);
    if (s == "coupled") return residual_coupled(map, o);
    fail(Errc::invalid_argument, "unknown residual system '" + s + "'");
}

double nomizu_ode(const Profile& a, int k, double s) {
    double al = a(s), d1 = a.d1(s), d2 = a.d2(s);
    double kk = k;
    return d2 * (kk * kk - 2 * kk * std::sin(2 * al) * std::sin(2 * s) + 1) -
           2 * kk * d1 * d1 * std::sin(2 * s) * std::cos(2 * al) +
           2 * d1 * ((kk * kk + 1) * std::tan(2 * s) - 2 * kk * std::sin(2 * al) / std::cos(2 * s)) +
           kk * kk * std::sin(4 * al);
}

ResidualReport nomizu_residual(const Profile& a, int k, int n_points, double tol) {
    if (k % 2 == 0) fail(Errc::invalid_argument, "nomizu_residual: k must be odd");
    if (n_points < 1) fail(Errc::invalid_argument, "nomizu_residual: need at least one point");
    ResidualReport r;
    r.system = "nomizu";
    r.map = "nomizu(" + a.name() + "," + std::to_string(k) + ")";
    r.equations = {"ode"};
    r.tol = tol;
    const double hi = pi / 4 - 1e-3;
    for (int i = 0; i < n_points; ++i) {
        double s = hi * (i + 0.5) / n_points;
        if (s >= hi) fail(Errc::domain, "nomizu_residual: grid touches the pole margin");
        Vec x(1);
        x[0] = s;
        r.grid.push_back(x);
        r.residuals.push_back({nomizu_ode(a, k, s)});
    }
    r.finalize();
    bool bc = std::abs(a(0)) <= 1e-10 && std::abs(a(pi / 4) - pi / 4) <= 1e-10;
    r.info["boundary_ok"] = bc;
    return r;
}

namespace {

struct JoinTerms {
    double L1, L2, L3, L1p, L2p, L3p, cot, tan;
};

JoinTerms join_terms(const Profile& a, int k, int l, double s) {
    double al = a(s), d1 = a.d1(s), d2 = a.d2(s);
    double ss = std::sin(s), cs = std::cos(s), sa = std::sin(al), ca = std::cos(al);
    double k2 = double(k) * k, l2 = double(l) * l;
    JoinTerms t;
    t.L1 = d1 * d1;
    t.L2 = l2 * sa * sa / (ss * ss);
    t.L3 = k2 * ca * ca / (cs * cs);
    t.L1p = 2 * d1 * d2;
    t.L2p = l2 * (std::sin(2 * al) * d1 * ss * ss - sa * sa * std::sin(2 * s)) / std::pow(ss, 4);
    t.L3p = k2 * (-std::sin(2 * al) * d1 * cs * cs + ca * ca * std::sin(2 * s)) / std::pow(cs, 4);
    t.cot = cs / ss;
    t.tan = ss / cs;
    return t;
}

}  // namespace

double alpha_join_s_equation(const Profile& a, int k, int l, double s) {
    JoinTerms t = join_terms(a, k, l, s);
    double E = 0.5 * (t.L1p * t.L2 + t.L1 * t.L2p + t.L1p * t.L3 + t.L1 * t.L3p - t.L2p * t.L3 - t.L2 * t.L3p);
    return E - t.L3 * (t.L2 - t.L1) * t.cot + t.L2 * (t.L3 - t.L1) * t.tan;
}

double alpha_join_s_harmonic(const Profile& a, int k, int l, double s) {
    JoinTerms t = join_terms(a, k, l, s);
    return 0.5 * (t.L1p - t.L2p - t.L3p) - (t.L2 - t.L1) * t.cot + (t.L3 - t.L1) * t.tan;
}

namespace {

struct ProfileProblem {
    int k, l, N;
    double kappa, h;
    const GaussLegendre* gl;
    // integrands of A and B per unit (2 pi)^2 / 2 and their partials
    void integrand(double s, double a, double p, double& i1, double& i2, double& da1, double& dp1, double& da2,
                   double& dp2) const {
        double ss = std::sin(s), cs = std::cos(s), sa = std::sin(a), ca = std::cos(a);
        double k2 = double(k) * k, l2 = double(l) * l;
        double L1 = p * p, L2 = l2 * sa * sa / (ss * ss), L3 = k2 * ca * ca / (cs * cs);
        double s2a = std::sin(2 * a);
        double D2 = l2 * s2a / (ss * ss), D3 = -k2 * s2a / (cs * cs);
        double w = cs * ss;
        i1 = (L1 + L2 + L3) * w;
        i2 = (L1 * (L2 + L3) + L2 * L3) * w;
        da1 = (D2 + D3) * w;
        dp1 = 2 * p * w;
        da2 = (L1 * (D2 + D3) + D2 * L3 + L2 * D3) * w;
        dp2 = 2 * p * (L2 + L3) * w;
    }
    // A, B (unit sphere energies) and gradients with respect to all nodal values
    void eval(const std::vector<double>& al, double& A, double& B, std::vector<double>* gA,
              std::vector<double>* gB) const {
        const double c = 0.5 * 4 * pi * pi;
        std::vector<double> ta(N), tb(N);
        if (gA) {
            gA->assign(N + 1, 0.0);
            gB->assign(N + 1, 0.0);
        }
        for (int e = 0; e < N; ++e) {
            double s0 = e * h;
            double p = (al[e + 1] - al[e]) / h;
            double sa = 0, sb = 0;
            for (std::size_t q = 0; q < gl->x.size(); ++q) {
                double t = 0.5 * (gl->x[q] + 1), w = 0.5 * gl->w[q] * h;
                double s = s0 + t * h;
                double a = al[e] * (1 - t) + al[e + 1] * t;
                double i1, i2, da1, dp1, da2, dp2;
                integrand(s, a, p, i1, i2, da1, dp1, da2, dp2);
                sa += w * i1;
                sb += w * i2;
                if (gA) {
                    (*gA)[e] += c * w * (da1 * (1 - t) - dp1 / h);
                    (*gA)[e + 1] += c * w * (da1 * t + dp1 / h);
                    (*gB)[e] += c * w * (da2 * (1 - t) - dp2 / h);
                    (*gB)[e + 1] += c * w * (da2 * t + dp2 / h);
                }
            }
            ta[e] = c * sa;
            tb[e] = c * sb;
        }
        A = pairwise_sum(ta);
        B = pairwise_sum(tb);
    }
    double norm() const { return 12 * pi * pi * std::abs(double(k) * l); }
    double objective(double A, double B) const { return 2 * std::sqrt(kappa * A * B) / norm(); }
};

// (K + M) d = g on interior nodes (P1 stiffness plus mass), Thomas algorithm
std::vector<double> sobolev_direction(const std::vector<double>& g, int N, double h) {
    int n = N - 1;
    std::vector<double> a(n, -1 / h + h / 6), b(n, 2 / h + 4 * h / 6), c(n, -1 / h + h / 6), d(n);
    for (int i = 0; i < n; ++i) d[i] = g[i + 1];
    for (int i = 1; i < n; ++i) {
        double m = a[i] / b[i - 1];
        b[i] -= m * c[i - 1];
        d[i] -= m * d[i - 1];
    }
    std::vector<double> x(N + 1, 0.0);
    x[n] = d[n - 1] / b[n - 1];
    for (int i = n - 2; i >= 0; --i) x[i + 1] = (d[i] - c[i] * x[i + 2]) / b[i];
    return x;
}

// sup over the inner 80% of element midpoints of the sigma_2 part and of the coupled
// s-equation with the effective coupling A / B of the radius-minimised problem
std::pair<double, double> s_equation_sup(const std::vector<double>& s, const std::vector<double>& al, int k, int l,
                                         double kappa_eff) {
    Profile p = Profile::from_grid(s, al);
    double sup = 0, sup_c = 0;
    const int N = static_cast<int>(s.size()) - 1;
    for (int e = N / 10; e < N - N / 10; ++e) {
        double m = 0.5 * (s[e] + s[e + 1]);
        double r2 = alpha_join_s_equation(p, k, l, m);
        sup = std::max(sup, std::abs(r2));
        sup_c = std::max(sup_c, std::abs(alpha_join_s_harmonic(p, k, l, m) + kappa_eff * r2));
    }
    return {sup, sup_c};
}

}  // namespace

ProfileResult minimize_profile(const ProfileOptions& o) {
    if (o.n_prof < 32) fail(Errc::invalid_argument, "minimize_profile: n_prof must be at least 32");
    if (o.k == 0 || o.l == 0) fail(Errc::invalid_argument, "minimize_profile: k and l must be nonzero");
    if (!(o.kappa > 0)) fail(Errc::invalid_argument, "minimize_profile: kappa must be positive");
    const int N = o.n_prof;
    ProfileProblem P{o.k, o.l, N, o.kappa, (pi / 2) / N, &gauss_legendre(6)};
    std::string init = o.init.empty() ? (std::abs(o.k * o.l) == 1 ? "s_plus(0.2)" : "arccos_cos2") : o.init;
    ProfileResult res;
    res.s.resize(N + 1);
    res.alpha.resize(N + 1);
    Profile p0;
    double bump = 0;
    if (init.rfind("s_plus", 0) == 0) {
        bump = parse_spec(init).num("c", 0, 0.2);
        p0 = Profile::parse("s");
    } else {
        p0 = Profile::parse(init);
    }
    for (int i = 0; i <= N; ++i) {
        double s = i * P.h;
        res.s[i] = s;
        res.alpha[i] = std::clamp(p0(s) + bump * std::sin(4 * s), 0.0, pi / 2);
    }
    res.s[N] = pi / 2;
    res.alpha[0] = 0;
    res.alpha[N] = pi / 2;

    std::vector<double>& al = res.alpha;
    double A, B;
    std::vector<double> gA, gB;
    P.eval(al, A, B, &gA, &gB);
    double F = P.objective(A, B);
    double step = 1.0;
    int stall = 0;
    std::vector<double> trial(N + 1);
    for (int it = 1; it <= o.max_iter; ++it) {
        double f = 2 * std::sqrt(o.kappa) / P.norm() / (2 * std::sqrt(A * B));
        std::vector<double> g(N + 1);
        for (int i = 0; i <= N; ++i) g[i] = f * (B * gA[i] + A * gB[i]);
        g[0] = g[N] = 0;
        std::vector<double> d = sobolev_direction(g, N, P.h);
        double gd = 0, dn = 0;
        for (int i = 1; i < N; ++i) {
            gd += g[i] * d[i];
            dn = std::max(dn, std::abs(d[i]));
        }
        res.grad_norm = dn;
        double Fn = F, An = A, Bn = B;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            for (int i = 0; i <= N; ++i) trial[i] = std::clamp(al[i] - step * d[i], 0.0, pi / 2);
            trial[0] = 0;
            trial[N] = pi / 2;
            P.eval(trial, An, Bn, nullptr, nullptr);
            Fn = P.objective(An, Bn);
            if (Fn <= F - 1e-4 * step * gd) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted || !(Fn <= F)) {
            res.converged = dn < 1e-6;
            res.iterations = it;
            res.message = accepted ? "energy no longer decreases" : "line search exhausted";
            break;
        }
        if (Fn > F) fail(Errc::internal, "minimize_profile: energy increased");
        double rel = (F - Fn) / F;
        al.swap(trial);
        A = An;
        B = Bn;
        F = Fn;
        P.eval(al, A, B, &gA, &gB);
        step = std::min(step * 2, 1e3);
        stall = rel < 1e-15 ? stall + 1 : 0;
        res.iterations = it;
        if (it % o.log_every == 0 || it == 1)
        {
            auto [r2, rc] = s_equation_sup(res.s, al, o.k, o.l, A / B);
            res.log.push_back({it, F, dn, step, r2, rc});
        }
        if (stall >= 20 || dn < 1e-12) {
            res.converged = true;
            res.message = "converged";
            break;
        }
    }
    if (res.message.empty()) res.message = "max_iter reached";
    auto [r2, rc] = s_equation_sup(res.s, al, o.k, o.l, A / B);
    res.log.push_back({res.iterations, F, res.grad_norm, step, r2, rc});
    res.ratio_discrete = F;
    res.profile = Profile::from_grid(res.s, al, "optimised");
    MapPtr m = make_alpha_join(res.profile, o.k, o.l);
    res.radius = minimize_over_radius(*m, o.kappa);
    return res;
}

ScalarFn random_conformal_factor(int dim, std::uint64_t seed, double amp, int terms) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> wave(-2, 2);
    std::uniform_real_distribution<double> u(-1, 1), ph(0, 2 * pi);
    std::vector<Vec> kv;
    std::vector<double> c, p;
    for (int j = 0; j < terms; ++j) {
        Vec k(dim);
        do {
            for (int a = 0; a < dim; ++a) k[a] = wave(rng);
        } while (k.cwiseAbs().sum() == 0);
        kv.push_back(k);
        c.push_back(u(rng));
        p.push_back(ph(rng));
    }
    return [kv, c, p, amp](const Vec& x) {
        double s = 0;
        for (std::size_t j = 0; j < kv.size(); ++j) s += c[j] * std::sin(kv[j].dot(x) + p[j]);
        return std::exp(amp * s);
    };
}

namespace {

// target-side horizontal sigma_2 tension, sum_a (P_a / lambda_a) u_a with u_a = d phi E_a / lambda_a
Vec target_tension(const MapFamily& map, const PointGeometry& p) {
    Mat J = jacobian(map, p.d.x);
    Vec t = Vec::Zero(map.codomain->dim);
    for (int a = 0; a < p.rank; ++a) {
        double la = std::sqrt(p.d.lambda2[a]);
        Vec u = J * p.d.frame.col(a) / la;
        t += sigma2_component(p, a) / la * u;
    }
    return t;
}

}  // namespace

ConformalReport conformal_invariance_check(const MapPtr& map, ScalarFn sigma, ScalarFn rho,
                                           const std::vector<Vec>& grid) {
    ConformalReport r;
    r.map = map->spec;
    const int m = map->domain->dim, n = map->codomain->dim;
    ChartPtr bar = biconformal(map->domain, sigma, rho, vertical_distribution(map));
    MapPtr mb = with_domain(map, bar);
    r.grid = grid.empty() ? default_residual_grid(*map) : grid;
    r.mismatch.assign(r.grid.size(), 0.0);
    std::vector<double> before(r.grid.size()), after(r.grid.size());
    std::vector<char> same(r.grid.size(), 1);
    auto lnF = [&](const Vec& y) {
        return (4.0 - n) * std::log(std::abs(sigma(y))) + double(n - m) * std::log(std::abs(rho(y)));
    };
    parallel_for(r.grid.size(), [&](std::size_t i) {
        const Vec& x = r.grid[i];
        PointGeometry p = point_geometry(*map, x);
        PointGeometry pb = point_geometry(*mb, x);
        if (pb.rank != p.rank) fail(Errc::numerical, "conformal_invariance_check: rank changed under deformation");
        Vec t = target_tension(*map, p);
        Vec tb = target_tension(*mb, pb);
        Mat J = jacobian(*map, x);
        Mat h = map->codomain->metric(map->eval(x));
        double s = sigma(x), s4 = s * s * s * s;
        double e = 0.5 * p.d.s1();
        Vec pred = t;
        double lmax = 0;
        for (int a = 0; a < p.rank; ++a) {
            double la = std::sqrt(p.d.lambda2[a]);
            lmax = std::max(lmax, la);
            Vec E = p.d.frame.col(a);
            double dF = (lnF(x + fd_step2 * E) - lnF(x - fd_step2 * E)) / (2 * fd_step2);
            Vec u = J * E / la;
            pred += (2 * e * la * dF - la * la * la * dF) * u;
        }
        pred *= s4;
        Vec diff = tb - pred;
        double den = std::max(std::sqrt(pred.dot(h * pred)), s4 * lmax * lmax * lmax);
        r.mismatch[i] = std::sqrt(diff.dot(h * diff)) / std::max(den, 1e-300);
        before[i] = std::sqrt(t.dot(h * t));
        after[i] = std::sqrt(tb.dot(h * tb));
        same[i] = (tb.array() == t.array()).all() ? 1 : 0;
    });
    for (std::size_t i = 0; i < r.grid.size(); ++i) {
        r.max_mismatch = std::max(r.max_mismatch, r.mismatch[i]);
        r.residual_before = std::max(r.residual_before, before[i]);
        r.residual_after = std::max(r.residual_after, after[i]);
    }
    r.identical = std::all_of(same.begin(), same.end(), [](char c) { return c != 0; });
    return r;
}

}  // namespace s2
